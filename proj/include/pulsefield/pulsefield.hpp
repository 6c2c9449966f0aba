#pragma once

#include <pulsefield/adversary.hpp>
#include <pulsefield/approx_trig.hpp>
#include <pulsefield/config.hpp>
#include <pulsefield/curve_game.hpp>
#include <pulsefield/dmf.hpp>
#include <pulsefield/io.hpp>
#include <pulsefield/metrics.hpp>
#include <pulsefield/oscillator.hpp>
#include <pulsefield/phase.hpp>
#include <pulsefield/random.hpp>
#include <pulsefield/simulator.hpp>
#include <pulsefield/tags.hpp>
