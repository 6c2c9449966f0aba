#include "experiment.hpp"

#include <CLI11.hpp>

#include <thread>

int main(int argc, char** argv) {
    using namespace pulsefield::cli;

    ExperimentSpec spec;
    spec.parallel = std::max(1u, std::thread::hardware_concurrency());
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    std::string out;

    CLI::App app{"pulsefield: DMF pulse synchronization experiments"};
    app.add_option("command", spec.command, "curve-game | simulate | rayleigh-check | trig-check")
        ->required()
        ->check(CLI::IsMember({"curve-game", "simulate", "rayleigh-check", "trig-check"}));
    app.add_option("--config", spec.config_path, "config file (key = value lines)");
    app.add_option("--out", out, "output directory")->default_val("out");
    auto* trials_opt = app.add_option("--trials", trials, "number of trials or seeds");
    auto* seed_opt = app.add_option("--seed", seed, "base seed");
    app.add_option("--set", spec.overrides, "config override key=value")->take_all();
    auto* tol_opt = app.add_option("--tolerance", tolerance, "check tolerance");
    app.add_option("--parallel", spec.parallel, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }
    spec.out_dir = out;
    if (*trials_opt) spec.trials = trials;
    if (*seed_opt) spec.seed = seed;
    if (*tol_opt) spec.tolerance = tolerance;
    return run_command(spec);
}
