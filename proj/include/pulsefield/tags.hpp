// String tags used in config files and on the command line. Parsing is
// case-sensitive.
#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>

namespace pulsefield {

enum class SyncMode { one_kick_auth, random_walk, half_random_walk, extended };
enum class DelayPolicy { zero, max, uniform_random, per_receiver_extremes };
enum class DriftPolicy { constant, oscillating, random };
enum class FaultPolicy { silent, random_pulses, fixed_phase, anti_phase, adaptive_worst };
enum class BandChoice { always_0, always_1, random, adaptive };
enum class TrigPath { floating, integer };

namespace detail {

template <typename E, std::size_t N>
using TagTable = std::array<std::pair<E, std::string_view>, N>;

inline constexpr TagTable<SyncMode, 4> sync_mode_tags{{
    {SyncMode::one_kick_auth, "one_kick_auth"},
    {SyncMode::random_walk, "random_walk"},
    {SyncMode::half_random_walk, "half_random_walk"},
    {SyncMode::extended, "extended"},
}};
inline constexpr TagTable<DelayPolicy, 4> delay_policy_tags{{
    {DelayPolicy::zero, "zero"},
    {DelayPolicy::max, "max"},
    {DelayPolicy::uniform_random, "uniform_random"},
    {DelayPolicy::per_receiver_extremes, "per_receiver_extremes"},
}};
inline constexpr TagTable<DriftPolicy, 3> drift_policy_tags{{
    {DriftPolicy::constant, "constant"},
    {DriftPolicy::oscillating, "oscillating"},
    {DriftPolicy::random, "random"},
}};
inline constexpr TagTable<FaultPolicy, 5> fault_policy_tags{{
    {FaultPolicy::silent, "silent"},
    {FaultPolicy::random_pulses, "random_pulses"},
    {FaultPolicy::fixed_phase, "fixed_phase"},
    {FaultPolicy::anti_phase, "anti_phase"},
    {FaultPolicy::adaptive_worst, "adaptive_worst"},
}};
inline constexpr TagTable<BandChoice, 4> band_choice_tags{{
    {BandChoice::always_0, "always_0"},
    {BandChoice::always_1, "always_1"},
    {BandChoice::random, "random"},
    {BandChoice::adaptive, "adaptive"},
}};
inline constexpr TagTable<TrigPath, 2> trig_path_tags{{
    {TrigPath::floating, "float"},
    {TrigPath::integer, "integer"},
}};

template <typename E, std::size_t N>
constexpr std::optional<E> lookup(const TagTable<E, N>& table, std::string_view s) {
    for (const auto& [e, name] : table) {
        if (name == s) {
            return e;
        }
    }
    return std::nullopt;
}

template <typename E, std::size_t N>
constexpr std::string_view name_of(const TagTable<E, N>& table, E e) {
    for (const auto& [v, name] : table) {
        if (v == e) {
            return name;
        }
    }
    return "?";
}

}  // namespace detail

template <typename E>
std::optional<E> parse_tag(std::string_view s);

template <>
inline std::optional<SyncMode> parse_tag<SyncMode>(std::string_view s) {
    return detail::lookup(detail::sync_mode_tags, s);
}
template <>
inline std::optional<DelayPolicy> parse_tag<DelayPolicy>(std::string_view s) {
    return detail::lookup(detail::delay_policy_tags, s);
}
template <>
inline std::optional<DriftPolicy> parse_tag<DriftPolicy>(std::string_view s) {
    return detail::lookup(detail::drift_policy_tags, s);
}
template <>
inline std::optional<FaultPolicy> parse_tag<FaultPolicy>(std::string_view s) {
    return detail::lookup(detail::fault_policy_tags, s);
}
template <>
inline std::optional<BandChoice> parse_tag<BandChoice>(std::string_view s) {
    return detail::lookup(detail::band_choice_tags, s);
}
template <>
inline std::optional<TrigPath> parse_tag<TrigPath>(std::string_view s) {
    return detail::lookup(detail::trig_path_tags, s);
}

inline std::string_view to_string(SyncMode e) { return detail::name_of(detail::sync_mode_tags, e); }
inline std::string_view to_string(DelayPolicy e) { return detail::name_of(detail::delay_policy_tags, e); }
inline std::string_view to_string(DriftPolicy e) { return detail::name_of(detail::drift_policy_tags, e); }
inline std::string_view to_string(FaultPolicy e) { return detail::name_of(detail::fault_policy_tags, e); }
inline std::string_view to_string(BandChoice e) { return detail::name_of(detail::band_choice_tags, e); }
inline std::string_view to_string(TrigPath e) { return detail::name_of(detail::trig_path_tags, e); }

}  // namespace pulsefield
