// Shared simulation configuration and its key/value file format.
//
// File format: one `key = value` per line, `#` starts a comment, blank lines
// are ignored. Keys are exactly the SimConfig field names; an unknown key or
// a repeated key is an error. Command-line overrides use the same
// `key=value` form and are applied after the file.
#pragma once

#include <pulsefield/tags.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pulsefield {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    std::int64_t n{16};        ///< node count
    std::int64_t f{0};         ///< faulty node count
    double d{0.01};            ///< max delay, cycles
    double rho{1e-4};          ///< max drift rate
    std::int64_t T{1000};      ///< ticks per cycle
    std::int64_t omega{6};     ///< observing window, whole cycles
    std::int64_t c_max{1 << 20};
    double R0{0.0};            ///< resolved from N when not given
    double R1{0.0};            ///< resolved from N when not given
    double eps_max{0.0};
    SyncMode mode{SyncMode::extended};
    FaultPolicy fault_strategy{FaultPolicy::silent};
    std::uint64_t seed{1};
    std::int64_t steps{0};     ///< pulse steps after the flush; 0 means 3N
    std::int64_t trials{1};

    DelayPolicy delay_policy{DelayPolicy::uniform_random};
    DriftPolicy drift_policy{DriftPolicy::random};
    BandChoice band_choice{BandChoice::always_0};
    bool hostile_init{true};
    TrigPath trig{TrigPath::floating};
    bool noise{false};
    double sample_dt{0.005};   ///< trace sampling interval, cycles
    double hold{2.0};          ///< stabilization hold, cycles
    double pi_target{0.0};     ///< 0 selects the measured-error default

    /// Expected number of records in one observing window.
    [[nodiscard]] std::int64_t record_count() const noexcept { return n * omega; }
    [[nodiscard]] std::int64_t window_ticks() const noexcept { return omega * T; }
    [[nodiscard]] std::int64_t resolved_steps() const noexcept {
        return steps > 0 ? steps : 3 * record_count();
    }

    void resolve_thresholds() {
        const double N = static_cast<double>(record_count());
        if (R0 <= 0.0) {
            R0 = std::sqrt(N) / 2.0;
        }
        if (R1 <= 0.0) {
            R1 = N / (2.0 * std::numbers::pi);
        }
    }

    /// Throws ConfigError naming the first violated constraint.
    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError(msg); };
        if (n < 1) fail("n must be >= 1");
        if (f < 0 || f >= n) fail("f must satisfy 0 <= f < n");
        if (!(d >= 0.0 && d < 1.0)) fail("d must satisfy 0 <= d < 1");
        if (!(rho >= 0.0 && rho < 1.0)) fail("rho must satisfy 0 <= rho < 1");
        if (T < 2) fail("T must be >= 2");
        if (omega < 1) fail("omega must be >= 1");
        if (c_max <= 2 * omega * T) fail("c_max must exceed 2*omega*T");
        const double N = static_cast<double>(record_count());
        // R0 > R1 is accepted: the mirror tier is then empty.
        if (!(R0 > 0.0 && R0 <= N && R1 > 0.0 && R1 <= N)) fail("thresholds must satisfy 0 < R0, R1 <= N");
        if (eps_max < 0.0) fail("eps_max must be >= 0");
        if (steps < 0) fail("steps must be >= 0");
        if (trials < 1) fail("trials must be >= 1");
        if (!(sample_dt > 0.0 && sample_dt <= 0.01)) fail("sample_dt must be in (0, 0.01]");
        if (hold < 0.0) fail("hold must be >= 0");
        if (!(pi_target >= 0.0 && pi_target < 0.5)) fail("pi_target must be in [0, 0.5)");
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename Num>
Num parse_number(std::string_view key, std::string_view v) {
    Num out{};
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(v) + "'");
    }
    return out;
}

inline bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(v) + "'");
}

template <typename E>
E parse_enum(std::string_view key, std::string_view v) {
    if (auto e = parse_tag<E>(v)) {
        return *e;
    }
    throw ConfigError("unknown tag for " + std::string(key) + ": '" + std::string(v) + "'");
}

}  // namespace detail

/// Known config keys in documentation order.
inline const std::vector<std::string_view>& config_keys() {
    static const std::vector<std::string_view> keys{
        "n", "f", "d", "rho", "T", "omega", "c_max", "R0", "R1", "eps_max", "mode",
        "fault_strategy", "seed", "steps", "trials", "delay_policy", "drift_policy",
        "band_choice", "hostile_init", "trig", "noise", "sample_dt", "hold", "pi_target"};
    return keys;
}

/// Assigns one key. Unknown keys throw.
inline void set_config_value(SimConfig& c, std::string_view key, std::string_view value) {
    using detail::parse_number;
    if (key == "n") c.n = parse_number<std::int64_t>(key, value);
    else if (key == "f") c.f = parse_number<std::int64_t>(key, value);
    else if (key == "d") c.d = parse_number<double>(key, value);
    else if (key == "rho") c.rho = parse_number<double>(key, value);
    else if (key == "T") c.T = parse_number<std::int64_t>(key, value);
    else if (key == "omega") c.omega = parse_number<std::int64_t>(key, value);
    else if (key == "c_max") c.c_max = parse_number<std::int64_t>(key, value);
    else if (key == "R0") c.R0 = parse_number<double>(key, value);
    else if (key == "R1") c.R1 = parse_number<double>(key, value);
    else if (key == "eps_max") c.eps_max = parse_number<double>(key, value);
    else if (key == "mode") c.mode = detail::parse_enum<SyncMode>(key, value);
    else if (key == "fault_strategy") c.fault_strategy = detail::parse_enum<FaultPolicy>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "steps") c.steps = parse_number<std::int64_t>(key, value);
    else if (key == "trials") c.trials = parse_number<std::int64_t>(key, value);
    else if (key == "delay_policy") c.delay_policy = detail::parse_enum<DelayPolicy>(key, value);
    else if (key == "drift_policy") c.drift_policy = detail::parse_enum<DriftPolicy>(key, value);
    else if (key == "band_choice") c.band_choice = detail::parse_enum<BandChoice>(key, value);
    else if (key == "hostile_init") c.hostile_init = detail::parse_bool(key, value);
    else if (key == "trig") c.trig = detail::parse_enum<TrigPath>(key, value);
    else if (key == "noise") c.noise = detail::parse_bool(key, value);
    else if (key == "sample_dt") c.sample_dt = parse_number<double>(key, value);
    else if (key == "hold") c.hold = parse_number<double>(key, value);
    else if (key == "pi_target") c.pi_target = parse_number<double>(key, value);
    else throw ConfigError("unknown config key: '" + std::string(key) + "'");
}

/// Splits `key=value`; throws on a missing '='.
inline std::pair<std::string_view, std::string_view> split_assignment(std::string_view line) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("expected key=value, got '" + std::string(line) + "'");
    }
    return {detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1))};
}

/// Parses file text plus overrides. Thresholds left unset are derived from
/// the final record count, then the whole config is validated.
inline SimConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {}) {
    SimConfig c;
    std::map<std::string, int, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        auto [key, value] = split_assignment(line);
        if (seen[std::string(key)]++ > 0) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        try {
            set_config_value(c, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    for (const auto& o : overrides) {
        auto [key, value] = split_assignment(o);
        set_config_value(c, key, value);
    }
    c.resolve_thresholds();
    c.validate();
    return c;
}

inline SimConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

}  // namespace pulsefield
