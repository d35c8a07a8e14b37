#include "smallball/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>

#include <CLI11.hpp>

#include "smallball/cli/result_table.hpp"

namespace smallball::cli {

namespace {

using RawConfig = std::map<std::string, std::string>;

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{"command", "outer", "tc",   "T",      "eps",      "a",
                                               "s",       "paths", "h",    "grid",   "seed",     "out",
                                               "format",  "threads", "estimator", "sup", "tmax"};
    return keys;
}

std::string json_value_to_text(const std::string& key, const nlohmann::ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number()) return format_number(v.get<double>());
    if (v.is_array()) {
        std::string out;
        for (const auto& item : v) {
            if (!item.is_number()) throw ConfigError("config key '" + key + "' must be a list of numbers");
            if (!out.empty()) out += ',';
            out += format_number(item.get<double>());
        }
        return out;
    }
    throw ConfigError("config key '" + key + "' has an unsupported value type");
}

RawConfig raw_from_json(const nlohmann::ordered_json& j) {
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    RawConfig raw;
    for (const auto& [key, value] : j.items()) {
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        raw[key] = json_value_to_text(key, value);
    }
    return raw;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& field) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        // Accept integral reals such as 1e5 from JSON or the command line.
        const double d = parse_number(text, field);
        if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19) {
            throw ConfigError("invalid value '" + text + "' for " + field + " (expected a nonnegative integer)");
        }
        return static_cast<std::uint64_t>(d);
    }
    return value;
}

void require_positive_list(const std::vector<double>& v, const std::string& field) {
    for (double x : v) {
        if (!(x > 0.0)) throw ConfigError(field + " values must be positive");
    }
}

ExperimentConfig resolve(const RawConfig& raw) {
    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = raw.find(key);
        return it == raw.end() ? nullptr : &it->second;
    };
    ExperimentConfig c;
    const std::string* command = get("command");
    if (!command) throw ConfigError("command: missing (estimate, constants, verify-laplace, verify-tauberian, prop-e or sweep)");
    c.command = parse_command(*command);

    if (const auto* v = get("outer")) c.outer_spec = *v;
    const std::string* tc = get("tc");
    if (!tc) throw ConfigError("tc: a time change spec is required");
    c.timechange_spec = *tc;
    const TimeChangeSpec tc_spec = parse_time_change(c.timechange_spec);
    const OuterSpec outer_spec = parse_outer(c.outer_spec);

    if (const auto* v = get("T")) c.T = parse_number(*v, "T");
    if (!(c.T > 0.0)) throw ConfigError("T must be positive");
    if (const auto* v = get("eps")) c.eps_list = parse_number_list(*v, "eps");
    if (const auto* v = get("a")) c.a_list = parse_number_list(*v, "a");
    if (const auto* v = get("s")) c.s_list = parse_number_list(*v, "s");
    require_positive_list(c.eps_list, "eps");
    require_positive_list(c.a_list, "a");
    require_positive_list(c.s_list, "s");
    if (const auto* v = get("paths")) c.n_paths = parse_unsigned(*v, "paths");
    if (c.n_paths < 100) throw ConfigError("paths must be at least 100");
    if (const auto* v = get("grid")) c.n_grid = parse_unsigned(*v, "grid");
    if (c.n_grid < 64) throw ConfigError("grid must be at least 64");
    if (const auto* v = get("seed")) c.seed = parse_unsigned(*v, "seed");
    if (const auto* v = get("out")) c.out_path = *v;
    if (const auto* v = get("format")) {
        if (*v == "csv") c.format = Format::Csv;
        else if (*v == "json") c.format = Format::Json;
        else throw ConfigError("format must be csv or json, got '" + *v + "'");
    }
    if (const auto* v = get("threads")) {
        const std::uint64_t t = parse_unsigned(*v, "threads");
        if (t > 4096) throw ConfigError("threads must be at most 4096");
        c.threads = static_cast<unsigned>(t);
    }
    if (const auto* v = get("estimator")) c.estimator = *v;
    if (c.estimator != "auto" && c.estimator != "conditional" && c.estimator != "direct" && c.estimator != "cdf") {
        throw ConfigError("estimator must be auto, conditional, direct or cdf, got '" + c.estimator + "'");
    }
    if (c.estimator == "conditional" && !std::holds_alternative<BrownianMotion>(outer_spec)) {
        throw ConfigError("estimator: the conditional estimator requires --outer bm");
    }
    if (const auto* v = get("sup")) c.sup = *v;
    if (c.sup != "operational" && c.sup != "time") throw ConfigError("sup must be operational or time, got '" + c.sup + "'");

    const std::string* h = get("h");
    if (h) {
        c.step_h = parse_number(*h, "h");
        if (!(c.step_h > 0.0)) throw ConfigError("h must be positive");
    }

    switch (c.command) {
        case Command::Estimate:
            if (c.eps_list.empty()) throw ConfigError("eps: the estimate command needs at least one eps");
            if (!h) c.step_h = 1e-4;
            break;
        case Command::Sweep: {
            if (c.eps_list.empty()) c.eps_list = default_sweep_grid();
            const double eps_min = *std::min_element(c.eps_list.begin(), c.eps_list.end());
            const double limit = eps_min * eps_min / 100.0;
            if (!h) {
                c.step_h = limit;
            } else if (c.step_h > limit * (1.0 + 1e-12)) {
                throw ConfigError("h: sweep requires h <= eps_min^2/100 = " + format_number(limit));
            }
            break;
        }
        case Command::Constants:
            break;
        case Command::VerifyTauberian: {
            if (c.a_list.empty()) throw ConfigError("a: verify-tauberian needs at least one a");
            const double a_max = *std::max_element(c.a_list.begin(), c.a_list.end());
            if (!h) c.step_h = std::min(1e-5, 1e-3 / a_max);
            break;
        }
        case Command::VerifyLaplace: {
            if (!tc_spec.is_single()) throw ConfigError("tc: verify-laplace needs a single subordinator");
            if (c.a_list.empty()) throw ConfigError("a: verify-laplace needs at least one a");
            if (c.s_list.empty()) throw ConfigError("s: verify-laplace needs at least one s");
            const double s_min = *std::min_element(c.s_list.begin(), c.s_list.end());
            if (const auto* v = get("tmax")) {
                c.t_max = parse_number(*v, "tmax");
                if (!(c.t_max * s_min >= 20.0)) throw ConfigError("tmax: need s * tmax >= 20 for every s");
            } else {
                c.t_max = 20.0 / s_min;
            }
            if (!h) c.step_h = 1e-4;
            break;
        }
        case Command::PropE:
            if (!tc_spec.is_single()) throw ConfigError("tc: prop-e needs a single subordinator");
            if (c.eps_list.empty()) throw ConfigError("eps: prop-e needs at least one eps");
            break;
    }
    return c;
}

}  // namespace

std::string to_string(Command command) {
    switch (command) {
        case Command::Estimate: return "estimate";
        case Command::Constants: return "constants";
        case Command::VerifyLaplace: return "verify-laplace";
        case Command::VerifyTauberian: return "verify-tauberian";
        case Command::PropE: return "prop-e";
        case Command::Sweep: return "sweep";
    }
    return "unknown";
}

Command parse_command(const std::string& name) {
    for (Command c : {Command::Estimate, Command::Constants, Command::VerifyLaplace, Command::VerifyTauberian,
                      Command::PropE, Command::Sweep}) {
        if (to_string(c) == name) return c;
    }
    throw ConfigError("command: unknown command '" + name + "'");
}

std::vector<double> default_sweep_grid() {
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double eps = 0.02 * std::pow(10.0, k / 8.0);
        if (eps > 0.4 * (1.0 + 1e-12)) break;
        grid.push_back(eps);
    }
    return grid;
}

ExperimentConfig config_from_json(const nlohmann::ordered_json& j) { return resolve(raw_from_json(j)); }

ExperimentConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Small-ball probabilities of time-changed self-similar processes", "smallball"};
    app.set_help_flag("--help", "Print this help message and exit");
    std::string command;
    std::string config_path;
    std::map<std::string, std::string> flag_values;
    app.add_option("command", command, "estimate | constants | verify-laplace | verify-tauberian | prop-e | sweep");
    app.add_option("--config", config_path, "JSON file with default settings (flags override it)");
    const std::vector<std::pair<std::string, std::string>> flags{
        {"outer", "Outer process: bm, fbm:H=.., iterfbm:H=..,.., stable:alpha=..[,kappa=..], iterstable:a1=..,a2=.."},
        {"tc", "Time change: stable:beta=.., tempered:beta=..,lambda=.., gamma:c=..,b=.. or mix:[spec*w;...]"},
        {"T", "Time horizon"},
        {"eps", "Comma-separated ball radii"},
        {"a", "Comma-separated Laplace arguments a"},
        {"s", "Comma-separated transform variables s (verify-laplace)"},
        {"paths", "Monte Carlo replicates"},
        {"h", "Operational-time grid step"},
        {"grid", "Grid points of the direct estimator"},
        {"seed", "Master seed (default 0)"},
        {"out", "Output file (default: standard output)"},
        {"format", "csv or json"},
        {"threads", "Worker threads (default: SMALLBALL_THREADS or hardware concurrency)"},
        {"estimator", "auto, conditional, direct or cdf (P(E(T) <= eps))"},
        {"sup", "Direct estimator supremum: operational or time"},
        {"tmax", "Integration horizon of verify-laplace (default 20/min s)"},
    };
    for (const auto& [name, help] : flags) app.add_option("--" + name, flag_values[name], help);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    RawConfig raw;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("config: cannot open '" + config_path + "'");
        nlohmann::ordered_json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config: invalid JSON in '" + config_path + "': " + e.what());
        }
        raw = raw_from_json(j);
    }
    if (!command.empty()) raw["command"] = command;
    for (const auto& [name, help] : flags) {
        if (app.get_option("--" + name)->count() > 0) raw[name] = flag_values[name];
    }
    if (raw.find("threads") == raw.end()) {
        if (const char* env = std::getenv("SMALLBALL_THREADS"); env != nullptr && *env != '\0') raw["threads"] = env;
    }
    return resolve(raw);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["command"] = to_string(c.command);
    j["outer"] = c.outer_spec;
    j["tc"] = c.timechange_spec;
    j["T"] = c.T;
    if (!c.eps_list.empty()) j["eps"] = c.eps_list;
    if (!c.a_list.empty()) j["a"] = c.a_list;
    if (!c.s_list.empty()) j["s"] = c.s_list;
    j["paths"] = c.n_paths;
    j["h"] = c.step_h;
    j["grid"] = c.n_grid;
    j["seed"] = c.seed;
    j["format"] = c.format == Format::Csv ? "csv" : "json";
    j["estimator"] = c.estimator;
    j["sup"] = c.sup;
    if (c.t_max > 0.0) j["tmax"] = c.t_max;
    return j;
}

}  // namespace smallball::cli
