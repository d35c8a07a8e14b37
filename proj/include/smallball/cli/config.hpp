#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smallball/cli/spec_parse.hpp"

namespace smallball::cli {

enum class Command { Estimate, Constants, VerifyLaplace, VerifyTauberian, PropE, Sweep };
enum class Format { Csv, Json };

std::string to_string(Command command);
Command parse_command(const std::string& name);

/// Fully resolved experiment settings. Defaults that depend on the command
/// (step_h, t_max, eps grid) are filled in by parse_config.
struct ExperimentConfig {
    Command command = Command::Estimate;
    std::string outer_spec = "bm";
    std::string timechange_spec;
    double T = 1.0;
    std::vector<double> eps_list;
    std::vector<double> a_list;
    std::vector<double> s_list;
    std::uint64_t n_paths = 100000;
    double step_h = 0.0;
    std::uint64_t n_grid = 1024;
    std::uint64_t seed = 0;
    std::string out_path;  // empty: standard output
    Format format = Format::Csv;
    unsigned threads = 0;  // 0: hardware concurrency
    std::string estimator = "auto";  // auto | conditional | direct | cdf
    std::string sup = "operational";  // operational | time
    double t_max = 0.0;  // verify-laplace horizon
};

/// Default eps grid of the sweep command: 8 log-spaced points per decade
/// from 0.02 up to 0.4.
std::vector<double> default_sweep_grid();

/// Parses command-line arguments (without the program name). A JSON file
/// given with --config supplies defaults which explicit flags override;
/// SMALLBALL_THREADS is used when --threads is absent. Throws ConfigError
/// naming the offending flag, key or field.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Same, from a JSON object using the long flag names as keys.
ExperimentConfig config_from_json(const nlohmann::ordered_json& j);

/// Resolved configuration as JSON (threads and output path omitted: they
/// never affect results).
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

/// Thrown by parse_config for --help; what() holds the usage text.
class HelpRequested : public Error {
public:
    using Error::Error;
};

}  // namespace smallball::cli
