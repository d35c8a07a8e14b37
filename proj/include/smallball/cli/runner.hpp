#pragma once

#include <string>

#include "smallball/cli/config.hpp"
#include "smallball/cli/result_table.hpp"
#include "smallball/errors.hpp"

namespace smallball::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Output file could not be written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Runs one command. The data section (columns and rows) depends only on
/// the resolved config and seed; meta carries the config echo, version,
/// predictions, diagnostics and wall time.
ResultTable run_experiment(const ExperimentConfig& config);

/// Writes the table as CSV or JSON to config.out_path, or to standard
/// output when it is empty. Throws IoError.
void write_output(const ExperimentConfig& config, const ResultTable& table);

}  // namespace smallball::cli
