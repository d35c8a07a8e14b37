#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "smallball/errors.hpp"
#include "smallball/outer.hpp"
#include "smallball/subordinator.hpp"
#include "smallball/time_change.hpp"

namespace smallball::cli {

/// Malformed or invalid user input (flag, config key or spec string).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Locale-independent strict parse of a decimal number.
double parse_number(std::string_view text, std::string_view what);

/// Comma-separated list of numbers.
std::vector<double> parse_number_list(std::string_view text, std::string_view what);

/// "stable:beta=0.7", "tempered:beta=0.5,lambda=1.0", "gamma:c=1.0,b=1.0",
/// each with an optional ",drift=...".
SubordinatorSpec parse_subordinator(std::string_view text);

/// A subordinator spec, or "mix:[spec*weight;spec*weight;...]".
TimeChangeSpec parse_time_change(std::string_view text);

/// "bm", "fbm:H=0.75", "iterfbm:H=0.5,0.5", "stable:alpha=1.5[,kappa=1.0]",
/// "iterstable:a1=1.5,a2=1.0".
OuterSpec parse_outer(std::string_view text);

}  // namespace smallball::cli
