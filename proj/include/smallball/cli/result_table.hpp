#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace smallball::cli {

/// Empty, count, real or text.
using Cell = std::variant<std::monostate, std::uint64_t, double, std::string>;

struct ResultTable {
    /// Ordered header entries (resolved config, version, wall time, notes).
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    bool operator==(const ResultTable&) const = default;
};

/// Shortest decimal form that reads back to the same double.
std::string format_number(double x);

/// Header lines "# key: value", then an RFC 4180 body.
void write_csv(std::ostream& os, const ResultTable& table);

/// Body of write_csv only (no '#' lines).
std::string csv_data_section(const ResultTable& table);

nlohmann::ordered_json to_json(const ResultTable& table);
ResultTable table_from_json(const nlohmann::ordered_json& j);

}  // namespace smallball::cli
