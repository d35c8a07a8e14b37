#include "smallball/cli/result_table.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include "smallball/cli/spec_parse.hpp"

namespace smallball::cli {

namespace {

std::string csv_field(const Cell& cell) {
    struct {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(std::uint64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string out = "\"";
            for (char c : s) {
                if (c == '"') out += '"';
                out += c;
            }
            return out + "\"";
        }
    } visitor;
    return std::visit(visitor, cell);
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string csv_data_section(const ResultTable& table) {
    std::ostringstream os;
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << csv_field(table.columns[i]);
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
        os << '\n';
    }
    return os.str();
}

void write_csv(std::ostream& os, const ResultTable& table) {
    for (const auto& [key, value] : table.meta) os << "# " << key << ": " << value << '\n';
    os << csv_data_section(table);
}

nlohmann::ordered_json to_json(const ResultTable& table) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json meta = nlohmann::ordered_json::array();
    for (const auto& [key, value] : table.meta) meta.push_back({key, value});
    j["meta"] = meta;
    j["columns"] = table.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& cell : row) {
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, std::monostate>) {
                        r.push_back(nullptr);
                    } else {
                        r.push_back(v);
                    }
                },
                cell);
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = rows;
    return j;
}

ResultTable table_from_json(const nlohmann::ordered_json& j) {
    ResultTable t;
    try {
        for (const auto& entry : j.at("meta")) t.meta.emplace_back(entry.at(0).get<std::string>(), entry.at(1).get<std::string>());
        t.columns = j.at("columns").get<std::vector<std::string>>();
        for (const auto& r : j.at("rows")) {
            std::vector<Cell> row;
            for (const auto& v : r) {
                if (v.is_null()) {
                    row.emplace_back(std::monostate{});
                } else if (v.is_number_unsigned()) {
                    row.emplace_back(v.get<std::uint64_t>());
                } else if (v.is_number()) {
                    row.emplace_back(v.get<double>());
                } else {
                    row.emplace_back(v.get<std::string>());
                }
            }
            t.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed result table: ") + e.what());
    }
    return t;
}

}  // namespace smallball::cli
