#include "smallball/cli/spec_parse.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <optional>

namespace smallball::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

struct Parsed {
    std::string family;
    std::map<std::string, std::string, std::less<>> params;
};

Parsed split_spec(std::string_view text) {
    text = trim(text);
    Parsed out;
    const std::size_t colon = text.find(':');
    out.family = std::string(trim(text.substr(0, colon)));
    if (colon == std::string_view::npos) return out;
    for (std::string_view item : split(text.substr(colon + 1), ',')) {
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected key=value in spec '" + std::string(text) + "', got '" + std::string(item) + "'");
        }
        std::string key(trim(item.substr(0, eq)));
        if (!out.params.emplace(key, std::string(trim(item.substr(eq + 1)))).second) {
            throw ConfigError("duplicate parameter '" + key + "' in spec '" + std::string(text) + "'");
        }
    }
    return out;
}

class ParamReader {
public:
    ParamReader(Parsed parsed, std::string_view text) : parsed_(std::move(parsed)), text_(text) {}

    double required(const char* key) {
        auto v = optional(key);
        if (!v) throw ConfigError("missing parameter '" + std::string(key) + "' in spec '" + text_ + "'");
        return *v;
    }

    std::optional<double> optional(const char* key) {
        const auto it = parsed_.params.find(key);
        if (it == parsed_.params.end()) return std::nullopt;
        const double v = parse_number(it->second, key);
        parsed_.params.erase(it);
        return v;
    }

    void finish() const {
        if (!parsed_.params.empty()) {
            throw ConfigError("unknown parameter '" + parsed_.params.begin()->first + "' in spec '" + text_ + "'");
        }
    }

private:
    Parsed parsed_;
    std::string text_;
};

template <class F>
auto as_config_error(F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

double parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw ConfigError("invalid number '" + std::string(text) + "' for " + std::string(what));
    }
    return value;
}

std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
    std::vector<double> out;
    for (std::string_view item : split(text, ',')) out.push_back(parse_number(item, what));
    return out;
}

SubordinatorSpec parse_subordinator(std::string_view text) {
    ParamReader r(split_spec(text), text);
    const std::string family = split_spec(text).family;
    SubordinatorSpec spec;
    if (family == "stable") {
        spec.family = Stable{r.required("beta")};
    } else if (family == "tempered") {
        const double beta = r.required("beta");
        spec.family = TemperedStable{beta, r.required("lambda")};
    } else if (family == "gamma") {
        const double c = r.required("c");
        spec.family = Gamma{c, r.required("b")};
    } else {
        throw ConfigError("unknown subordinator family '" + family + "' (expected stable, tempered or gamma)");
    }
    spec.drift = r.optional("drift").value_or(0.0);
    r.finish();
    as_config_error([&] {
        validate(spec);
        return 0;
    });
    return spec;
}

TimeChangeSpec parse_time_change(std::string_view text) {
    text = trim(text);
    if (text.rfind("mix:", 0) != 0) return single(parse_subordinator(text));
    std::string_view body = trim(text.substr(4));
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
        throw ConfigError("mixture spec must look like mix:[spec*weight;...], got '" + std::string(text) + "'");
    }
    TimeChangeSpec tc;
    for (std::string_view item : split(body.substr(1, body.size() - 2), ';')) {
        const std::size_t star = item.rfind('*');
        if (star == std::string_view::npos) {
            throw ConfigError("mixture component '" + std::string(item) + "' needs a *weight suffix");
        }
        tc.components.push_back({parse_subordinator(item.substr(0, star)), parse_number(item.substr(star + 1), "weight")});
    }
    as_config_error([&] {
        validate(tc);
        return 0;
    });
    return tc;
}

OuterSpec parse_outer(std::string_view text) {
    text = trim(text);
    OuterSpec spec;
    if (text == "bm") {
        spec = BrownianMotion{};
    } else if (text.rfind("iterfbm:", 0) == 0) {
        std::string_view rest = trim(text.substr(8));
        if (rest.rfind("H=", 0) != 0) throw ConfigError("iterfbm spec must look like iterfbm:H=h1,h2,..., got '" + std::string(text) + "'");
        spec = IteratedFBM{parse_number_list(rest.substr(2), "H")};
    } else {
        const Parsed parsed = split_spec(text);
        ParamReader r(parsed, text);
        if (parsed.family == "fbm") {
            spec = FractionalBM{r.required("H")};
        } else if (parsed.family == "stable") {
            const double alpha = r.required("alpha");
            spec = SymmetricStable{alpha, r.optional("kappa").value_or(1.0)};
        } else if (parsed.family == "iterstable") {
            const double a1 = r.required("a1");
            spec = IteratedStable{a1, r.required("a2")};
        } else {
            throw ConfigError("unknown outer process '" + std::string(text) +
                              "' (expected bm, fbm, iterfbm, stable or iterstable)");
        }
        r.finish();
    }
    as_config_error([&] {
        validate(spec);
        return 0;
    });
    return spec;
}

}  // namespace smallball::cli
