#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "smallball/cli/config.hpp"
#include "smallball/cli/result_table.hpp"
#include "smallball/cli/runner.hpp"
#include "smallball/cli/spec_parse.hpp"

using namespace smallball;
using namespace smallball::cli;

namespace {

std::string temp_path(const std::string& name) {
    const char* dir = std::getenv("TMPDIR");
    return std::string(dir ? dir : "/tmp") + "/smallball_test_" + name;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(SMALLBALL_BINARY) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

double find_value(const ResultTable& t, const std::string& quantity, const std::string& component_prefix = "") {
    for (const auto& row : t.rows) {
        if (std::get<std::string>(row[0]) == quantity && std::get<std::string>(row[1]).rfind(component_prefix, 0) == 0) {
            return std::get<double>(row[2]);
        }
    }
    FAIL("quantity not found: " << quantity);
    return 0.0;
}

}  // namespace

TEST_CASE("subordinator spec grammar") {
    CHECK(parse_subordinator("stable:beta=0.7") == make_stable(0.7));
    CHECK(parse_subordinator("tempered:beta=0.5,lambda=1.0") == make_tempered(0.5, 1.0));
    CHECK(parse_subordinator("gamma:c=1.0,b=1.0,drift=0.0") == make_gamma(1.0, 1.0));
    CHECK(parse_subordinator("gamma:b=2,c=1,drift=0.5") == make_gamma(1.0, 2.0, 0.5));
    CHECK_THROWS_WITH_AS(parse_subordinator("stable:beta=1.5"), doctest::Contains("beta must lie in (0,1)"), ConfigError);
    CHECK_THROWS_AS(parse_subordinator("stable:beta=0.5,beta=0.6"), ConfigError);
    CHECK_THROWS_AS(parse_subordinator("stable:alpha=0.5"), ConfigError);
    CHECK_THROWS_AS(parse_subordinator("gamma:c=1"), ConfigError);
    CHECK_THROWS_AS(parse_subordinator("gamma:c=1,b=1,x=2"), ConfigError);
    CHECK_THROWS_AS(parse_subordinator("poisson:rate=1"), ConfigError);
    CHECK_THROWS_AS(parse_subordinator("stable:beta=0,5"), ConfigError);
    CHECK_THROWS_AS(parse_subordinator("stable:beta=0.5x"), ConfigError);
}

TEST_CASE("time change and outer grammars") {
    const TimeChangeSpec mix = parse_time_change("mix:[stable:beta=0.5*1.0;gamma:c=1,b=1*2.0]");
    REQUIRE(mix.components.size() == 2);
    CHECK(mix.components[0].subordinator == make_stable(0.5));
    CHECK(mix.components[1].subordinator == make_gamma(1.0, 1.0));
    CHECK(mix.components[1].weight == 2.0);
    CHECK(parse_time_change(to_string(mix)).components.size() == 2);
    CHECK(parse_time_change("tempered:beta=0.5,lambda=1").is_single());
    CHECK_THROWS_AS(parse_time_change("mix:[stable:beta=0.5]"), ConfigError);
    CHECK_THROWS_AS(parse_time_change("mix:[stable:beta=0.5*0]"), ConfigError);
    CHECK(std::holds_alternative<BrownianMotion>(parse_outer("bm")));
    CHECK(std::get<FractionalBM>(parse_outer("fbm:H=0.75")).H == 0.75);
    CHECK(std::get<IteratedFBM>(parse_outer("iterfbm:H=0.5,0.5")).H == std::vector<double>{0.5, 0.5});
    const auto st = std::get<SymmetricStable>(parse_outer("stable:alpha=1.5,kappa=1.0"));
    CHECK(st.alpha == 1.5);
    CHECK(st.kappa == 1.0);
    CHECK(std::get<SymmetricStable>(parse_outer("stable:alpha=1.2")).kappa == 1.0);
    const auto it = std::get<IteratedStable>(parse_outer("iterstable:a1=1.5,a2=1.0"));
    CHECK(it.alpha1 == 1.5);
    CHECK(it.alpha2 == 1.0);
    CHECK_THROWS_AS(parse_outer("fbm:H=1.5"), ConfigError);
    CHECK_THROWS_AS(parse_outer("levy"), ConfigError);
    for (const std::string s : {"bm", "fbm:H=0.75", "iterfbm:H=0.5,0.5", "stable:alpha=1.5,kappa=1", "iterstable:a1=1.5,a2=1"}) {
        CHECK(to_string(parse_outer(s)) == s);
    }
}

TEST_CASE("numbers are parsed strictly and locale-free") {
    CHECK(parse_number("1e-5", "h") == 1e-5);
    CHECK(parse_number("0.25", "x") == 0.25);
    CHECK_THROWS_AS(parse_number("", "x"), ConfigError);
    CHECK_THROWS_AS(parse_number("1,5", "x"), ConfigError);
    CHECK_THROWS_AS(parse_number("nan", "x"), ConfigError);
    CHECK(parse_number_list("0.1,0.05", "eps") == std::vector<double>{0.1, 0.05});
    CHECK_THROWS_AS(parse_number_list("0.1,,0.2", "eps"), ConfigError);
}

TEST_CASE("parse_config resolves flags") {
    const ExperimentConfig c = parse_config({"estimate", "--outer", "bm", "--tc", "stable:beta=0.5", "--T", "1", "--eps",
                                             "0.1,0.05", "--paths", "100000", "--seed", "42"});
    CHECK(c.command == Command::Estimate);
    CHECK(c.outer_spec == "bm");
    CHECK(c.timechange_spec == "stable:beta=0.5");
    CHECK(c.T == 1.0);
    CHECK(c.eps_list == std::vector<double>{0.1, 0.05});
    CHECK(c.n_paths == 100000);
    CHECK(c.seed == 42);
    CHECK(c.step_h == 1e-4);
    CHECK(c.format == Format::Csv);
    const ExperimentConfig d = parse_config({"constants", "--tc", "gamma:c=1,b=1"});
    CHECK(d.seed == 0);
}

TEST_CASE("parse_config errors name the offending input") {
    CHECK_THROWS_WITH_AS(parse_config({"estimate", "--tc", "stable:beta=1.5", "--eps", "0.1"}),
                         doctest::Contains("beta must lie in (0,1)"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config({"estimate", "--tc", "stable:beta=0.5"}), doctest::Contains("eps"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config({"estimate", "--tc", "stable:beta=0.5", "--eps", "0.1", "--paths", "abc"}),
                         doctest::Contains("paths"), ConfigError);
    CHECK_THROWS_AS(parse_config({"estimate", "--tc", "stable:beta=0.5", "--eps", "0.1", "--bogus", "1"}), ConfigError);
    CHECK_THROWS_AS(parse_config({"frobnicate", "--tc", "stable:beta=0.5"}), ConfigError);
    CHECK_THROWS_AS(parse_config({"estimate", "--tc", "stable:beta=0.5", "--eps", "-0.1"}), ConfigError);
    CHECK_THROWS_AS(parse_config({"estimate", "--tc", "stable:beta=0.5", "--eps", "0.1", "--format", "xml"}), ConfigError);
    CHECK_THROWS_AS(parse_config({"estimate", "--tc", "stable:beta=0.5", "--eps", "0.1", "--outer", "fbm:H=0.7",
                                  "--estimator", "conditional"}),
                    ConfigError);
    CHECK_THROWS_AS(parse_config({"verify-laplace", "--tc", "mix:[stable:beta=0.5*1;stable:beta=0.5*1]", "--a", "1",
                                  "--s", "1"}),
                    ConfigError);
    CHECK_THROWS_AS(parse_config({"verify-laplace", "--tc", "stable:beta=0.5", "--a", "1", "--s", "1", "--tmax", "5"}),
                    ConfigError);
    CHECK_THROWS_AS(parse_config({"--help"}), HelpRequested);
}

TEST_CASE("config file with flag overrides") {
    const std::string path = temp_path("config.json");
    {
        std::ofstream f(path);
        f << R"({"command": "estimate", "tc": "gamma:c=1,b=1", "eps": [0.1, 0.2], "seed": 3, "paths": 1000})";
    }
    const ExperimentConfig c = parse_config({"--config", path, "--seed", "7"});
    CHECK(c.seed == 7);
    CHECK(c.n_paths == 1000);
    CHECK(c.eps_list == std::vector<double>{0.1, 0.2});
    CHECK(c.timechange_spec == "gamma:c=1,b=1");
    {
        std::ofstream f(path);
        f << R"({"command": "estimate", "tc": "gamma:c=1,b=1", "eps": [0.1], "colour": "blue"})";
    }
    CHECK_THROWS_WITH_AS(parse_config({"--config", path}), doctest::Contains("colour"), ConfigError);
    CHECK_THROWS_AS(parse_config({"--config", temp_path("missing.json")}), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("JSON config round trip") {
    const ExperimentConfig c = parse_config({"sweep", "--tc", "tempered:beta=0.5,lambda=1", "--seed", "9", "--paths", "500"});
    const ExperimentConfig d = config_from_json(config_to_json(c));
    CHECK(config_to_json(d) == config_to_json(c));
}

TEST_CASE("thread count fallback") {
    setenv("SMALLBALL_THREADS", "3", 1);
    CHECK(parse_config({"constants", "--tc", "stable:beta=0.5"}).threads == 3);
    CHECK(parse_config({"constants", "--tc", "stable:beta=0.5", "--threads", "2"}).threads == 2);
    unsetenv("SMALLBALL_THREADS");
    CHECK(parse_config({"constants", "--tc", "stable:beta=0.5"}).threads == 0);
}

TEST_CASE("sweep respects the h <= eps_min^2/100 rule") {
    const ExperimentConfig c = parse_config({"sweep", "--tc", "stable:beta=0.5"});
    CHECK(c.eps_list == default_sweep_grid());
    CHECK(c.eps_list.front() == doctest::Approx(0.02));
    CHECK(c.eps_list.back() == doctest::Approx(0.02 * std::pow(10.0, 1.25)));
    CHECK(c.eps_list.size() == 11);
    CHECK(c.step_h == doctest::Approx(0.02 * 0.02 / 100.0));
    CHECK_THROWS_WITH_AS(parse_config({"sweep", "--tc", "stable:beta=0.5", "--h", "1e-4"}), doctest::Contains("h"),
                         ConfigError);
    CHECK_NOTHROW(parse_config({"sweep", "--tc", "stable:beta=0.5", "--eps", "0.1,0.2", "--h", "1e-4"}));
}

TEST_CASE("result tables: CSV and JSON") {
    ResultTable t;
    t.meta = {{"version", "x"}, {"note", "a: b"}};
    t.columns = {"name", "count", "value", "empty"};
    t.rows = {{std::string("a,b"), std::uint64_t{3}, 0.1, std::monostate{}},
              {std::string("say \"hi\""), std::uint64_t{0}, 1e-300, std::monostate{}}};
    std::ostringstream os;
    write_csv(os, t);
    CHECK(os.str() ==
          "# version: x\n# note: a: b\nname,count,value,empty\n\"a,b\",3,0.1,\n\"say \"\"hi\"\"\",0,1e-300,\n");
    CHECK(csv_data_section(t) == "name,count,value,empty\n\"a,b\",3,0.1,\n\"say \"\"hi\"\"\",0,1e-300,\n");
    const auto parsed = nlohmann::ordered_json::parse(to_json(t).dump());
    CHECK(table_from_json(parsed) == t);
    CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
}

TEST_CASE("constants command") {
    const ResultTable t = run_experiment(parse_config({"constants", "--tc", "gamma:c=1,b=1", "--T", "1"}));
    CHECK(find_value(t, "exponent") == 2.0);
    CHECK(find_value(t, "constant") == doctest::Approx(0.2194).epsilon(1e-3));
    CHECK(find_value(t, "levy_tail") == doctest::Approx(0.21938393439552).epsilon(1e-12));
    const ResultTable s = run_experiment(parse_config({"constants", "--tc", "stable:beta=0.5", "--outer", "fbm:H=0.75"}));
    CHECK(find_value(s, "predicted_exponent") == doctest::Approx(4.0 / 3.0));
    CHECK(find_value(s, "nane_constant") == doctest::Approx(0.5641895835).epsilon(1e-9));
}

TEST_CASE("verify-tauberian converges toward the Levy tail") {
    const ResultTable t = run_experiment(
        parse_config({"verify-tauberian", "--tc", "stable:beta=0.5", "--T", "1", "--a", "1,10,100", "--paths", "200000"}));
    REQUIRE(t.rows.size() == 3);
    CHECK(t.columns == std::vector<std::string>{"a", "phi_hat", "stderr", "reference", "limit", "n_paths", "step_h", "seed"});
    const double limit = 0.5641895835477563;
    double previous_gap = 1.0;
    for (const auto& row : t.rows) {
        const double phi = std::get<double>(row[1]);
        const double se = std::get<double>(row[2]);
        const double reference = std::get<double>(row[3]);
        CHECK(std::abs(phi - reference) < 4.0 * se);
        const double gap = std::abs(reference - limit);
        CHECK(gap < previous_gap);
        previous_gap = gap;
    }
}

TEST_CASE("estimate emits data rows and theory companions") {
    const ExperimentConfig c = parse_config({"estimate", "--tc", "stable:beta=0.5", "--eps", "0.1,0.05", "--paths", "5000",
                                             "--seed", "42"});
    const ResultTable t = run_experiment(c);
    CHECK(t.columns == std::vector<std::string>{"estimator", "subordinator", "outer", "T", "eps", "p_hat", "stderr",
                                                "n_paths", "step_h", "grid_points", "seed"});
    REQUIRE(t.rows.size() == 4);
    CHECK(std::get<std::string>(t.rows[0][0]) == "conditional");
    CHECK(std::get<std::string>(t.rows[2][0]) == "theory");
    CHECK(std::get<double>(t.rows[2][5]) == doctest::Approx(0.5641895835 * 0.01).epsilon(1e-9));
    CHECK(std::get<std::uint64_t>(t.rows[0][10]) == 42);
    // rerun: identical data section, any worker count
    ExperimentConfig c4 = c;
    c4.threads = 4;
    CHECK(csv_data_section(run_experiment(c4)) == csv_data_section(t));
    bool has_wall_time = false;
    for (const auto& [k, v] : t.meta) has_wall_time |= (k == "wall_time_s");
    CHECK(has_wall_time);
}

TEST_CASE("other commands produce tables") {
    const ResultTable l = run_experiment(
        parse_config({"verify-laplace", "--tc", "stable:beta=0.5", "--a", "1", "--s", "1,2", "--paths", "2000"}));
    CHECK(l.rows.size() == 2);
    const ResultTable p = run_experiment(
        parse_config({"prop-e", "--tc", "gamma:c=1,b=1", "--eps", "0.01,0.1", "--paths", "2000"}));
    CHECK(p.rows.size() == 2);
    const ResultTable s = run_experiment(parse_config(
        {"sweep", "--estimator", "cdf", "--tc", "mix:[stable:beta=0.5*1;stable:beta=0.5*1]", "--eps", "0.1,0.2,0.4", "--paths", "20000"}));
    bool has_fit = false;
    for (const auto& [k, v] : s.meta) has_fit |= (k == "fit_slope");
    CHECK(has_fit);
}

TEST_CASE("binary exit codes") {
    const std::string out = temp_path("out.csv");
    CHECK(run_binary("constants --tc gamma:c=1,b=1 --out " + out) == 0);
    {
        std::ifstream f(out);
        std::string first;
        std::getline(f, first);
        CHECK(first.rfind("# version: smallball", 0) == 0);
    }
    std::remove(out.c_str());
    CHECK(run_binary("--help") == 0);
    CHECK(run_binary("estimate --tc stable:beta=1.5 --eps 0.1") == 2);
    CHECK(run_binary("estimate --tc stable:beta=0.5 --eps 0.1 --unknown 3") == 2);
    CHECK(run_binary("verify-tauberian --tc stable:beta=0.5 --a 1000 --h 1e-4 --paths 200") == 2);
    CHECK(run_binary("estimate --outer fbm:H=0.7 --tc stable:beta=0.5 --eps 0.1 --estimator direct --sup time --grid 9000 "
                     "--paths 200") == 3);
    CHECK(run_binary("constants --tc gamma:c=1,b=1 --out /nonexistent-dir/x.csv") == 4);
}
