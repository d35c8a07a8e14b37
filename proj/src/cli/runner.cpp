#include "smallball/cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "smallball/cli/spec_parse.hpp"
#include "smallball/smallball.hpp"
#include "smallball/theory.hpp"

namespace smallball::cli {

namespace {

struct Context {
    ExperimentConfig config;
    TimeChangeSpec tc;
    OuterSpec outer;
    MonteCarlo mc;
};

std::string describe(const AsymptoticPrediction& p) {
    std::string out = "exponent=" + format_number(p.exponent);
    out += ",constant=" + (p.constant ? format_number(*p.constant) : std::string("unknown"));
    out += ",regime=" + to_string(p.regime);
    out += ",source=" + p.source;
    return out;
}

Cell optional_cell(const std::optional<double>& v) {
    if (v) return *v;
    return std::monostate{};
}

const SubordinatorSpec& single_component(const Context& ctx) { return ctx.tc.components.front().subordinator; }

void run_estimates(const Context& ctx, ResultTable& table) {
    const auto& c = ctx.config;
    std::vector<MCEstimate> estimates;
    AsymptoticPrediction prediction;
    const bool bm = std::holds_alternative<BrownianMotion>(ctx.outer);
    std::string estimator = c.estimator;
    if (estimator == "auto") estimator = bm ? "conditional" : "direct";
    if (estimator == "conditional") {
        estimates = estimate_conditional_bm(ctx.tc, c.T, c.eps_list, c.n_paths, c.step_h, ctx.mc);
        prediction = small_ball_prediction(ctx.outer, ctx.tc, c.T);
    } else if (estimator == "direct") {
        const DirectSup sup = c.sup == "time" ? DirectSup::TimeGrid : DirectSup::OperationalGrid;
        estimates = estimate_direct(ctx.outer, ctx.tc, c.T, c.eps_list, c.n_paths, c.n_grid, c.step_h, ctx.mc, sup);
        prediction = small_ball_prediction(ctx.outer, ctx.tc, c.T);
    } else {
        estimates = estimate_time_change_cdf(ctx.tc, c.T, c.eps_list, c.n_paths, c.step_h, ctx.mc);
        prediction = mixture_constant(ctx.tc, c.T);
    }

    table.columns = {"estimator", "subordinator", "outer", "T",         "eps", "p_hat",
                     "stderr",    "n_paths",      "step_h", "grid_points", "seed"};
    const std::string sub = to_string(ctx.tc);
    const std::string out = estimator == "cdf" ? std::string("none") : to_string(ctx.outer);
    for (const auto& e : estimates) {
        table.rows.push_back({to_string(e.estimator), sub, out, c.T, e.eps, e.p_hat, e.std_error,
                              static_cast<std::uint64_t>(e.n_paths), e.step_h,
                              static_cast<std::uint64_t>(e.grid_points), c.seed});
    }
    for (const auto& e : estimates) {
        Cell value = std::monostate{};
        if (prediction.constant) value = *prediction.constant * std::pow(e.eps, prediction.exponent);
        table.rows.push_back({std::string("theory"), sub, out, c.T, e.eps, value, std::monostate{}, std::monostate{},
                              std::monostate{}, std::monostate{}, std::monostate{}});
    }

    table.meta.emplace_back("prediction", describe(prediction));
    if (!estimates.empty()) table.meta.emplace_back("e_shift_bound", format_number(estimates.front().e_shift_bound));
    for (const auto& e : estimates) {
        if (e.wilson) {
            table.meta.emplace_back("wilson95_eps=" + format_number(e.eps),
                                    "[" + format_number(e.wilson->lower) + "," + format_number(e.wilson->upper) + "]");
        }
    }
    if (c.command == Command::Sweep) {
        try {
            const PowerLawFit fit = fit_power_law(fit_points(estimates));
            table.meta.emplace_back("fit_slope", format_number(fit.slope));
            table.meta.emplace_back("fit_slope_stderr", format_number(fit.slope_stderr));
            table.meta.emplace_back("fit_intercept", format_number(fit.intercept));
            table.meta.emplace_back("fit_intercept_stderr", format_number(fit.intercept_stderr));
            table.meta.emplace_back("fit_constant", format_number(std::exp(fit.intercept)));
        } catch (const DomainError& e) {
            table.meta.emplace_back("fit", std::string("unavailable: ") + e.what());
        }
    }
}

void run_constants(const Context& ctx, ResultTable& table) {
    const auto& c = ctx.config;
    table.columns = {"quantity", "component", "value", "note"};
    auto add = [&](std::string quantity, std::string component, Cell value, std::string note = {}) {
        table.rows.push_back({std::move(quantity), std::move(component), std::move(value), std::move(note)});
    };
    for (const auto& comp : ctx.tc.components) {
        const std::string name = to_string(comp.subordinator);
        add("levy_tail", name, levy_tail(comp.subordinator, c.T));
        add("weight", name, comp.weight);
        if (const auto* st = std::get_if<Stable>(&comp.subordinator.family); st && comp.subordinator.drift == 0.0) {
            add("nane_constant", name, nane_constant(st->beta), "T=1");
        }
    }
    add("sigma", to_string(ctx.tc), ctx.tc.sigma());
    const AsymptoticPrediction mix = mixture_constant(ctx.tc, c.T);
    add("cdf_exponent", to_string(ctx.tc), mix.exponent, "P(E(T) <= eps)");
    add("cdf_constant", to_string(ctx.tc), optional_cell(mix.constant), "P(E(T) <= eps)");
    if (ctx.tc.is_single()) {
        const AsymptoticPrediction thm = theorem_constant(ctx.tc, c.T);
        add("theorem_constant", to_string(ctx.tc), optional_cell(thm.constant), "brownian outer");
    }
    const std::string out = to_string(ctx.outer);
    add("H", out, self_similarity_index(ctx.outer));
    add("tau", out, small_deviation_order(ctx.outer));
    add("predicted_exponent", out, predicted_exponent(ctx.outer, ctx.tc.sigma()));
    const AsymptoticPrediction p = small_ball_prediction(ctx.outer, ctx.tc, c.T);
    add("exponent", out, p.exponent, to_string(p.regime));
    add("constant", out, optional_cell(p.constant), to_string(p.regime));
    table.meta.emplace_back("prediction", describe(p));
}

void run_tauberian(const Context& ctx, ResultTable& table) {
    const auto& c = ctx.config;
    const auto points = tauberian_diagnostic(ctx.tc, c.T, c.a_list, c.n_paths, c.step_h, ctx.mc);
    table.columns = {"a", "phi_hat", "stderr", "reference", "limit", "n_paths", "step_h", "seed"};
    Cell limit = std::monostate{};
    if (ctx.tc.is_single()) limit = levy_tail(single_component(ctx), c.T) / ctx.tc.components.front().weight;
    for (const auto& pt : points) {
        double laplace = 1.0;
        for (const auto& comp : ctx.tc.components) {
            laplace *= invert_laplace_E(comp.subordinator, pt.a * comp.weight, c.T);
        }
        table.rows.push_back({pt.a, pt.value, pt.std_error, pt.a * laplace, limit,
                              static_cast<std::uint64_t>(c.n_paths), c.step_h, c.seed});
    }
}

void run_laplace(const Context& ctx, ResultTable& table) {
    const auto& c = ctx.config;
    table.columns = {"a",         "s",          "mc_integral", "stderr", "rhs",  "relative_deviation",
                     "tail_bound", "t_max",     "n_paths",     "step_h", "seed"};
    for (double a : c.a_list) {
        const LaplaceReport report =
            verify_laplace_identity(single_component(ctx), a, c.s_list, c.n_paths, c.step_h, c.t_max, ctx.mc);
        for (const auto& chk : report.checks) {
            table.rows.push_back({a, chk.s, chk.mc_integral, chk.mc_stderr, chk.rhs, chk.relative_deviation,
                                  chk.tail_bound, report.t_max, static_cast<std::uint64_t>(c.n_paths), c.step_h,
                                  c.seed});
        }
    }
}

void run_prop_e(const Context& ctx, ResultTable& table) {
    const auto& c = ctx.config;
    const auto points = prop_e_check(single_component(ctx), c.T, c.eps_list, c.n_paths, ctx.mc);
    const double limit = levy_tail(single_component(ctx), c.T);
    table.columns = {"eps", "ratio", "stderr", "limit", "n_paths", "seed"};
    for (const auto& pt : points) {
        table.rows.push_back({pt.eps, pt.ratio, pt.std_error, limit, static_cast<std::uint64_t>(c.n_paths), c.seed});
    }
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    Context ctx{config, parse_time_change(config.timechange_spec), parse_outer(config.outer_spec),
                MonteCarlo{config.seed, config.threads}};
    ResultTable table;
    table.meta.emplace_back("version", std::string("smallball ") + kVersion);
    table.meta.emplace_back("command", to_string(config.command));
    table.meta.emplace_back("config", config_to_json(config).dump());
    switch (config.command) {
        case Command::Estimate:
        case Command::Sweep: run_estimates(ctx, table); break;
        case Command::Constants: run_constants(ctx, table); break;
        case Command::VerifyTauberian: run_tauberian(ctx, table); break;
        case Command::VerifyLaplace: run_laplace(ctx, table); break;
        case Command::PropE: run_prop_e(ctx, table); break;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::ostringstream wall;
    wall.precision(3);
    wall << std::fixed << elapsed.count();
    table.meta.emplace_back("wall_time_s", wall.str());
    return table;
}

void write_output(const ExperimentConfig& config, const ResultTable& table) {
    auto emit = [&](std::ostream& os) {
        if (config.format == Format::Json) {
            os << to_json(table).dump(2) << '\n';
        } else {
            write_csv(os, table);
        }
        os.flush();
    };
    if (config.out_path.empty()) {
        emit(std::cout);
        if (!std::cout) throw IoError("failed to write to standard output");
        return;
    }
    std::ofstream file(config.out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open output file '" + config.out_path + "'");
    emit(file);
    if (!file) throw IoError("failed to write output file '" + config.out_path + "'");
}

}  // namespace smallball::cli
