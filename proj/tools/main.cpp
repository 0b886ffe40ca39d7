#include "eqdiv/closed_form.hpp"
#include "eqdiv/equilibrium.hpp"
#include "eqdiv/model.hpp"
#include "eqdiv/montecarlo.hpp"
#include "eqdiv/table.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

namespace {

using namespace eqdiv;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInternal = 4;

struct OutputOpts {
    std::string out;
    std::string format = "csv";
};

void emit(const Table& table, const OutputOpts& opts) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!opts.out.empty()) {
        file.open(opts.out, std::ios::binary);  // binary keeps LF endings everywhere
        if (!file) throw validation_error("cannot open output file: " + opts.out);
        os = &file;
    }
    if (opts.format == "jsonl")
        table.write_jsonl(*os);
    else
        table.write_csv(*os);
}

void add_output_options(CLI::App* cmd, OutputOpts& opts) {
    cmd->add_option("--out", opts.out, "output path (default stdout)");
    cmd->add_option("--format", opts.format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--config", "key=value parameter file; explicit flags win")
        ->check(CLI::ExistingFile);
}

struct ModelFlags {
    ModelParams p{2.0, 1.0, 0.1, 0.2, 1.9, -50.0, 0.5};
};

void add_model_options(CLI::App* cmd, ModelParams& p, bool require_core,
                       bool require_lambda = true, bool add_alpha = true) {
    auto req = [&](CLI::Option* o, bool r) { if (r) o->required(); };
    req(cmd->add_option("--mu", p.mu, "surplus drift"), require_core);
    req(cmd->add_option("--sigma", p.sigma, "surplus volatility"), require_core);
    req(cmd->add_option("--delta", p.delta, "dividend discount rate"), require_core);
    req(cmd->add_option("--beta", p.beta, "penalty discount rate (0 = ruin-probability limit)"),
        require_core);
    req(cmd->add_option("--lmax", p.lmax, "maximal dividend rate"), require_core);
    req(cmd->add_option("--lambda", p.lambda, "penalty weight (<= 0)"),
        require_core && require_lambda);
    if (add_alpha) cmd->add_option("--alpha", p.alpha, "constraint level in (0,1]");
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const ModelParams& in, const OutputOpts& out) {
    const ModelParams p = validate(in);
    const CharRoots r = characteristic_roots(p);
    const EquilibriumSolution sol = solve_threshold(p, r);
    const RegimeReport reg = classify_regime(p, r);

    Table t({"b_star", "regime", "b_bar", "capital_lambda", "residual"});
    t.add_row({sol.b_star, std::string(to_string(sol.regime)), reg.b_bar, reg.lambda_cap,
               sol.residual});
    emit(t, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const ModelParams& in, const std::string& param, double from, double to,
              long long steps, const OutputOpts& out) {
    if (steps < 2) throw validation_error("sweep needs --steps >= 2 (empty range)");
    Table t({"param", "value", "b_star", "regime"});

    ModelParams base = in;
    (param == "beta" ? base.beta : base.lambda) = from;  // so the base set validates
    validate(base);
    const CharRoots base_roots = characteristic_roots(base);
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", classical_threshold(base, base_roots));
        t.comment(std::string("b_bar = ") + buf);
    }

    for (long long i = 0; i < steps; ++i) {
        const double value = from + (to - from) * static_cast<double>(i) /
                                        static_cast<double>(steps - 1);
        ModelParams p = base;
        (param == "beta" ? p.beta : p.lambda) = value;
        validate(p);
        const EquilibriumSolution sol = solve_threshold(p, characteristic_roots(p));
        t.add_row({param, value, sol.b_star, std::string(to_string(sol.regime))});
    }
    emit(t, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// match

int cmd_match(const ModelParams& in, double x0, double alpha, const OutputOpts& out) {
    ModelParams p = in;
    p.lambda = 0.0;  // the multiplier is matched, not given
    p.alpha = alpha;
    validate(p);
    const CharRoots r = characteristic_roots(p);
    const ConstraintMatch m = match_constraint(x0, p, alpha);

    ModelParams pa = p;
    pa.alpha = alpha;
    Table t({"x0", "x_bar", "b_star", "lambda_star", "w", "slack", "binding"});
    t.add_row({m.x0, x_bar(pa, r), m.b_star, m.lambda_star, alpha - m.slack, m.slack,
               m.binding});
    emit(t, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimFlags {
    SimConfig cfg;
    double ruin_l = 0.0;
    double ruin_x0 = 1.5;
    bool x0_given = false;
    bool horizon_given = false;
};

int cmd_simulate(const ModelParams& in, SimFlags& f, const OutputOpts& out) {
    const ModelParams p = validate(in);
    const CharRoots r = characteristic_roots(p);
    const EquilibriumSolution sol = solve_threshold(p, r);

    SimConfig cfg = f.cfg;
    if (!f.x0_given) cfg.x0 = sol.b_star + 4.0;
    if (!f.horizon_given) {
        // Short pragmatic default; the truncated tail is carried into the
        // pass band, so shorter horizons widen the band rather than lie.
        const double rate = std::min(p.delta, p.beta > 0.0 ? p.beta : p.delta);
        cfg.horizon = cfg.t0 + 6.0 / rate;
    }

    Table t({"quantity", "estimate", "stderr", "closed_form", "abs_diff", "pass"});
    auto row = [&](const char* name, const SimEstimate& est, double closed) {
        const double diff = std::abs(est.mean - closed);
        const bool pass = diff <= 3.0 * est.std_error + est.bias_bound + 1e-12;
        t.add_row({std::string(name), est.mean, est.std_error, closed, diff, pass});
    };

    const SimEstimate reward = simulate_reward(threshold_strategy(sol.b_star, p.lmax), p, cfg);
    row("reward", reward, sol.value(cfg.t0, cfg.t0, cfg.x0, r));

    if (p.beta > 0.0) {
        const SimEstimate lap = simulate_laplace(sol.b_star, p, cfg);
        row("laplace", lap, laplace_w(cfg.x0, sol.b_star, p, r));
    }

    SimConfig rcfg = cfg;
    rcfg.x0 = f.ruin_x0;
    const SimEstimate ruin = simulate_ruin_probability(f.ruin_l, p, rcfg);
    row("ruin_probability", ruin, ruin_probability(rcfg.x0, f.ruin_l, p.mu, p.sigma));

    emit(t, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// figure

void figure_beta_sweep(Table& t, ModelParams p, int points) {
    const CharRoots r0 = characteristic_roots(p);
    const double b_bar = classical_threshold(p, r0);
    {
        ModelParams pl = p;
        pl.beta = 0.0;
        const EquilibriumSolution sol = solve_threshold(pl, characteristic_roots(pl));
        t.add_row({0.0, sol.b_star, b_bar});
    }
    const double lo = 1e-3, hi = 20.0;
    for (int i = 0; i < points; ++i) {
        const double beta = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        ModelParams pb = p;
        pb.beta = beta;
        const EquilibriumSolution sol = solve_threshold(pb, characteristic_roots(pb));
        t.add_row({beta, sol.b_star, b_bar});
    }
}

void figure_lambda_sweep(Table& t, ModelParams p, int points) {
    const CharRoots r = characteristic_roots(p);
    const double b_bar = classical_threshold(p, r);
    {
        ModelParams pl = p;
        pl.lambda = 0.0;
        t.add_row({0.0, solve_threshold(pl, r).b_star, b_bar});
    }
    const double lo = 1e-2, hi = 1e3;
    for (int i = 0; i < points; ++i) {
        const double lam = -lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        ModelParams pl = p;
        pl.lambda = lam;
        t.add_row({lam, solve_threshold(pl, r).b_star, b_bar});
    }
}

int cmd_figure(int id, int points, const OutputOpts& out) {
    if (points < 2) throw validation_error("figure needs --points >= 2");
    if (id == 1) {
        // Threshold levels against the initial surplus under the ruin
        // constraint: classical threshold, constrained optimum, the
        // equilibrium threshold for lambda = -10 and the feasibility wall.
        ModelParams p{2.0, 1.0, 0.1, 0.2, 4.0, 0.0, 0.01};
        validate(p);
        const CharRoots r = characteristic_roots(p);
        const double xb = x_bar(p, r);
        const double b_bar = classical_threshold(p, r);
        ModelParams p10 = p;
        p10.lambda = -10.0;
        const double b10 = solve_threshold(p10, r).b_star;

        Table t({"x", "b_bar", "b_tilde", "b_lambda_m10", "x_bar"});
        t.comment("mu=2 sigma=1 delta=0.1 beta=0.2 lmax=4 alpha=0.01");
        t.comment("b_tilde: smallest threshold meeting w(x,b) <= alpha at the given x");
        t.comment("b_lambda_m10: equilibrium threshold for lambda = -10");
        const double x_hi = 5.0;
        for (int i = 1; i <= points; ++i) {
            // cubic clustering toward the wall, where b_tilde blows up
            const double s = static_cast<double>(i) / points;
            const double x = xb + (x_hi - xb) * s * s * s;
            t.add_row({x, b_bar, constrained_threshold(x, p, r, p.alpha), b10, xb});
        }
        emit(t, out);
        return kExitOk;
    }
    ModelParams p{2.0, 1.0, 0.1, 0.2, 1.9, -50.0, 0.5};
    const char* shape = "mu=2 sigma=1 delta=0.1 lmax=1.9 alpha=0.5 (mu > lmax)";
    if (id == 4 || id == 5) {
        p.lmax = 4.0;
        shape = "mu=2 sigma=1 delta=0.1 lmax=4 alpha=0.5 (mu <= lmax)";
    }
    validate(p);
    switch (id) {
        case 2:
        case 4: {
            Table t({"beta", "b_star", "b_bar"});
            t.comment(shape);
            t.comment("lambda=-50; beta=0 row is the analytic limit");
            figure_beta_sweep(t, p, points);
            emit(t, out);
            return kExitOk;
        }
        case 3:
        case 5: {
            Table t({"lambda", "b_star", "b_bar"});
            t.comment(shape);
            t.comment("beta=0.2");
            figure_lambda_sweep(t, p, points);
            emit(t, out);
            return kExitOk;
        }
        default:
            throw validation_error("unknown figure id (expected 1..5)");
    }
}

// ---------------------------------------------------------------------------
// config file support: key=value lines applied to any option of the active
// subcommand that was not given on the command line.

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot read config file: " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty() && !value.empty()) pairs.emplace_back(key, value);
    }
    return pairs;
}

std::vector<std::string> apply_config(const std::vector<std::string>& args, CLI::App& app) {
    std::string config_path;
    std::string sub_name;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (sub_name.empty() && !args[i].empty() && args[i][0] != '-') sub_name = args[i];
    }
    if (config_path.empty()) return args;
    CLI::App* sub = app.get_subcommand_no_throw(sub_name);
    if (sub == nullptr) return args;

    std::vector<std::string> result = args;
    for (const auto& [key, value] : read_config(config_path)) {
        const std::string flag = "--" + key;
        if (sub->get_option_no_throw(flag) == nullptr) continue;  // not for this command
        bool given = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (given) continue;
        result.push_back(flag);
        result.push_back(value);
    }
    return result;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"equilibrium dividend thresholds, ruin-constraint matching and "
                 "Monte Carlo verification for a diffusion surplus model"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "equilibrium threshold for fixed parameters");
    ModelParams solve_p{2.0, 1.0, 0.1, 0.2, 1.9, -50.0, 0.5};
    OutputOpts solve_out;
    add_model_options(solve, solve_p, true);
    add_output_options(solve, solve_out);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "equilibrium threshold along a parameter grid");
    ModelParams sweep_p{2.0, 1.0, 0.1, 0.2, 1.9, -50.0, 0.5};
    OutputOpts sweep_out;
    std::string sweep_param;
    double sweep_from = 0.0, sweep_to = 0.0;
    long long sweep_steps = 0;
    sweep->add_option("--param", sweep_param, "parameter to sweep")
        ->required()
        ->check(CLI::IsMember({"beta", "lambda"}));
    sweep->add_option("--from", sweep_from, "first value")->required();
    sweep->add_option("--to", sweep_to, "last value")->required();
    sweep->add_option("--steps", sweep_steps, "number of grid points")->required();
    add_model_options(sweep, sweep_p, false);
    add_output_options(sweep, sweep_out);

    // match
    auto* match = app.add_subcommand("match", "match the ruin constraint at an initial surplus");
    ModelParams match_p{2.0, 1.0, 0.1, 0.2, 1.9, -50.0, 0.5};
    OutputOpts match_out;
    double match_x0 = 0.0, match_alpha = 0.0;
    match->add_option("--x0", match_x0, "initial surplus")->required();
    match->add_option("--alpha", match_alpha, "constraint level in (0,1]")->required();
    add_model_options(match, match_p, true, /*require_lambda=*/false, /*add_alpha=*/false);
    add_output_options(match, match_out);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo vs closed-form comparison");
    ModelParams sim_p{2.0, 1.0, 0.1, 0.2, 1.9, -50.0, 0.5};
    OutputOpts sim_out;
    SimFlags sim_f;
    add_model_options(simulate, sim_p, true);
    auto* x0_opt = simulate->add_option("--x0", sim_f.cfg.x0, "initial surplus (default b*+4)");
    simulate->add_option("--t0", sim_f.cfg.t0, "initial time");
    simulate->add_option("--paths", sim_f.cfg.paths, "sample paths");
    simulate->add_option("--dt", sim_f.cfg.dt, "Euler step");
    auto* hz_opt = simulate->add_option("--horizon", sim_f.cfg.horizon, "truncation time");
    simulate->add_option("--seed", sim_f.cfg.seed, "RNG seed");
    simulate->add_flag("--antithetic", sim_f.cfg.antithetic, "antithetic variates");
    simulate->add_option("--ruin-l", sim_f.ruin_l, "constant rate for the ruin-probability run");
    simulate->add_option("--ruin-x0", sim_f.ruin_x0, "initial surplus for the ruin run");
    add_output_options(simulate, sim_out);

    // figure
    auto* figure = app.add_subcommand("figure", "dataset behind one of the study figures");
    OutputOpts fig_out;
    int fig_id = 0, fig_points = 201;
    figure->add_option("--id", fig_id, "figure id in 1..5")->required();
    figure->add_option("--points", fig_points, "grid points per curve");
    add_output_options(figure, fig_out);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = apply_config(args, app);
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_p, solve_out);
        if (sweep->parsed())
            return cmd_sweep(sweep_p, sweep_param, sweep_from, sweep_to, sweep_steps, sweep_out);
        if (match->parsed()) return cmd_match(match_p, match_x0, match_alpha, match_out);
        if (simulate->parsed()) {
            sim_f.x0_given = x0_opt->count() > 0;
            sim_f.horizon_given = hz_opt->count() > 0;
            return cmd_simulate(sim_p, sim_f, sim_out);
        }
        if (figure->parsed()) return cmd_figure(fig_id, fig_points, fig_out);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInvalid;
}
