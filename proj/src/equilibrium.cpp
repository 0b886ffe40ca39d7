#include "eqdiv/equilibrium.hpp"

#include "eqdiv/closed_form.hpp"

#include <cmath>
#include <limits>

namespace eqdiv {

namespace {

// Bracketed bisection with a secant polish for a strictly decreasing f
// with f(lo) > 0. The bracket is grown by doubling from max(lo, 1) until
// the sign changes; monotonicity guarantees this terminates whenever a
// root exists.
template <class F>
double decreasing_root(F&& f, double lo, double flo, const char* what) {
    double hi = lo < 1.0 ? 1.0 : 2.0 * lo;
    double fhi = f(hi);
    for (int i = 0; fhi > 0.0; ++i) {
        if (i > 1200 || !std::isfinite(hi))
            throw internal_error(std::string("bracket expansion failed for ") + what);
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi);
    }
    if (fhi == 0.0) return hi;
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at machine resolution
        const double fmid = f(mid);
        if (fmid > 0.0) {
            lo = mid;
            flo = fmid;
        } else if (fmid < 0.0) {
            hi = mid;
            fhi = fmid;
        } else {
            return mid;
        }
    }
    // One secant step inside the final bracket sharpens the residual well
    // below the bisection resolution.
    if (fhi != flo) {
        const double s = hi - fhi * (hi - lo) / (fhi - flo);
        if (s > lo && s < hi) return s;
    }
    return 0.5 * (lo + hi);
}

bool beta0_classical_case(const ModelParams& p) {
    return p.beta == 0.0 && p.mu <= p.lmax;
}

double gap(double b, const ModelParams& p, const CharRoots& r) {
    return p.beta > 0.0 ? g_of_b(b, p, r) : g0_of_b(b, p, r);
}

// Shared by match_constraint and constrained_threshold: the smallest
// threshold >= b_bar satisfying w(x0, .) <= alpha, assuming x0 > x_bar.
double feasible_threshold(double x0, const ModelParams& p, const CharRoots& r, double alpha,
                          double b_bar, double w_at_bbar) {
    if (w_at_bbar <= alpha) return b_bar;
    auto f = [&](double b) { return laplace_w(x0, b, p, r) - alpha; };
    return decreasing_root(f, b_bar, w_at_bbar - alpha, "w(x0,b) = alpha");
}

} // namespace

double EquilibriumSolution::value(double r0, double t, double x, const CharRoots& r) const {
    if (regime == Regime::beta0_classical)
        return std::exp(-params.delta * (t - r0)) * v1(x, b_star, params, r) +
               params.lambda * (1.0 - params.alpha);
    return nu(r0, t, x, b_star, params, r);
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::positive_classical: return "positive_classical";
        case Regime::penalty_forced: return "penalty_forced";
        case Regime::degenerate: return "degenerate";
        case Regime::beta0_classical: return "beta0_classical";
    }
    return "unknown";
}

EquilibriumSolution solve_threshold(const ModelParams& p, const CharRoots& r) {
    if (beta0_classical_case(p)) {
        // Ruin is certain for any finite threshold, the penalty becomes a
        // constant and the classical threshold is the equilibrium.
        return {classical_threshold(p, r), Regime::beta0_classical, p, 0.0};
    }
    const double gap0 = gap(0.0, p, r);
    if (gap0 <= 0.0) return {0.0, Regime::degenerate, p, 0.0};
    auto f = [&](double b) { return gap(b, p, r); };
    const double b_star = decreasing_root(f, 0.0, gap0, "G(b) = 0");
    const Regime regime = classical_threshold(p, r) > 0.0 ? Regime::positive_classical
                                                          : Regime::penalty_forced;
    return {b_star, regime, p, std::abs(f(b_star))};
}

RegimeReport classify_regime(const ModelParams& p, const CharRoots& r) {
    RegimeReport rep{};
    rep.b_bar = classical_threshold(p, r);
    if (beta0_classical_case(p)) {
        rep.regime = Regime::beta0_classical;
        rep.lambda_cap = std::numeric_limits<double>::quiet_NaN();
        rep.gap_at_zero = g0_of_b(0.0, p, r);
        rep.positive = rep.b_bar > 0.0;
        return rep;
    }
    rep.lambda_cap = capital_lambda(p, r);
    rep.gap_at_zero = gap(0.0, p, r);
    rep.positive = rep.gap_at_zero > 0.0;
    rep.regime = rep.b_bar > 0.0 ? Regime::positive_classical
               : rep.positive    ? Regime::penalty_forced
                                 : Regime::degenerate;
    return rep;
}

double degenerate_value(double r0, double t, double x, const ModelParams& p, const CharRoots& r) {
    if (solve_threshold(p, r).b_star > 0.0)
        throw validation_error("degenerate_value requires parameters with b* = 0");
    return std::exp(-p.delta * (t - r0)) * (p.lmax / p.delta) * (1.0 - std::exp(r.b2 * x)) +
           std::exp(-p.beta * (t - r0)) * p.lambda * (std::exp(r.d2 * x) - 1.0) +
           p.lambda * (1.0 - p.alpha);
}

ConstraintMatch match_constraint(double x0, const ModelParams& base, double alpha) {
    ModelParams p = base;
    p.lambda = 0.0;  // the multiplier is an output here
    p.alpha = alpha;
    validate(p);
    if (beta0_classical_case(p))
        throw infeasible_error(
            "constraint infeasible: ruin is certain for beta = 0 with mu <= lmax");
    const CharRoots r = characteristic_roots(p);
    const double xb = x_bar(p, r);
    if (!(x0 > xb))
        throw infeasible_error("constraint infeasible: x0 <= x_bar");

    const double b_bar = classical_threshold(p, r);
    const double w_at_bbar = laplace_w(x0, b_bar, p, r);
    ConstraintMatch m{};
    m.x0 = x0;
    m.alpha = alpha;
    if (w_at_bbar <= alpha) {
        // Constraint already satisfied by the unpenalized threshold; exact
        // ties also resolve here, with the multiplier at zero.
        m.b_star = b_bar;
        m.lambda_star = 0.0;
        m.slack = alpha - w_at_bbar;
    } else {
        m.b_star = feasible_threshold(x0, p, r, alpha, b_bar, w_at_bbar);
        m.lambda_star = lambda_of_b(m.b_star, p, r);
        m.slack = alpha - laplace_w(x0, m.b_star, p, r);
    }
    m.binding = std::abs(m.slack) <= 1e-9;
    return m;
}

double constrained_threshold(double x, const ModelParams& p, const CharRoots& r, double alpha) {
    if (beta0_classical_case(p))
        throw infeasible_error(
            "constraint infeasible: ruin is certain for beta = 0 with mu <= lmax");
    ModelParams pa = p;
    pa.alpha = alpha;
    const double xb = x_bar(pa, r);
    if (!(x > xb))
        throw infeasible_error("constraint infeasible: x0 <= x_bar");
    const double b_bar = classical_threshold(pa, r);
    return feasible_threshold(x, pa, r, alpha, b_bar, laplace_w(x, b_bar, pa, r));
}

double alpha_process_level(double t, double x_t, double x0, const ModelParams& p,
                           const CharRoots& r, double alpha) {
    const ConstraintMatch m = match_constraint(x0, p, alpha);
    return std::exp(-p.beta * t) * laplace_w(x_t, m.b_star, p, r);
}

} // namespace eqdiv
