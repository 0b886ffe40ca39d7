#include "eqdiv/verify.hpp"

#include "eqdiv/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eqdiv {

namespace {

void check_grid(const VerifyGrid& g) {
    if (g.r_values.empty() || g.t_points < 1 || g.t_span < 0.0 || g.x_points < 2)
        throw validation_error("verify grid misconfigured");
    for (double r : g.r_values)
        if (!(r >= 0.0)) throw validation_error("verify grid: r values must be >= 0");
}

} // namespace

double running_reward(double r, double s, double l, const ModelParams& p) {
    return std::exp(-p.delta * (s - r)) * l -
           p.lambda * p.beta * std::exp(-p.beta * (s - r));
}

HjbResidualReport hjb_residual(const ModelParams& p, const CharRoots& r,
                               const EquilibriumSolution& sol, const VerifyGrid& grid_in) {
    check_grid(grid_in);
    VerifyGrid grid = grid_in;
    const double b = sol.b_star;
    if (grid.x_max < 0.0) grid.x_max = b + 10.0;

    HjbResidualReport rep{};
    rep.grid = grid;

    const double dx = grid.x_max / (grid.x_points - 1);
    const double dt = grid.t_points > 1 ? grid.t_span / (grid.t_points - 1) : 0.0;

    for (double r0 : grid.r_values) {
        for (int j = 0; j < grid.t_points; ++j) {
            const double t = r0 + j * dt;
            rep.max_boundary_deviation = std::max(
                rep.max_boundary_deviation,
                std::abs(nu(r0, t, 0.0, b, p, r) - p.lambda * (1.0 - p.alpha)));
            for (int i = 0; i < grid.x_points; ++i) {
                const double x = i * dx;
                if (std::abs(x - b) < dx) continue;  // second derivative is one-sided at b
                const double vt = nu_dt(r0, t, x, b, p, r);
                const double vx = nu_dx(r0, t, x, b, p, r);
                const double vxx = nu_dxx(r0, t, x, b, p, r);
                const double diff = 0.5 * p.sigma * p.sigma * vxx;
                if (x < b) {
                    const double res = vt + p.mu * vx + diff + running_reward(r0, t, 0.0, p);
                    rep.max_residual_below = std::max(rep.max_residual_below, std::abs(res));
                } else {
                    const double res = vt + (p.mu - p.lmax) * vx + diff +
                                       running_reward(r0, t, p.lmax, p);
                    rep.max_residual_above = std::max(rep.max_residual_above, std::abs(res));
                }
            }
        }
    }

    // Supremum over payout rates, checked at r = t where the equilibrium
    // equation must hold. The Hamiltonian is linear in l, so the extreme
    // points are enough.
    for (int i = 0; i < grid.x_points; ++i) {
        const double x = i * dx;
        if (std::abs(x - b) < dx) continue;
        const double vt = nu_dt(0.0, 0.0, x, b, p, r);
        const double vx = nu_dx(0.0, 0.0, x, b, p, r);
        const double vxx = nu_dxx(0.0, 0.0, x, b, p, r);
        const double base =
            vt + p.mu * vx + 0.5 * p.sigma * p.sigma * vxx + running_reward(0.0, 0.0, 0.0, p);
        const double at_zero = base;
        const double at_lmax = base + p.lmax * (1.0 - vx);
        rep.max_supremum_violation =
            std::max(rep.max_supremum_violation, std::max(at_zero, at_lmax));
        const double l_hat = x < b ? 0.0 : p.lmax;
        const double at_hat = l_hat == 0.0 ? at_zero : at_lmax;
        const double at_other = l_hat == 0.0 ? at_lmax : at_zero;
        if (at_other > at_hat + 1e-10) rep.maximizer_is_threshold_law = false;
    }
    return rep;
}

SmoothFitReport smooth_fit_check(const ModelParams& p, const CharRoots& r, double b) {
    // Evaluated from the raw coefficients so the check exercises the
    // representation the smooth-fit conditions were solved for.
    const ThresholdCoefficients c = coefficients(p, r, b);
    const double ea1 = std::exp(r.a1 * b), ea2 = std::exp(r.a2 * b);
    const double eb2 = std::exp(r.b2 * b);
    const double ec1 = std::exp(r.c1 * b), ec2 = std::exp(r.c2 * b);
    const double ed2 = std::exp(r.d2 * b);
    const double lod = p.lmax / p.delta;

    const double v1m = c.A1 * (ea1 - ea2);
    const double v1p = lod + c.B2 * eb2;
    const double v2m = -p.lambda + c.C1 * ec1 + (p.lambda - c.C1) * ec2;
    const double v2p = -p.lambda + c.D2 * ed2;

    const double s1m = c.A1 * (r.a1 * ea1 - r.a2 * ea2);
    const double s1p = c.B2 * r.b2 * eb2;
    const double s2m = c.C1 * r.c1 * ec1 + (p.lambda - c.C1) * r.c2 * ec2;
    const double s2p = c.D2 * r.d2 * ed2;

    const double k1m = c.A1 * (r.a1 * r.a1 * ea1 - r.a2 * r.a2 * ea2);
    const double k1p = c.B2 * r.b2 * r.b2 * eb2;
    const double k2m = c.C1 * r.c1 * r.c1 * ec1 + (p.lambda - c.C1) * r.c2 * r.c2 * ec2;
    const double k2p = c.D2 * r.d2 * r.d2 * ed2;

    SmoothFitReport rep{};
    rep.value_jump = std::max(std::abs(v1m - v1p), std::abs(v2m - v2p));
    rep.slope_jump = std::max(std::abs(s1m - s1p), std::abs(s2m - s2p));
    rep.slope_one_deviation = std::abs(s1m + s2m - 1.0);
    rep.curvature_jump = std::abs((k1m + k2m) - (k1p + k2p));
    return rep;
}

ShapeReport shape_check(const ModelParams& p, const CharRoots& r,
                        const EquilibriumSolution& sol, double x_max, int x_points) {
    if (x_points < 2) throw validation_error("shape grid misconfigured");
    const double b = sol.b_star;
    if (x_max < 0.0) x_max = b + 10.0;
    const double dx = x_max / (x_points - 1);

    ShapeReport rep{};
    rep.min_slope = std::numeric_limits<double>::infinity();
    rep.max_curvature = -std::numeric_limits<double>::infinity();
    rep.min_slope_below = std::numeric_limits<double>::infinity();
    rep.max_slope_above = -std::numeric_limits<double>::infinity();

    for (int i = 0; i < x_points; ++i) {
        const double x = i * dx;
        const double slope = v1_dx(x, b, p, r) + v2_dx(x, b, p, r);
        const double curv = v1_dxx(x, b, p, r) + v2_dxx(x, b, p, r);
        rep.min_slope = std::min(rep.min_slope, slope);
        rep.max_curvature = std::max(rep.max_curvature, curv);
        if (x < b)
            rep.min_slope_below = std::min(rep.min_slope_below, slope);
        else
            rep.max_slope_above = std::max(rep.max_slope_above, slope);
    }
    rep.increasing = rep.min_slope > 0.0;
    rep.concave = rep.max_curvature < 0.0;
    const double guard = std::max(1e-9, 10.0 * sol.residual);
    rep.slope_pattern = (b == 0.0 || rep.min_slope_below > 1.0 - guard) &&
                        rep.max_slope_above <= 1.0 + guard;
    return rep;
}

} // namespace eqdiv
