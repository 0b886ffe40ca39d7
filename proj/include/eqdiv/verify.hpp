#pragma once

#include "eqdiv/equilibrium.hpp"
#include "eqdiv/model.hpp"

#include <vector>

namespace eqdiv {

/// Running reward seen from reference time r: a dividend rate l paid at
/// time s is worth e^{-delta (s-r)} l - lambda beta e^{-beta (s-r)}, the
/// second term accruing the ruin penalty along the way. This is the source
/// term of the equilibrium equation system.
double running_reward(double r, double s, double l, const ModelParams& params);

/// Evaluation grid for the residual checks. Defaults cover both branches
/// of the value surface and all discount interactions at modest cost.
struct VerifyGrid {
    std::vector<double> r_values{0.0, 0.5, 1.0};
    double t_span = 5.0;   ///< t ranges over [r, r + t_span]
    int t_points = 51;
    double x_max = -1.0;   ///< < 0 means b* + 10
    int x_points = 401;
};

/// Residuals of the constructed value surface against the equilibrium
/// equation it is supposed to solve.
struct HjbResidualReport {
    VerifyGrid grid;
    double max_residual_below = 0.0;       ///< PDE residual on x < b*
    double max_residual_above = 0.0;       ///< PDE residual on x >= b*
    double max_boundary_deviation = 0.0;   ///< |nu(r,t,0) - lambda (1 - alpha)|
    double max_supremum_violation = 0.0;   ///< amount any payout rate beats the equation
    bool maximizer_is_threshold_law = true;
};

/// Evaluates both PDE branches with analytic derivatives of nu on the
/// grid (skipping one grid step around b*, where the second derivative is
/// only one-sided) and checks that the bang-bang threshold law attains
/// the supremum over payout rates at every point.
HjbResidualReport hjb_residual(const ModelParams& params, const CharRoots& roots,
                               const EquilibriumSolution& solution,
                               const VerifyGrid& grid = {});

/// Deviations from the smooth-fit and equilibrium conditions at a
/// threshold b. value_jump and slope_jump vanish by construction for any
/// b; slope_one_deviation and curvature_jump vanish only at b = b*.
struct SmoothFitReport {
    double value_jump;           ///< max over components of |V_i(b-) - V_i(b+)|
    double slope_jump;           ///< max over components of |V_i'(b-) - V_i'(b+)|
    double slope_one_deviation;  ///< |d/dx nu(t,t,b-) - 1|
    double curvature_jump;       ///< |d2/dx2 nu(t,t,b-) - d2/dx2 nu(t,t,b+)|
};

SmoothFitReport smooth_fit_check(const ModelParams& params, const CharRoots& roots, double b);

/// Monotonicity/concavity profile of nu(t,t,.) on a dense x grid.
struct ShapeReport {
    double min_slope;         ///< min of d/dx nu(t,t,x); concave increasing needs > 0
    double max_curvature;     ///< max of d2/dx2 nu(t,t,x); needs < 0
    double min_slope_below;   ///< min slope on [0, b*); needs > 1
    double max_slope_above;   ///< max slope on [b*, x_max]; needs <= 1
    bool increasing = false;
    bool concave = false;
    bool slope_pattern = false;  ///< slope > 1 below b*, <= 1 above
};

ShapeReport shape_check(const ModelParams& params, const CharRoots& roots,
                        const EquilibriumSolution& solution,
                        double x_max = -1.0, int x_points = 2001);

} // namespace eqdiv
