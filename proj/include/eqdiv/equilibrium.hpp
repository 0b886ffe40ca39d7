#pragma once

#include "eqdiv/model.hpp"

#include <string>

namespace eqdiv {

/// Parameter regimes of the equilibrium threshold.
enum class Regime {
    positive_classical,  ///< classical threshold > 0, hence b* > 0
    penalty_forced,      ///< classical threshold = 0 but lambda < Lambda forces b* > 0
    degenerate,          ///< classical threshold = 0 and lambda >= Lambda: b* = 0, always pay
    beta0_classical,     ///< beta = 0 with mu <= lmax: b* equals the classical threshold
};

const char* to_string(Regime r);

struct EquilibriumSolution {
    double b_star;       ///< equilibrium threshold, >= classical threshold
    Regime regime;
    ModelParams params;  ///< the parameters the solution belongs to
    double residual;     ///< |G(b_star)| for numeric roots, 0 for closed-form branches

    /// Equilibrium value surface nu(r, t, x) at this solution's threshold.
    /// In the beta = 0, mu <= lmax regime the penalty component degenerates
    /// to the constant lambda (1 - alpha) (ruin is certain) and only the
    /// discounted dividend component remains.
    double value(double r, double t, double x, const CharRoots& roots) const;
};

/// Regime classification with the quantities that decide it.
struct RegimeReport {
    Regime regime;
    double b_bar;        ///< classical threshold
    double lambda_cap;   ///< Lambda; NaN when undefined (beta = 0, mu <= lmax)
    double gap_at_zero;  ///< G(0) = (-b2) lmax/delta + lambda d2 - 1
    bool positive;       ///< whether b* > 0
};

/// Solves G(b) = 0 (or its beta -> 0 reduction) for the equilibrium
/// threshold. Returns the degenerate b* = 0 solution when G(0) <= 0.
EquilibriumSolution solve_threshold(const ModelParams& params, const CharRoots& roots);

RegimeReport classify_regime(const ModelParams& params, const CharRoots& roots);

/// Value surface for the degenerate regime (b* = 0, always pay at lmax):
/// nu = e^{-delta(t-r)} (lmax/delta)(1 - e^{b2 x})
///    + e^{-beta(t-r)} lambda (e^{d2 x} - 1) + lambda (1 - alpha).
/// Rejects parameters for which the threshold is positive.
double degenerate_value(double r, double t, double x, const ModelParams& params, const CharRoots& roots);

/// Outcome of matching the ruin constraint at a fixed initial surplus.
struct ConstraintMatch {
    double x0;
    double alpha;
    double b_star;       ///< matched threshold
    double lambda_star;  ///< matched multiplier, <= 0
    bool binding;        ///< whether w(x0, b_star) = alpha (within root tolerance)
    double slack;        ///< alpha - w(x0, b_star), >= 0 up to tolerance
};

/// Finds (b*, lambda*) such that b* is the equilibrium threshold for
/// lambda* and the constraint w(x0, b*) <= alpha holds with complementary
/// slackness lambda* (w - alpha) = 0. The lambda field of base is ignored.
/// Throws infeasible_error when x0 <= x_bar, or when beta = 0 with
/// mu <= lmax (ruin is certain, no finite threshold satisfies alpha < 1).
ConstraintMatch match_constraint(double x0, const ModelParams& base, double alpha);

/// Optimal threshold of the constrained problem at initial surplus x:
/// the classical threshold if it already satisfies the constraint, else
/// the unique b with w(x, b) = alpha. Always >= the classical threshold.
double constrained_threshold(double x, const ModelParams& params, const CharRoots& roots, double alpha);

/// Time-consistent constraint level alpha_t = e^{-beta t} w(x_t, b*(x0)),
/// where b*(x0) is the threshold matched at the initial surplus x0.
double alpha_process_level(double t, double x_t, double x0, const ModelParams& params,
                           const CharRoots& roots, double alpha);

} // namespace eqdiv
