#pragma once

#include "eqdiv/model.hpp"

namespace eqdiv {

/// Smooth-fit coefficients of the two value components attached to a
/// threshold b. The companions A2 = -A1, C2 = lambda - C1 and
/// B1 = D1 = 0 are implied and never stored.
///
/// Signs for valid inputs: A1 > 0, B2 < 0 for every b >= 0; for
/// lambda < 0 and beta > 0 additionally C1 < 0, lambda - C1 < 0 and
/// D2 < 0; lambda = 0 forces C1 = D2 = 0.
struct ThresholdCoefficients {
    double b;
    double A1;
    double B2;
    double C1;
    double D2;
};

/// Coefficients making V1 and V2 value- and slope-continuous at x = b.
/// Requires beta > 0, or beta = 0 with mu > lmax; the penalty component
/// degenerates otherwise and the call is rejected.
ThresholdCoefficients coefficients(const ModelParams& params, const CharRoots& roots, double b);

/// Discounted-dividend component of the value function for threshold b:
/// A1 (e^{a1 x} - e^{a2 x}) below b, lmax/delta + B2 e^{b2 x} above.
/// v1(0) = 0 and v1 -> lmax/delta as x -> infinity. Evaluation at x = b
/// uses the upper branch; continuity makes the choice irrelevant.
double v1(double x, double b, const ModelParams& params, const CharRoots& roots);
double v1_dx(double x, double b, const ModelParams& params, const CharRoots& roots);
double v1_dxx(double x, double b, const ModelParams& params, const CharRoots& roots);

/// Penalty component: -lambda + C1 e^{c1 x} + (lambda - C1) e^{c2 x}
/// below b, -lambda + D2 e^{d2 x} above. v2(0) = 0, v2 -> -lambda.
double v2(double x, double b, const ModelParams& params, const CharRoots& roots);
double v2_dx(double x, double b, const ModelParams& params, const CharRoots& roots);
double v2_dxx(double x, double b, const ModelParams& params, const CharRoots& roots);

/// Equilibrium value surface
///   nu(r,t,x) = e^{-delta (t-r)} V1(x;b) + e^{-beta (t-r)} V2(x;b)
///               + lambda (1 - alpha).
double nu(double r, double t, double x, double b, const ModelParams& params, const CharRoots& roots);
double nu_dx(double r, double t, double x, double b, const ModelParams& params, const CharRoots& roots);
double nu_dxx(double r, double t, double x, double b, const ModelParams& params, const CharRoots& roots);
double nu_dt(double r, double t, double x, double b, const ModelParams& params, const CharRoots& roots);

/// Threshold-equation residual G(b); the equilibrium threshold is its
/// unique positive root when G(0) > 0. Equals d/dx nu(t,t,b-) - 1.
/// All exponential ratios are evaluated with the dominant exponential
/// factored out, so G is finite for arbitrarily large b.
double g_of_b(double b, const ModelParams& params, const CharRoots& roots);

/// beta -> 0 limit of G. The beta field of params is ignored; the limit
/// is evaluated analytically (never as a numeric limit). For mu <= lmax
/// the result does not depend on lambda.
double g0_of_b(double b, const ModelParams& params, const CharRoots& roots);

/// Optimal threshold of the classical (unpenalized) problem, or 0 when
/// (-b2) lmax/delta - 1 <= 0.
double classical_threshold(const ModelParams& params, const CharRoots& roots);

/// The penalty-weight boundary Lambda = (1 + b2 lmax/delta)/d2 separating
/// zero from positive equilibrium thresholds when the classical threshold
/// is zero. Requires d2 < 0 (beta > 0, or beta = 0 with mu > lmax).
double capital_lambda(const ModelParams& params, const CharRoots& roots);

/// Inverse of the threshold map: the penalty weight for which b is the
/// equilibrium threshold, lambda(b) = (1 - N1(b)) / N2(b). Strictly
/// decreasing with lambda(b) -> -infinity. Domain error when
/// capital_lambda > 0 and b is below the classical threshold.
double lambda_of_b(double b, const ModelParams& params, const CharRoots& roots);

/// Laplace transform of the ruin time under the threshold-b strategy,
/// w(x, b) = E[e^{-beta tau} | X_0 = x], in (0, 1]. Continuously
/// differentiable at x = b, strictly decreasing in both arguments.
double laplace_w(double x, double b, const ModelParams& params, const CharRoots& roots);

/// Ruin probability of a Brownian surplus with constant payout rate l:
/// psi(x, l) = exp(-2 (mu - l) x / sigma^2). Requires mu - l > 0
/// (otherwise ruin is certain and the call is rejected).
double ruin_probability(double x, double l, double mu, double sigma);

/// Minimal initial surplus from which w(x, b) <= alpha is attainable with
/// a finite threshold: x_bar = ln(alpha)/c2. Returns 0 for alpha = 1.
double x_bar(const ModelParams& params, const CharRoots& roots);

/// Minimal surplus satisfying the zero-dividend ruin-probability
/// constraint psi(x, 0) <= alpha: -(sigma^2/2) ln(alpha) / mu.
double min_unconstrained_x(const ModelParams& params);

} // namespace eqdiv
