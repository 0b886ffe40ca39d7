#pragma once

#include "eqdiv/errors.hpp"

namespace eqdiv {

/// Scalar parameters of the dividend problem.
///
/// The surplus follows dX = (mu - l) dt + sigma dW with payout rate
/// l in [0, lmax]; dividends are discounted at delta, the ruin penalty
/// at beta. lambda <= 0 weights the penalty, alpha in (0,1] is the
/// constraint level on E[exp(-beta * tau)].
struct ModelParams {
    double mu;     ///< drift per unit time (> 0)
    double sigma;  ///< volatility per sqrt(unit time) (> 0)
    double delta;  ///< dividend discount rate (> 0)
    double beta;   ///< penalty discount rate (>= 0; 0 encodes the ruin-probability limit)
    double lmax;   ///< maximal dividend rate (> 0)
    double lambda; ///< penalty weight (<= 0)
    double alpha;  ///< constraint level in (0, 1]
};

/// Characteristic exponents of the two piecewise ODEs, all in units of
/// 1/surplus. Subscript 1 is the "+" branch, subscript 2 the "-" branch:
///   a: drift mu,        rate delta
///   b: drift mu - lmax, rate delta
///   c: drift mu,        rate beta
///   d: drift mu - lmax, rate beta
///
/// For beta = 0 the c/d pairs hold the analytic limits: c1 = 0,
/// c2 = -2 mu / sigma^2; d1 = 0 and d2 = -2(mu - lmax)/sigma^2 if
/// mu > lmax, otherwise d1 = -2(mu - lmax)/sigma^2 >= 0 and d2 = 0.
struct CharRoots {
    double a1, a2;
    double b1, b2;
    double c1, c2;
    double d1, d2;
};

/// Checks every ModelParams invariant; returns the params unchanged on
/// success. The error message names all violated bounds, not just the first.
ModelParams validate(const ModelParams& params);

/// Roots of (sigma^2/2) y^2 + drift y - rate = 0 for the four
/// (drift, rate) combinations. Computed with the cancellation-safe
/// quadratic formula; rate = 0 is an exact analytic branch.
CharRoots characteristic_roots(const ModelParams& params);

} // namespace eqdiv
