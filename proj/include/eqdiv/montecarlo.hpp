#pragma once

#include "eqdiv/model.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace eqdiv {

/// Euler-Maruyama configuration. Estimates are bit-reproducible for a
/// fixed (seed, paths, dt, horizon) regardless of thread count.
struct SimConfig {
    double x0 = 1.0;
    double t0 = 0.0;
    double dt = 1e-3;
    double horizon = -1.0;  ///< < 0 means the discount-based default
    std::uint64_t paths = 10000;
    std::uint64_t seed = 1;
    bool antithetic = false;
};

/// Default truncation time t0 + 50 / min(delta, beta > 0 ? beta : delta);
/// every payoff is exponentially discounted, so the tail beyond it is
/// analytically bounded.
double default_horizon(const ModelParams& params, double t0);

struct SimEstimate {
    double mean = 0.0;
    double std_error = 0.0;  ///< sample standard deviation / sqrt(paths)
    std::uint64_t n_paths = 0;
    std::uint64_t n_ruined = 0;
    double truncation_fraction = 0.0;  ///< fraction of paths alive at the horizon
    double bias_bound = 0.0;           ///< bound/estimate of the truncation bias
    std::uint64_t n_clamped = 0;       ///< strategy outputs clamped into [0, lmax]
    std::uint64_t seed = 0;            ///< the seed that produced this estimate
};

/// Measurable feedback payout rate (t, x) -> [0, lmax]. Outputs outside
/// the range are clamped by the simulator and counted.
struct FeedbackStrategy {
    std::function<double(double t, double x)> rate;
    double operator()(double t, double x) const { return rate(t, x); }
};

/// The bang-bang threshold law: pay lmax at or above b, nothing below.
FeedbackStrategy threshold_strategy(double b, double lmax);
FeedbackStrategy constant_strategy(double l);

/// Estimates the reward
///   E[ int_t0^tau e^{-delta (s-t0)} l ds + lambda (e^{-beta (tau-t0)} - alpha) ]
/// under the given strategy (for beta = 0 the penalty uses the ruin
/// indicator). Paths alive at the horizon contribute their accrued
/// integral; the unaccrued tail is bounded in bias_bound.
SimEstimate simulate_reward(const FeedbackStrategy& strategy, const ModelParams& params,
                            const SimConfig& config);

/// Estimates E[e^{-beta tau}] under the threshold-b strategy; paths alive
/// at the horizon contribute 0 and at most e^{-beta (T-t0)} each to the
/// bias bound. Requires beta > 0.
SimEstimate simulate_laplace(double b, const ModelParams& params, const SimConfig& config);

/// Estimates the ruin probability under a constant payout rate as the
/// fraction of ruined paths; bias_bound carries the psi-based estimate of
/// the mass beyond the horizon.
SimEstimate simulate_ruin_probability(double l_const, const ModelParams& params,
                                      const SimConfig& config);

/// Common-random-number estimate of (J(l_hat) - J(l_h)) / h, where l_h
/// follows the deviation on [t0, t0 + h) and the equilibrium threshold
/// law afterwards. Nonnegative limits as h -> 0 are what the equilibrium
/// property predicts.
SimEstimate perturbation_test(double x0, double h, const FeedbackStrategy& deviation,
                              const ModelParams& params, const CharRoots& roots,
                              const SimConfig& config);

/// Estimates E[alpha_{t and tau}] = E[e^{-beta (t and tau)} w(X, b*)] at each
/// checkpoint under the constraint-matched threshold b*(x0); the
/// sequence is a martingale, so all estimates should coincide.
std::vector<SimEstimate> martingale_check(double x0, const ModelParams& params,
                                          const CharRoots& roots, double alpha,
                                          const std::vector<double>& checkpoints,
                                          const SimConfig& config);

} // namespace eqdiv
