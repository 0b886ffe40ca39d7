#pragma once

// Independent numerical oracles used only by the test suites. Everything
// here deliberately avoids the library's closed-form evaluation paths:
// the ODE components are solved by finite differences, roots by plain
// bisection, optima by golden section and first-passage functionals by a
// separate Monte Carlo scheme with Brownian-bridge absorption.

#include "eqdiv/model.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Textbook quadratic formula for a y^2 + b y + c = 0 (no cancellation
/// safeguards on purpose); returns (larger, smaller) root.
std::pair<double, double> naive_quadratic(double a, double b, double c);

/// Two-point boundary value problem
///   (sigma^2/2) v'' + m(x) v' - rho v + f(x) = 0 on (0, x_max),
///   v(0) = left, v(x_max) = far,
/// with piecewise-constant m, f switching at the interface b (upper values
/// from b on). Solved by central differences on a grid aligned with b,
/// Richardson-extrapolated from steps h and h/2.
struct FdProblem {
    double sigma;
    double rho;
    double drift_low, drift_high;
    double source_low, source_high;
    double b;
    double left_value;
    double far_value;
};

struct FdSolution {
    std::vector<double> x;
    std::vector<double> v;
};

FdSolution fd_solve(const FdProblem& prob, double x_max, double h0 = 5e-4);

/// Bisection for f with f(lo) and f(hi) of opposite sign.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

/// Golden-section maximum of f on [lo, hi] (unimodal f).
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-10);

/// Sup-norm gap on [0, window] between the library's closed-form value
/// component (dividend or penalty) for threshold b and the fd_solve
/// result for the same boundary value problem.
double fd_component_error(const eqdiv::ModelParams& p, const eqdiv::CharRoots& r, double b,
                          bool penalty_component, double window);

/// First-passage Monte Carlo with Brownian-bridge absorption (so the
/// discrete-monitoring bias is O(dt), not O(sqrt(dt))). Uses mt19937_64,
/// not the library generator.
struct FpEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::uint64_t ruined = 0;
};

/// E[e^{-beta tau} 1{tau <= T}] under the threshold-b payout law.
FpEstimate mc_laplace(double mu, double sigma, double lmax, double beta, double b, double x0,
                      double T, double dt, std::uint64_t paths, std::uint64_t seed);

/// P(tau <= T) under a constant payout rate l.
FpEstimate mc_ruin(double mu, double sigma, double l, double x0, double T, double dt,
                   std::uint64_t paths, std::uint64_t seed);

/// Valid random parameter sets in ranges where every branch of the closed
/// forms is well-conditioned.
struct ParamSampler {
    std::mt19937_64 rng;

    explicit ParamSampler(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    eqdiv::ModelParams next() {
        eqdiv::ModelParams p{};
        p.mu = uniform(0.8, 3.0);
        p.sigma = uniform(0.8, 1.6);
        p.delta = uniform(0.08, 0.4);
        p.beta = uniform(0.08, 0.5);
        p.lmax = uniform(0.6, 4.5);
        p.lambda = -std::exp(uniform(std::log(0.01), std::log(60.0)));
        p.alpha = uniform(0.05, 0.9);
        return p;
    }
};

} // namespace oracle
