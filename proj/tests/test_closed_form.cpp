#include "eqdiv/closed_form.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace eqdiv;

namespace {

const ModelParams kFig{2.0, 1.0, 0.1, 0.2, 4.0, -10.0, 0.01};
const ModelParams kTab{2.0, 1.0, 0.1, 0.2, 1.9, -50.0, 0.5};

CharRoots roots_of(const ModelParams& p) { return characteristic_roots(p); }

} // namespace

TEST_CASE("coefficients carry the proven sign pattern") {
    const CharRoots r = roots_of(kFig);
    const ThresholdCoefficients c = coefficients(kFig, r, 1.0);
    CHECK(c.A1 > 0.0);
    CHECK(c.B2 < 0.0);
    CHECK(c.C1 < 0.0);
    CHECK(c.D2 < 0.0);
    CHECK(kFig.lambda - c.C1 < 0.0);
}

TEST_CASE("lambda = 0 kills the penalty component") {
    ModelParams p = kFig;
    p.lambda = 0.0;
    const CharRoots r = roots_of(p);
    const ThresholdCoefficients c = coefficients(p, r, 1.0);
    CHECK(c.C1 == 0.0);
    CHECK(c.D2 == 0.0);
    CHECK(v2(0.7, 1.0, p, r) == 0.0);
    CHECK(v2(3.0, 1.0, p, r) == 0.0);
}

TEST_CASE("coefficients reject the degenerate beta = 0 branch") {
    ModelParams p = kFig;
    p.beta = 0.0;  // mu = 2 <= lmax = 4
    const CharRoots r = roots_of(p);
    CHECK_THROWS_AS(coefficients(p, r, 1.0), validation_error);
    CHECK_THROWS_AS(v2(1.0, 1.0, p, r), validation_error);
}

TEST_CASE("value components are continuous with continuous slope at b") {
    oracle::ParamSampler sampler(99);
    for (int i = 0; i < 50; ++i) {
        const ModelParams p = validate(sampler.next());
        const CharRoots r = roots_of(p);
        const double b = sampler.uniform(0.05, 6.0);
        const double eps = 1e-9;
        const double scale1 = std::max(1.0, std::abs(v1(b, b, p, r)));
        CHECK(std::abs(v1(b - eps, b, p, r) - v1(b + eps, b, p, r)) < 1e-7 * scale1);
        const double scale2 = std::max(1.0, std::abs(v2(b, b, p, r)));
        CHECK(std::abs(v2(b - eps, b, p, r) - v2(b + eps, b, p, r)) < 1e-7 * scale2);
    }
}

TEST_CASE("v1 boundary behaviour") {
    const CharRoots r = roots_of(kFig);
    for (double b : {0.0, 0.5, 2.0, 7.0}) {
        CHECK(v1(0.0, b, kFig, r) == 0.0);
        CHECK(v1(400.0, b, kFig, r) ==
              doctest::Approx(kFig.lmax / kFig.delta).epsilon(1e-8));
    }
}

TEST_CASE("v1 and v2 match an independent finite-difference solve") {
    const CharRoots r = roots_of(kTab);
    const double b = 2.0;
    CHECK(oracle::fd_component_error(kTab, r, b, false, b + 10.0) < 1e-6);
    CHECK(oracle::fd_component_error(kTab, r, b, true, b + 10.0) < 1e-6);
}

TEST_CASE("v2 boundary behaviour and laplace identity") {
    const CharRoots r = roots_of(kFig);
    for (double b : {0.0, 1.0, 3.0}) {
        CHECK(v2(0.0, b, kFig, r) == 0.0);
        CHECK(v2(500.0, b, kFig, r) == doctest::Approx(-kFig.lambda).epsilon(1e-8));
        for (double x : {0.0, 0.3, 1.0, 2.5, 8.0}) {
            const double vtilde = (v2(x, b, kFig, r) + kFig.lambda) / kFig.lambda;
            CHECK(vtilde == doctest::Approx(laplace_w(x, b, kFig, r)).epsilon(1e-12));
            CHECK(vtilde >= 0.0);
            CHECK(vtilde <= 1.0);
        }
    }
}

TEST_CASE("components satisfy their ODEs with analytic derivatives") {
    oracle::ParamSampler sampler(31415);
    for (int i = 0; i < 50; ++i) {
        const ModelParams p = validate(sampler.next());
        const CharRoots r = roots_of(p);
        const double b = sampler.uniform(0.1, 5.0);
        for (int j = 0; j < 8; ++j) {
            const double x = sampler.uniform(0.0, b + 8.0);
            if (std::abs(x - b) < 1e-3) continue;
            const double m = x < b ? p.mu : p.mu - p.lmax;
            const double f1 = x < b ? 0.0 : p.lmax;
            const double res1 = 0.5 * p.sigma * p.sigma * v1_dxx(x, b, p, r) +
                                m * v1_dx(x, b, p, r) - p.delta * v1(x, b, p, r) + f1;
            const double scale1 = std::max(1.0, p.delta * std::abs(v1(x, b, p, r)));
            CHECK(std::abs(res1) < 1e-8 * scale1);

            const double res2 = 0.5 * p.sigma * p.sigma * v2_dxx(x, b, p, r) +
                                m * v2_dx(x, b, p, r) - p.beta * v2(x, b, p, r) -
                                p.lambda * p.beta;
            const double scale2 = std::max(1.0, p.beta * std::abs(v2(x, b, p, r)));
            CHECK(std::abs(res2) < 1e-8 * scale2);
        }
    }
}

TEST_CASE("analytic derivatives agree with central differences") {
    oracle::ParamSampler sampler(555);
    for (int i = 0; i < 30; ++i) {
        const ModelParams p = validate(sampler.next());
        const CharRoots r = roots_of(p);
        const double b = sampler.uniform(0.2, 4.0);
        const double h = 1e-5;
        for (double x : {0.3 * b, 0.8 * b, b + 0.5, b + 3.0}) {
            if (std::abs(x - b) < 3.0 * h) continue;
            const double fd1 = (v1(x + h, b, p, r) - v1(x - h, b, p, r)) / (2.0 * h);
            CHECK(std::abs(fd1 - v1_dx(x, b, p, r)) < 1e-6 * std::max(1.0, std::abs(fd1)));
            const double fd2 = (v2(x + h, b, p, r) - v2(x - h, b, p, r)) / (2.0 * h);
            CHECK(std::abs(fd2 - v2_dx(x, b, p, r)) < 1e-6 * std::max(1.0, std::abs(fd2)));
        }
    }
}

TEST_CASE("nu boundary, time shift and far-field limits") {
    const CharRoots r = roots_of(kFig);
    const double b = 1.5;
    for (double t : {0.0, 0.7, 3.0}) {
        CHECK(nu(0.2, 0.2 + t, 0.0, b, kFig, r) ==
              kFig.lambda * (1.0 - kFig.alpha));  // exact
    }
    // nu(t,t,x) does not depend on t
    CHECK(nu(0.0, 0.0, 1.3, b, kFig, r) == doctest::Approx(nu(5.0, 5.0, 1.3, b, kFig, r)));
    // far field
    const double tr = 1.4, tt = 2.1;
    const double expected = std::exp(-kFig.delta * (tt - tr)) * kFig.lmax / kFig.delta -
                            kFig.lambda * std::exp(-kFig.beta * (tt - tr)) +
                            kFig.lambda * (1.0 - kFig.alpha);
    CHECK(nu(tr, tt, 420.0, b, kFig, r) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("G at zero, at infinity and monotone in between") {
    const CharRoots r = roots_of(kFig);
    const double lod = kFig.lmax / kFig.delta;
    CHECK(g_of_b(0.0, kFig, r) ==
          doctest::Approx((-r.b2) * lod + kFig.lambda * r.d2 - 1.0).epsilon(1e-12));

    const double limit = r.a1 * r.b2 / (r.b2 - r.a1) * lod - 1.0;
    CHECK(limit < 0.0);
    CHECK(g_of_b(5e6, kFig, r) == doctest::Approx(limit).epsilon(1e-9));

    // strictly decreasing until G is numerically indistinguishable from its
    // b -> infinity limit, never increasing after that
    double prev = g_of_b(0.0, kFig, r);
    for (int i = 1; i <= 1000; ++i) {
        const double b = 12.0 * i / 1000.0;
        const double cur = g_of_b(b, kFig, r);
        if (prev - limit > 1e-12)
            CHECK(cur < prev);
        else
            CHECK(cur <= prev + 1e-15 * std::max(1.0, std::abs(prev)));
        prev = cur;
    }
}

TEST_CASE("G0 drops lambda when mu <= lmax and is the beta limit otherwise") {
    SUBCASE("mu <= lmax") {
        ModelParams p = kFig;  // mu=2 < lmax=4
        const CharRoots r = roots_of(p);
        ModelParams p2 = p;
        p2.lambda = -1e6;
        for (double b : {0.0, 0.5, 1.9781, 4.0}) {
            CHECK(g0_of_b(b, p, r) == g0_of_b(b, p2, roots_of(p2)));
        }
        // root of G0 is the classical threshold
        const double bbar = classical_threshold(p, r);
        CHECK(std::abs(g0_of_b(bbar, p, r)) < 1e-12);
    }
    SUBCASE("mu > lmax: numeric beta limit") {
        ModelParams p = kTab;
        for (double b : {0.0, 0.7, 2.0, 5.0}) {
            ModelParams ps = p;
            ps.beta = 1e-8;
            CHECK(std::abs(g_of_b(b, ps, roots_of(ps)) - g0_of_b(b, p, roots_of(p))) < 1e-5);
        }
    }
}

TEST_CASE("classical threshold against a grid + golden-section argmax") {
    ModelParams p = kFig;  // mu=2, sigma=1, delta=0.1, lmax=4
    const CharRoots r = roots_of(p);
    const double bbar = classical_threshold(p, r);
    CHECK(bbar == doctest::Approx(1.9781).epsilon(2e-4));

    for (double x : {0.5, 1.0, 3.0}) {
        // grid scan to bracket the maximizer, then refine
        auto value_at = [&](double b) { return v1(x, b, p, r); };
        double best_b = 0.0, best = value_at(0.0);
        for (int i = 1; i <= 200; ++i) {
            const double b = 10.0 * i / 200.0;
            const double v = value_at(b);
            if (v > best) {
                best = v;
                best_b = b;
            }
        }
        const double refined =
            oracle::golden_max(value_at, std::max(0.0, best_b - 0.1), best_b + 0.1);
        CHECK(refined == doctest::Approx(bbar).epsilon(1e-6));
    }
}

TEST_CASE("classical threshold is zero for unfavourable parameters") {
    // sigma^2/2 / mu >= lmax / delta
    const ModelParams p{0.5, 2.0, 0.5, 0.2, 1.0, -0.5, 0.5};
    const CharRoots r = roots_of(p);
    CHECK(0.5 * p.sigma * p.sigma / p.mu >= p.lmax / p.delta);
    CHECK(classical_threshold(p, r) == 0.0);
}

TEST_CASE("classical threshold solves the slope condition N1 = 1") {
    ModelParams p = kFig;
    p.lambda = 0.0;  // G reduces to N1 - 1
    const CharRoots r = roots_of(p);
    const double bbar = classical_threshold(p, r);
    CHECK(std::abs(g_of_b(bbar, p, r)) < 1e-12);
}

TEST_CASE("capital lambda sign structure") {
    oracle::ParamSampler sampler(4242);
    for (int i = 0; i < 100; ++i) {
        const ModelParams p = validate(sampler.next());
        const CharRoots r = roots_of(p);
        const double cap = capital_lambda(p, r);
        const bool positive = 1.0 + r.b2 * p.lmax / p.delta < 0.0;  // d2 < 0
        CHECK((cap > 0.0) == positive);
        CHECK((cap > 0.0) == (classical_threshold(p, r) > 0.0));
    }
}

TEST_CASE("lambda_of_b boundary values and monotonicity") {
    SUBCASE("Lambda > 0: lambda(b_bar) = 0 and decreasing beyond") {
        const CharRoots r = roots_of(kFig);
        REQUIRE(capital_lambda(kFig, r) > 0.0);
        const double bbar = classical_threshold(kFig, r);
        CHECK(std::abs(lambda_of_b(bbar, kFig, r)) < 1e-10);
        double prev = 0.0;
        for (double b = bbar + 0.25; b < bbar + 5.0; b += 0.25) {
            const double lam = lambda_of_b(b, kFig, r);
            CHECK(lam < prev);
            prev = lam;
        }
        CHECK_THROWS_AS(lambda_of_b(0.5 * bbar, kFig, r), validation_error);
    }
    SUBCASE("Lambda <= 0: lambda(0) = Lambda") {
        const ModelParams p{0.5, 2.0, 0.5, 0.2, 1.0, -0.5, 0.5};
        const CharRoots r = roots_of(p);
        const double cap = capital_lambda(p, r);
        REQUIRE(cap <= 0.0);
        CHECK(lambda_of_b(0.0, p, r) == doctest::Approx(cap).epsilon(1e-12));
    }
}

TEST_CASE("laplace transform boundary, limits and monotonicity") {
    const CharRoots r = roots_of(kFig);
    for (double b : {0.0, 1.0, 4.0}) CHECK(laplace_w(0.0, b, kFig, r) == 1.0);

    for (double x : {0.5, 1.0, 2.0})
        CHECK(laplace_w(x, 1e8, kFig, r) == doctest::Approx(std::exp(r.c2 * x)).epsilon(1e-10));

    oracle::ParamSampler sampler(8080);
    for (int i = 0; i < 40; ++i) {
        const ModelParams p = validate(sampler.next());
        const CharRoots rr = roots_of(p);
        double xs[4], bs[3];
        for (auto& x : xs) x = sampler.uniform(0.0, 6.0);
        for (auto& b : bs) b = sampler.uniform(0.0, 5.0);
        for (double b : bs) {
            for (double x : xs) {
                const double w = laplace_w(x, b, p, rr);
                CHECK(w > 0.0);
                CHECK(w <= 1.0);
                CHECK(laplace_w(x + 0.05, b, p, rr) < w);          // decreasing in x
                if (x > 0.0) CHECK(laplace_w(x, b + 0.05, p, rr) < w);  // decreasing in b
            }
        }
    }
}

TEST_CASE("ruin probability closed form") {
    CHECK(ruin_probability(0.0, 0.7, 2.0, 1.0) == 1.0);
    CHECK(ruin_probability(1.0, 0.0, 2.0, 1.0) == doctest::Approx(std::exp(-4.0)));
    CHECK_THROWS_AS(ruin_probability(1.0, 2.5, 2.0, 1.0), validation_error);
    CHECK_THROWS_AS(ruin_probability(1.0, 2.0, 2.0, 1.0), validation_error);
}

TEST_CASE("ruin probability agrees with the frozen first-passage oracle run") {
    // bridge-corrected Monte Carlo, mu=2 sigma=1 l=0 x0=1, 1e6 paths,
    // dt=2e-3, T=12, seed 20240819 (regenerate with the gated oracle case)
    const double mc_mean = 0.018346, mc_se = 0.000134199;
    CHECK(std::abs(ruin_probability(1.0, 0.0, 2.0, 1.0) - mc_mean) < 3.0 * mc_se + 2e-4);
}

TEST_CASE("beta to zero bridges w to the ruin probability when mu > lmax") {
    ModelParams p = kTab;  // mu=2 > lmax=1.9
    SUBCASE("numeric limit") {
        p.beta = 1e-8;
        const CharRoots r = roots_of(p);
        for (double x : {0.3, 1.0, 2.5})
            CHECK(laplace_w(x, 0.0, p, r) ==
                  doctest::Approx(ruin_probability(x, p.lmax, p.mu, p.sigma)).epsilon(1e-6));
    }
    SUBCASE("exact limit roots") {
        p.beta = 0.0;
        const CharRoots r = roots_of(p);
        for (double x : {0.3, 1.0, 2.5})
            CHECK(laplace_w(x, 0.0, p, r) ==
                  doctest::Approx(ruin_probability(x, p.lmax, p.mu, p.sigma)).epsilon(1e-13));
    }
}

TEST_CASE("laplace transform agrees with the frozen first-passage oracle run") {
    // bridge-corrected Monte Carlo, mu=2 sigma=1 beta=0.2 lmax=4 b=1 x0=1,
    // 6e5 paths, dt=1e-3, T=50, seed 20240820. Paths under a threshold
    // strategy live at the payout discontinuity, which leaves an O(sqrt(dt))
    // weak error even with bridge absorption: measured +0.70% of w at
    // dt=2e-3 and +0.45% at dt=1e-3. The band carries that allowance.
    const double mc_mean = 0.273999, mc_se = 0.000364;
    const CharRoots r = roots_of(kFig);
    CHECK(std::abs(laplace_w(1.0, 1.0, kFig, r) - mc_mean) < 3.0 * mc_se + 1.8e-3);
}

TEST_CASE("laplace transform regenerated against the first-passage oracle" *
          doctest::skip(true)) {
    // Slow; regenerates the frozen constants. Run with --no-skip.
    const CharRoots r = roots_of(kFig);
    const oracle::FpEstimate est =
        oracle::mc_laplace(2.0, 1.0, 4.0, 0.2, 1.0, 1.0, 50.0, 1e-3, 600000, 20240820);
    MESSAGE("w(1,1) mc mean=", est.mean, " se=", est.se, " ruined=", est.ruined);
    CHECK(std::abs(laplace_w(1.0, 1.0, kFig, r) - est.mean) < 3.0 * est.se + 1.8e-3);

    const oracle::FpEstimate psi =
        oracle::mc_ruin(2.0, 1.0, 0.0, 1.0, 12.0, 2e-3, 1000000, 20240819);
    MESSAGE("psi(1,0) mc mean=", psi.mean, " se=", psi.se);
    CHECK(std::abs(ruin_probability(1.0, 0.0, 2.0, 1.0) - psi.mean) < 3.0 * psi.se + 2e-4);
}

TEST_CASE("x_bar composition and limiting constraint level") {
    ModelParams p = kFig;
    const CharRoots r = roots_of(p);
    CHECK(x_bar(p, r) == doctest::Approx(std::log(0.01) / r.c2).epsilon(1e-14));

    ModelParams p1 = p;
    p1.alpha = 1.0;
    CHECK(x_bar(p1, r) == 0.0);

    // w(x_bar, b) -> alpha as b -> infinity
    const double xb = x_bar(p, r);
    CHECK(laplace_w(xb, 1e8, p, r) == doctest::Approx(p.alpha).epsilon(1e-10));

    // cross-check by bisection on the b -> infinity profile e^{c2 x} = alpha
    const double by_bisect = oracle::bisect(
        [&](double x) { return std::exp(r.c2 * x) - p.alpha; }, 0.0, 50.0);
    CHECK(xb == doctest::Approx(by_bisect).epsilon(1e-9));
}

TEST_CASE("minimal surplus for the zero-dividend ruin constraint") {
    ModelParams p = kFig;
    p.alpha = 0.01;
    const double x = min_unconstrained_x(p);
    CHECK(x == doctest::Approx(1.1513).epsilon(1e-4));
    CHECK(ruin_probability(x, 0.0, p.mu, p.sigma) == doctest::Approx(p.alpha).epsilon(1e-14));

    p.alpha = 1.0;
    CHECK(min_unconstrained_x(p) == 0.0);
}
