#include "eqdiv/closed_form.hpp"

#include <cmath>
#include <string>

namespace eqdiv {

namespace {

void check_state(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
        throw validation_error(std::string(name) + " must be finite and >= 0");
}

// V2 (and w) exist for beta > 0, and in the beta = 0 limit only when
// mu > lmax; otherwise the component collapses to 0 and cannot meet its
// far-field condition.
void check_penalty_branch(const ModelParams& p) {
    if (p.beta == 0.0 && p.mu <= p.lmax)
        throw validation_error(
            "penalty component degenerates for beta = 0 with mu <= lmax");
}

// Shared scaled quantities. Every exponent below is <= 0 on its branch, so
// nothing overflows no matter how large b or x get.
struct Dividend {
    double lod;  // lmax / delta
    double E;    // e^{(a2 - a1) b}
    double den;  // (a1 - b2) + (b2 - a2) E  > 0
};

Dividend dividend_pieces(const ModelParams& p, const CharRoots& r, double b) {
    const double E = std::exp((r.a2 - r.a1) * b);
    return {p.lmax / p.delta, E, (r.a1 - r.b2) + (r.b2 - r.a2) * E};
}

struct Penalty {
    double E;    // e^{(c2 - c1) b}
    double den;  // (d2 - c1) + (c2 - d2) E  < 0
};

Penalty penalty_pieces(const CharRoots& r, double b) {
    const double E = std::exp((r.c2 - r.c1) * b);
    return {E, (r.d2 - r.c1) + (r.c2 - r.d2) * E};
}

// Slope of nu(t,t,.) at b-, split into the dividend part N1 and the
// penalty multiplier N2 (so that the slope is N1 + lambda N2).
double n1_of_b(const ModelParams& p, const CharRoots& r, double b) {
    const auto d = dividend_pieces(p, r, b);
    return d.lod * (-r.b2) * (r.a1 - r.a2 * d.E) / d.den;
}

double n2_of_b(const CharRoots& r, double b) {
    const auto q = penalty_pieces(r, b);
    return (r.c2 - r.c1) * r.d2 * std::exp(r.c2 * b) / q.den;
}

double threshold_gap(double b, const ModelParams& p, const CharRoots& r) {
    return n1_of_b(p, r, b) + p.lambda * n2_of_b(r, b) - 1.0;
}

} // namespace

ThresholdCoefficients coefficients(const ModelParams& p, const CharRoots& r, double b) {
    check_state(b, "b");
    check_penalty_branch(p);
    const auto d = dividend_pieces(p, r, b);
    const auto q = penalty_pieces(r, b);
    const double A1 = d.lod * (-r.b2) * std::exp(-r.a1 * b) / d.den;
    const double B2 = -d.lod * (r.a1 - r.a2 * d.E) * std::exp(-r.b2 * b) / d.den;
    const double C1 = p.lambda * (r.c2 - r.d2) * q.E / q.den;
    const double D2 = p.lambda * (r.c2 - r.c1) * std::exp((r.c2 - r.d2) * b) / q.den;
    return {b, A1, B2, C1, D2};
}

double v1(double x, double b, const ModelParams& p, const CharRoots& r) {
    check_state(x, "x");
    check_state(b, "b");
    if (x == 0.0) return 0.0;  // boundary value, exact by construction
    const auto d = dividend_pieces(p, r, b);
    if (x < b)
        return d.lod * (-r.b2) *
               (std::exp(r.a1 * (x - b)) - std::exp(r.a2 * x - r.a1 * b)) / d.den;
    return d.lod * (1.0 - (r.a1 - r.a2 * d.E) * std::exp(r.b2 * (x - b)) / d.den);
}

double v1_dx(double x, double b, const ModelParams& p, const CharRoots& r) {
    check_state(x, "x");
    check_state(b, "b");
    const auto d = dividend_pieces(p, r, b);
    if (x < b)
        return d.lod * (-r.b2) *
               (r.a1 * std::exp(r.a1 * (x - b)) - r.a2 * std::exp(r.a2 * x - r.a1 * b)) / d.den;
    return -d.lod * (r.a1 - r.a2 * d.E) * r.b2 * std::exp(r.b2 * (x - b)) / d.den;
}

double v1_dxx(double x, double b, const ModelParams& p, const CharRoots& r) {
    check_state(x, "x");
    check_state(b, "b");
    const auto d = dividend_pieces(p, r, b);
    if (x < b)
        return d.lod * (-r.b2) *
               (r.a1 * r.a1 * std::exp(r.a1 * (x - b)) -
                r.a2 * r.a2 * std::exp(r.a2 * x - r.a1 * b)) / d.den;
    return -d.lod * (r.a1 - r.a2 * d.E) * r.b2 * r.b2 * std::exp(r.b2 * (x - b)) / d.den;
}

double v2(double x, double b, const ModelParams& p, const CharRoots& r) {
    check_state(x, "x");
    check_state(b, "b");
    check_penalty_branch(p);
    if (x == 0.0) return 0.0;  // boundary value, exact by construction
    const auto q = penalty_pieces(r, b);
    if (x < b)
        return -p.lambda + p.lambda *
               ((r.c2 - r.d2) * std::exp((r.c2 - r.c1) * b + r.c1 * x) +
                (r.d2 - r.c1) * std::exp(r.c2 * x)) / q.den;
    return -p.lambda + p.lambda * (r.c2 - r.c1) *
           std::exp(r.c2 * b + r.d2 * (x - b)) / q.den;
}

double v2_dx(double x, double b, const ModelParams& p, const CharRoots& r) {
    check_state(x, "x");
    check_state(b, "b");
    check_penalty_branch(p);
    const auto q = penalty_pieces(r, b);
    if (x < b)
        return p.lambda *
               ((r.c2 - r.d2) * r.c1 * std::exp((r.c2 - r.c1) * b + r.c1 * x) +
                (r.d2 - r.c1) * r.c2 * std::exp(r.c2 * x)) / q.den;
    return p.lambda * (r.c2 - r.c1) * r.d2 *
           std::exp(r.c2 * b + r.d2 * (x - b)) / q.den;
}

double v2_dxx(double x, double b, const ModelParams& p, const CharRoots& r) {
    check_state(x, "x");
    check_state(b, "b");
    check_penalty_branch(p);
    const auto q = penalty_pieces(r, b);
    if (x < b)
        return p.lambda *
               ((r.c2 - r.d2) * r.c1 * r.c1 * std::exp((r.c2 - r.c1) * b + r.c1 * x) +
                (r.d2 - r.c1) * r.c2 * r.c2 * std::exp(r.c2 * x)) / q.den;
    return p.lambda * (r.c2 - r.c1) * r.d2 * r.d2 *
           std::exp(r.c2 * b + r.d2 * (x - b)) / q.den;
}

double nu(double r0, double t, double x, double b, const ModelParams& p, const CharRoots& r) {
    return std::exp(-p.delta * (t - r0)) * v1(x, b, p, r) +
           std::exp(-p.beta * (t - r0)) * v2(x, b, p, r) +
           p.lambda * (1.0 - p.alpha);
}

double nu_dx(double r0, double t, double x, double b, const ModelParams& p, const CharRoots& r) {
    return std::exp(-p.delta * (t - r0)) * v1_dx(x, b, p, r) +
           std::exp(-p.beta * (t - r0)) * v2_dx(x, b, p, r);
}

double nu_dxx(double r0, double t, double x, double b, const ModelParams& p, const CharRoots& r) {
    return std::exp(-p.delta * (t - r0)) * v1_dxx(x, b, p, r) +
           std::exp(-p.beta * (t - r0)) * v2_dxx(x, b, p, r);
}

double nu_dt(double r0, double t, double x, double b, const ModelParams& p, const CharRoots& r) {
    return -p.delta * std::exp(-p.delta * (t - r0)) * v1(x, b, p, r) -
           p.beta * std::exp(-p.beta * (t - r0)) * v2(x, b, p, r);
}

double g_of_b(double b, const ModelParams& p, const CharRoots& r) {
    check_state(b, "b");
    if (p.beta <= 0.0)
        throw validation_error("g_of_b requires beta > 0; use g0_of_b for the limit");
    return threshold_gap(b, p, r);
}

double g0_of_b(double b, const ModelParams& p, const CharRoots& r) {
    check_state(b, "b");
    (void)r;
    ModelParams limit = p;
    limit.beta = 0.0;
    // The limit roots make the penalty term of the gap vanish for
    // mu <= lmax (d2 = 0) and reduce to the lambda-dependent branch for
    // mu > lmax, so one expression covers both cases.
    return threshold_gap(b, limit, characteristic_roots(limit));
}

double classical_threshold(const ModelParams& p, const CharRoots& r) {
    if ((-r.b2) * p.lmax / p.delta - 1.0 <= 0.0) return 0.0;
    return std::log(r.a2 * (r.b2 - r.a2) / (r.a1 * (r.b2 - r.a1))) / (r.a1 - r.a2);
}

double capital_lambda(const ModelParams& p, const CharRoots& r) {
    if (r.d2 >= 0.0)
        throw validation_error(
            "capital_lambda requires d2 < 0 (beta > 0, or beta = 0 with mu > lmax)");
    return (1.0 + r.b2 * p.lmax / p.delta) / r.d2;
}

double lambda_of_b(double b, const ModelParams& p, const CharRoots& r) {
    check_state(b, "b");
    const double cap = capital_lambda(p, r);
    if (cap > 0.0) {
        const double bbar = classical_threshold(p, r);
        if (b < bbar)
            throw validation_error("lambda_of_b requires b >= classical threshold when Lambda > 0");
    }
    const double lam = (1.0 - n1_of_b(p, r, b)) / n2_of_b(r, b);
    // 1 - N1 can round to a negative epsilon at b = b_bar; the map is <= 0
    // on its whole domain.
    return lam > 0.0 ? 0.0 : lam;
}

double laplace_w(double x, double b, const ModelParams& p, const CharRoots& r) {
    check_state(x, "x");
    check_state(b, "b");
    check_penalty_branch(p);
    if (x == 0.0) return 1.0;  // ruin is immediate at the boundary
    const double E = std::exp((r.c2 - r.c1) * b);
    const double den = (r.d2 - r.c2) * E + (r.c1 - r.d2);  // > 0
    if (x < b)
        return ((r.d2 - r.c2) * std::exp((r.c2 - r.c1) * b + r.c1 * x) +
                (r.c1 - r.d2) * std::exp(r.c2 * x)) / den;
    return (r.c1 - r.c2) * std::exp(r.c2 * b + r.d2 * (x - b)) / den;
}

double ruin_probability(double x, double l, double mu, double sigma) {
    check_state(x, "x");
    if (!(sigma > 0.0)) throw validation_error("sigma must be > 0");
    if (mu - l <= 0.0)
        throw validation_error("ruin is certain: mu - l <= 0, psi(x,l) = 1");
    return std::exp(-2.0 * (mu - l) * x / (sigma * sigma));
}

double x_bar(const ModelParams& p, const CharRoots& r) {
    if (p.alpha == 1.0) return 0.0;
    return std::log(p.alpha) / r.c2;
}

double min_unconstrained_x(const ModelParams& p) {
    return -0.5 * p.sigma * p.sigma * std::log(p.alpha) / p.mu;
}

} // namespace eqdiv
