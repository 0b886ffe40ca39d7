#include "eqdiv/model.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace eqdiv {

namespace {

void require(bool ok, const char* msg, std::vector<std::string>& out) {
    if (!ok) out.emplace_back(msg);
}

// Roots of (sigma_sq/2) y^2 + drift y - rate = 0, returned as (plus, minus)
// branch, plus >= minus. The larger-magnitude root is computed first and the
// other recovered from the product -2 rate / sigma_sq, which avoids
// cancellation when rate << drift^2.
std::pair<double, double> characteristic_pair(double sigma_sq, double drift, double rate) {
    if (rate == 0.0) {
        const double y = -2.0 * drift / sigma_sq;
        return y >= 0.0 ? std::pair{y, 0.0} : std::pair{0.0, y};
    }
    const double disc = std::sqrt(drift * drift + 2.0 * rate * sigma_sq);
    const double q = -0.5 * (drift + std::copysign(disc, drift));
    const double r_big = q / (0.5 * sigma_sq);
    const double r_small = -rate / q;
    return r_big > r_small ? std::pair{r_big, r_small} : std::pair{r_small, r_big};
}

} // namespace

ModelParams validate(const ModelParams& p) {
    std::vector<std::string> bad;
    const bool finite = std::isfinite(p.mu) && std::isfinite(p.sigma) && std::isfinite(p.delta) &&
                        std::isfinite(p.beta) && std::isfinite(p.lmax) && std::isfinite(p.lambda) &&
                        std::isfinite(p.alpha);
    require(finite, "all parameters must be finite", bad);
    if (finite) {
        require(p.mu > 0.0, "mu must be > 0", bad);
        require(p.sigma > 0.0, "sigma must be > 0", bad);
        require(p.delta > 0.0, "delta must be > 0", bad);
        require(p.beta >= 0.0, "beta must be >= 0", bad);
        require(p.lmax > 0.0, "lmax must be > 0", bad);
        require(p.lambda <= 0.0, "lambda must be <= 0", bad);
        require(p.alpha > 0.0 && p.alpha <= 1.0, "alpha must lie in (0,1]", bad);
    }
    if (!bad.empty()) {
        std::string msg = "invalid model parameters: ";
        for (std::size_t i = 0; i < bad.size(); ++i) {
            if (i) msg += "; ";
            msg += bad[i];
        }
        throw validation_error(msg);
    }
    return p;
}

CharRoots characteristic_roots(const ModelParams& p) {
    const double s2 = p.sigma * p.sigma;
    const auto a = characteristic_pair(s2, p.mu, p.delta);
    const auto b = characteristic_pair(s2, p.mu - p.lmax, p.delta);
    const auto c = characteristic_pair(s2, p.mu, p.beta);
    const auto d = characteristic_pair(s2, p.mu - p.lmax, p.beta);
    return CharRoots{a.first, a.second, b.first, b.second,
                     c.first, c.second, d.first, d.second};
}

} // namespace eqdiv
