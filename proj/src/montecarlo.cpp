#include "eqdiv/montecarlo.hpp"

#include "eqdiv/closed_form.hpp"
#include "eqdiv/equilibrium.hpp"
#include "eqdiv/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace eqdiv {

namespace {

// Marsaglia-Tsang ziggurat, 128 layers. x[] decreases from the pseudo-width
// of the base layer down to 0; every layer has area kZigV.
constexpr double kZigR = 3.442619855899;
constexpr double kZigV = 9.91256303526217e-3;

struct ZigguratTables {
    double x[129];
    double f[129];

    ZigguratTables() {
        x[0] = kZigV * std::exp(0.5 * kZigR * kZigR);
        x[1] = kZigR;
        x[128] = 0.0;
        for (int i = 2; i < 128; ++i)
            x[i] = std::sqrt(-2.0 *
                             std::log(kZigV / x[i - 1] + std::exp(-0.5 * x[i - 1] * x[i - 1])));
        for (int i = 0; i <= 128; ++i) f[i] = std::exp(-0.5 * x[i] * x[i]);
    }
};

const ZigguratTables kZig;

} // namespace

double PathRng::normal() {
    for (;;) {
        const std::uint64_t bits = next_u64();
        const int idx = static_cast<int>(bits & 127);
        const double sign = (bits & 128) ? -1.0 : 1.0;
        const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
        const double z = u * kZig.x[idx];
        if (z < kZig.x[idx + 1]) return sign * z;
        if (idx == 0) {
            // exact tail beyond r
            double xx, yy;
            do {
                xx = -std::log(uniform()) / kZigR;
                yy = -std::log(uniform());
            } while (yy + yy < xx * xx);
            return sign * (kZigR + xx);
        }
        if (kZig.f[idx + 1] + uniform() * (kZig.f[idx] - kZig.f[idx + 1]) <
            std::exp(-0.5 * z * z))
            return sign * z;
    }
}

double default_horizon(const ModelParams& p, double t0) {
    const double rate = std::min(p.delta, p.beta > 0.0 ? p.beta : p.delta);
    return t0 + 50.0 / rate;
}

FeedbackStrategy threshold_strategy(double b, double lmax) {
    return {[b, lmax](double, double x) { return x >= b ? lmax : 0.0; }};
}

FeedbackStrategy constant_strategy(double l) {
    return {[l](double, double) { return l; }};
}

namespace {

struct RunPlan {
    std::uint64_t n_steps;
    double t_end;  // t0 + n_steps * dt
};

RunPlan plan(const ModelParams& p, const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
        throw validation_error("sim config: dt must be > 0");
    if (!(cfg.paths >= 1)) throw validation_error("sim config: paths must be >= 1");
    if (!(cfg.x0 >= 0.0) || !std::isfinite(cfg.x0))
        throw validation_error("sim config: x0 must be finite and >= 0");
    if (!(cfg.t0 >= 0.0) || !std::isfinite(cfg.t0))
        throw validation_error("sim config: t0 must be finite and >= 0");
    const double horizon = cfg.horizon < 0.0 ? default_horizon(p, cfg.t0) : cfg.horizon;
    if (!(horizon > cfg.t0)) throw validation_error("sim config: horizon must exceed t0");
    const auto n = static_cast<std::uint64_t>(std::ceil((horizon - cfg.t0) / cfg.dt - 1e-12));
    return {std::max<std::uint64_t>(n, 1), cfg.t0 + static_cast<double>(std::max<std::uint64_t>(n, 1)) * cfg.dt};
}

struct PathOut {
    double value = 0.0;
    double tail = 0.0;
    bool ruined = false;
    std::uint32_t clamped = 0;
};

struct ChunkStats {
    double sum = 0.0;
    double sumsq = 0.0;
    double tail = 0.0;
    std::uint64_t ruined = 0;
    std::uint64_t clamped = 0;
};

constexpr std::uint64_t kChunk = 4096;

// Paths are processed in fixed-size chunks; each chunk accumulates in path
// order and chunks are combined in index order, so the reduction tree (and
// the result bit pattern) is independent of the thread count.
template <class PathFn>
SimEstimate run_scalar(std::uint64_t paths, std::uint64_t seed, PathFn&& fn) {
    const std::uint64_t n_chunks = (paths + kChunk - 1) / kChunk;
    std::vector<ChunkStats> stats(n_chunks);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            ChunkStats s;
            const std::uint64_t end = std::min(paths, (c + 1) * kChunk);
            for (std::uint64_t i = c * kChunk; i < end; ++i) {
                const PathOut out = fn(i);
                s.sum += out.value;
                s.sumsq += out.value * out.value;
                s.tail += out.tail;
                s.ruined += out.ruined ? 1 : 0;
                s.clamped += out.clamped;
            }
            stats[c] = s;
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = static_cast<unsigned>(std::min<std::uint64_t>(hw, n_chunks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ChunkStats total;
    for (const auto& s : stats) {
        total.sum += s.sum;
        total.sumsq += s.sumsq;
        total.tail += s.tail;
        total.ruined += s.ruined;
        total.clamped += s.clamped;
    }
    SimEstimate est;
    est.n_paths = paths;
    est.seed = seed;
    est.n_ruined = total.ruined;
    est.mean = total.sum / static_cast<double>(paths);
    if (paths > 1) {
        const double var = std::max(0.0, (total.sumsq - total.sum * est.mean) /
                                             static_cast<double>(paths - 1));
        est.std_error = std::sqrt(var / static_cast<double>(paths));
    }
    est.truncation_fraction =
        static_cast<double>(paths - total.ruined) / static_cast<double>(paths);
    est.bias_bound = total.tail / static_cast<double>(paths);
    est.n_clamped = total.clamped;
    return est;
}

struct StreamOf {
    std::uint64_t stream;
    double sign;
};

StreamOf stream_of(const SimConfig& cfg, std::uint64_t i) {
    if (!cfg.antithetic) return {i, 1.0};
    return {i >> 1, (i & 1) ? -1.0 : 1.0};
}

} // namespace

SimEstimate simulate_reward(const FeedbackStrategy& strategy, const ModelParams& p,
                            const SimConfig& cfg) {
    validate(p);
    const RunPlan pl = plan(p, cfg);
    const double fd = std::exp(-p.delta * cfg.dt);
    const double fb = std::exp(-p.beta * cfg.dt);
    const double wd = (1.0 - fd) / p.delta;  // exact step integral of e^{-delta s}
    const double sq = p.sigma * std::sqrt(cfg.dt);
    const double lod = p.lmax / p.delta;

    auto path = [&](std::uint64_t i) -> PathOut {
        const auto st = stream_of(cfg, i);
        PathRng rng(cfg.seed, st.stream);
        PathOut out;
        double x = cfg.x0;
        if (x <= 0.0) {
            out.ruined = true;
            out.value = p.lambda * (1.0 - p.alpha);
            return out;
        }
        double disc_d = 1.0, disc_b = 1.0, divs = 0.0, t = cfg.t0;
        for (std::uint64_t k = 0; k < pl.n_steps; ++k) {
            double l = strategy.rate(t, x);
            if (l < 0.0) {
                l = 0.0;
                ++out.clamped;
            } else if (l > p.lmax) {
                l = p.lmax;
                ++out.clamped;
            }
            divs += disc_d * wd * l;
            x += (p.mu - l) * cfg.dt + sq * (st.sign * rng.normal());
            disc_d *= fd;
            disc_b *= fb;
            t += cfg.dt;
            if (x <= 0.0) {
                out.ruined = true;
                const double pen = p.beta > 0.0 ? disc_b : 1.0;
                out.value = divs + p.lambda * (pen - p.alpha);
                return out;
            }
        }
        out.value = divs - p.lambda * p.alpha;  // e^{-beta tau} tail not yet accrued
        out.tail = lod * disc_d + (p.beta > 0.0 ? -p.lambda * disc_b : -p.lambda);
        return out;
    };
    return run_scalar(cfg.paths, cfg.seed, path);
}

SimEstimate simulate_laplace(double b, const ModelParams& p, const SimConfig& cfg) {
    validate(p);
    if (!(p.beta > 0.0)) throw validation_error("simulate_laplace requires beta > 0");
    if (!(b >= 0.0) || !std::isfinite(b)) throw validation_error("b must be finite and >= 0");
    const RunPlan pl = plan(p, cfg);
    const double fb = std::exp(-p.beta * cfg.dt);
    const double sq = p.sigma * std::sqrt(cfg.dt);
    const double up = (p.mu - p.lmax) * cfg.dt;
    const double down = p.mu * cfg.dt;

    auto path = [&](std::uint64_t i) -> PathOut {
        const auto st = stream_of(cfg, i);
        PathRng rng(cfg.seed, st.stream);
        PathOut out;
        double x = cfg.x0;
        if (x <= 0.0) {
            out.ruined = true;
            out.value = 1.0;
            return out;
        }
        double disc_b = 1.0;
        for (std::uint64_t k = 0; k < pl.n_steps; ++k) {
            x += (x >= b ? up : down) + sq * (st.sign * rng.normal());
            disc_b *= fb;
            if (x <= 0.0) {
                out.ruined = true;
                out.value = disc_b;
                return out;
            }
        }
        out.tail = disc_b;  // alive paths would add at most e^{-beta (T - t0)}
        return out;
    };
    return run_scalar(cfg.paths, cfg.seed, path);
}

SimEstimate simulate_ruin_probability(double l_const, const ModelParams& p,
                                      const SimConfig& cfg) {
    validate(p);
    if (!(p.mu - l_const > 0.0))
        throw validation_error("simulate_ruin_probability requires mu - l > 0");
    const RunPlan pl = plan(p, cfg);
    const double drift = (p.mu - l_const) * cfg.dt;
    const double sq = p.sigma * std::sqrt(cfg.dt);

    auto path = [&](std::uint64_t i) -> PathOut {
        const auto st = stream_of(cfg, i);
        PathRng rng(cfg.seed, st.stream);
        PathOut out;
        double x = cfg.x0;
        if (x <= 0.0) {
            out.ruined = true;
            out.value = 1.0;
            return out;
        }
        for (std::uint64_t k = 0; k < pl.n_steps; ++k) {
            x += drift + sq * (st.sign * rng.normal());
            if (x <= 0.0) {
                out.ruined = true;
                out.value = 1.0;
                return out;
            }
        }
        // Remaining ruin mass from the terminal state, by the Markov property.
        out.tail = ruin_probability(x, l_const, p.mu, p.sigma);
        return out;
    };
    return run_scalar(cfg.paths, cfg.seed, path);
}

SimEstimate perturbation_test(double x0, double h, const FeedbackStrategy& deviation,
                              const ModelParams& p, const CharRoots& roots,
                              const SimConfig& cfg_in) {
    validate(p);
    if (!(h > 0.0)) throw validation_error("perturbation window h must be > 0");
    SimConfig cfg = cfg_in;
    cfg.x0 = x0;
    const RunPlan pl = plan(p, cfg);
    const double b_star = solve_threshold(p, roots).b_star;
    const double fd = std::exp(-p.delta * cfg.dt);
    const double fb = std::exp(-p.beta * cfg.dt);
    const double wd = (1.0 - fd) / p.delta;
    const double sq = p.sigma * std::sqrt(cfg.dt);
    const double t_switch = cfg.t0 + h;

    struct State {
        double x, divs;
        bool alive;
        double value;
    };

    auto payout_hat = [&](double x) { return x >= b_star ? p.lmax : 0.0; };

    auto path = [&](std::uint64_t i) -> PathOut {
        const auto st = stream_of(cfg, i);
        PathRng rng(cfg.seed, st.stream);
        PathOut out;
        State a{cfg.x0, 0.0, cfg.x0 > 0.0, 0.0};    // equilibrium law
        State dvt{cfg.x0, 0.0, cfg.x0 > 0.0, 0.0};  // deviation on [t0, t0+h)
        const double ruined_now = p.lambda * (1.0 - p.alpha);
        if (!a.alive) a.value = ruined_now;
        if (!dvt.alive) dvt.value = ruined_now;
        double disc_d = 1.0, disc_b = 1.0, t = cfg.t0;
        for (std::uint64_t k = 0; k < pl.n_steps && (a.alive || dvt.alive); ++k) {
            const double z = st.sign * rng.normal();
            const double shock = sq * z;
            double la = 0.0, ld = 0.0;
            if (a.alive) {
                la = payout_hat(a.x);
                a.divs += disc_d * wd * la;
            }
            if (dvt.alive) {
                ld = t < t_switch ? std::clamp(deviation.rate(t, dvt.x), 0.0, p.lmax)
                                  : payout_hat(dvt.x);
                dvt.divs += disc_d * wd * ld;
            }
            disc_d *= fd;
            disc_b *= fb;
            t += cfg.dt;
            if (a.alive) {
                a.x += (p.mu - la) * cfg.dt + shock;
                if (a.x <= 0.0) {
                    a.alive = false;
                    a.value = a.divs + p.lambda * ((p.beta > 0.0 ? disc_b : 1.0) - p.alpha);
                }
            }
            if (dvt.alive) {
                dvt.x += (p.mu - ld) * cfg.dt + shock;
                if (dvt.x <= 0.0) {
                    dvt.alive = false;
                    dvt.value = dvt.divs + p.lambda * ((p.beta > 0.0 ? disc_b : 1.0) - p.alpha);
                }
            }
        }
        double tail = 0.0;
        if (a.alive) {
            a.value = a.divs - p.lambda * p.alpha;
            tail += 1.0;
        }
        if (dvt.alive) {
            dvt.value = dvt.divs - p.lambda * p.alpha;
            tail += 1.0;
        }
        out.value = (a.value - dvt.value) / h;
        out.ruined = !a.alive;
        out.tail = tail > 0.0 ? 1.0 : 0.0;  // marks paths with any truncated component
        return out;
    };
    SimEstimate est = run_scalar(cfg.paths, cfg.seed, path);
    // For paired paths the truncation largely cancels; keep the fraction as
    // the recorded diagnostic rather than a (vacuous) worst-case bound.
    est.truncation_fraction = est.bias_bound;
    est.bias_bound = 0.0;
    return est;
}

std::vector<SimEstimate> martingale_check(double x0, const ModelParams& p,
                                          const CharRoots& roots, double alpha,
                                          const std::vector<double>& checkpoints,
                                          const SimConfig& cfg_in) {
    validate(p);
    if (checkpoints.empty()) throw validation_error("martingale_check needs checkpoints");
    for (double t : checkpoints)
        if (!(t >= 0.0) || !std::isfinite(t))
            throw validation_error("checkpoints must be finite and >= 0");
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
        throw validation_error("checkpoints must be sorted ascending");

    const ConstraintMatch match = match_constraint(x0, p, alpha);
    const double b_star = match.b_star;
    ModelParams pm = p;
    pm.lambda = match.lambda_star;
    pm.alpha = alpha;

    SimConfig cfg = cfg_in;
    cfg.x0 = x0;
    cfg.horizon = cfg.t0 + checkpoints.back() + cfg.dt;
    const RunPlan pl = plan(pm, cfg);
    const double fb = std::exp(-p.beta * cfg.dt);
    const double sq = p.sigma * std::sqrt(cfg.dt);
    const double up = (p.mu - p.lmax) * cfg.dt;
    const double down = p.mu * cfg.dt;

    std::vector<std::uint64_t> step_of;
    for (double t : checkpoints)
        step_of.push_back(static_cast<std::uint64_t>(std::llround(t / cfg.dt)));

    const std::size_t n_ck = checkpoints.size();
    const std::uint64_t n_chunks = (cfg.paths + kChunk - 1) / kChunk;
    struct CkStats {
        std::vector<double> sum, sumsq;
        std::uint64_t ruined = 0;
    };
    std::vector<CkStats> stats(n_chunks);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            CkStats s;
            s.sum.assign(n_ck, 0.0);
            s.sumsq.assign(n_ck, 0.0);
            const std::uint64_t end = std::min(cfg.paths, (c + 1) * kChunk);
            for (std::uint64_t i = c * kChunk; i < end; ++i) {
                const auto st = stream_of(cfg, i);
                PathRng rng(cfg.seed, st.stream);
                double x = cfg.x0;
                double disc_b = 1.0;
                bool ruined = x <= 0.0;
                double frozen = ruined ? 1.0 : 0.0;  // e^{-beta tau} w(0,.) = disc at ruin
                std::size_t ck = 0;
                for (std::uint64_t k = 0; ck < n_ck; ++k) {
                    while (ck < n_ck && step_of[ck] == k) {
                        const double v = ruined ? frozen
                                                : disc_b * laplace_w(x, b_star, pm, roots);
                        s.sum[ck] += v;
                        s.sumsq[ck] += v * v;
                        ++ck;
                    }
                    if (ck >= n_ck || k >= pl.n_steps) break;
                    if (!ruined) {
                        x += (x >= b_star ? up : down) + sq * (st.sign * rng.normal());
                        disc_b *= fb;
                        if (x <= 0.0) {
                            ruined = true;
                            frozen = disc_b;
                        }
                    } else {
                        disc_b *= fb;
                    }
                }
                if (ruined) ++s.ruined;
            }
            stats[c] = std::move(s);
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = static_cast<unsigned>(std::min<std::uint64_t>(hw, n_chunks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<SimEstimate> result(n_ck);
    std::vector<double> sum(n_ck, 0.0), sumsq(n_ck, 0.0);
    std::uint64_t ruined = 0;
    for (const auto& s : stats) {
        for (std::size_t j = 0; j < n_ck; ++j) {
            sum[j] += s.sum[j];
            sumsq[j] += s.sumsq[j];
        }
        ruined += s.ruined;
    }
    for (std::size_t j = 0; j < n_ck; ++j) {
        SimEstimate& e = result[j];
        e.n_paths = cfg.paths;
        e.seed = cfg.seed;
        e.n_ruined = ruined;
        e.mean = sum[j] / static_cast<double>(cfg.paths);
        if (cfg.paths > 1) {
            const double var = std::max(
                0.0, (sumsq[j] - sum[j] * e.mean) / static_cast<double>(cfg.paths - 1));
            e.std_error = std::sqrt(var / static_cast<double>(cfg.paths));
        }
        e.truncation_fraction =
            static_cast<double>(cfg.paths - ruined) / static_cast<double>(cfg.paths);
    }
    return result;
}

} // namespace eqdiv
