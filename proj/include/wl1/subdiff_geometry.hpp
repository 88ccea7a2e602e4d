/**
 * @file subdiff_geometry.hpp
 * @brief Distance to the scaled subdifferential of the weighted l1 norm,
 * its Monte Carlo expectation, and the weighted dual norm.
 *
 * The subdifferential of ||x||_{1,w} at x0 with support T is
 *   { p : p_j = w_j sgn(x0_j) on T,  |p_j| <= w_j off T },
 * so the squared distance of g to tau times that set decouples per coordinate.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "wl1/gaussian_kernels.hpp"
#include "wl1/model.hpp"
#include "wl1/seeding.hpp"

namespace wl1 {

struct DistanceSample {
    double value = 0.0;
    Eigen::VectorXd contributions;  ///< per coordinate, non-negative
};

/// Full per-coordinate breakdown of dist^2(g, tau * subdiff ||.||_{1,w}(x0)).
inline DistanceSample distance_breakdown(const Eigen::Ref<const Eigen::VectorXd>& g, const SupportInstance& inst,
                                         const Eigen::Ref<const Eigen::VectorXd>& w, double tau) {
    const auto d = static_cast<Eigen::Index>(inst.dimension);
    if (g.size() != d || w.size() != d) throw std::invalid_argument("dist_sq: dimension mismatch");
    if (!(tau >= 0.0)) throw std::domain_error("dist_sq: tau must be >= 0");
    DistanceSample out;
    out.contributions.resize(d);
    const Eigen::VectorXd sgn = inst.sign_vector();
    for (Eigen::Index j = 0; j < d; ++j) {
        const double r = sgn[j] != 0.0 ? g[j] - sgn[j] * w[j] * tau : pos(std::abs(g[j]) - w[j] * tau);
        out.contributions[j] = r * r;
    }
    out.value = out.contributions.sum();
    return out;
}

inline double dist_sq_to_scaled_subdiff(const Eigen::Ref<const Eigen::VectorXd>& g, const SupportInstance& inst,
                                        const Eigen::Ref<const Eigen::VectorXd>& w, double tau) {
    return distance_breakdown(g, inst, w, tau).value;
}

/// Running mean / variance; merge() is Chan's pairwise update.
struct RunningStats {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    void merge(const RunningStats& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double delta = o.mean - mean;
        const double tot = na + nb;
        mean += delta * nb / tot;
        m2 += o.m2 + delta * delta * na * nb / tot;
        n += o.n;
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double standard_error() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

struct MonteCarloEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

inline constexpr std::size_t kMonteCarloChunk = 4096;

/// Sample mean and standard error of d^{-1} dist^2(g, tau * subdiff) over
/// g ~ N(0, I_d). The support instance is drawn from the model with `seed`;
/// each chunk of kMonteCarloChunk samples has its own derived seed, so the
/// result is identical for any thread count.
inline MonteCarloEstimate mc_expected_dist_sq(const PartitionModel& model, const Weights& weights, double tau,
                                              std::size_t n_samples, std::uint64_t seed, unsigned threads = 1) {
    if (n_samples < 2) throw ValidationError("mc_expected_dist_sq: need at least 2 samples");
    if (!(tau >= 0.0)) throw std::domain_error("mc_expected_dist_sq: tau must be >= 0");
    const Eigen::VectorXd w = expand(model, weights);
    const SupportInstance inst = generate_instance(model, derive_seed({seed, 0}));
    const Eigen::VectorXd sgn = inst.sign_vector();
    const auto d = static_cast<Eigen::Index>(model.dimension());
    const double inv_d = 1.0 / static_cast<double>(d);

    const std::size_t chunks = (n_samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
    std::vector<RunningStats> partial(chunks);
    auto run_chunk = [&](std::size_t c) {
        std::mt19937_64 rng(derive_seed({seed, 1, c}));
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t count = std::min(kMonteCarloChunk, n_samples - c * kMonteCarloChunk);
        RunningStats st;
        for (std::size_t s = 0; s < count; ++s) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < d; ++j) {
                const double gj = normal(rng);
                const double r = sgn[j] != 0.0 ? gj - sgn[j] * w[j] * tau : pos(std::abs(gj) - w[j] * tau);
                acc += r * r;
            }
            st.push(acc * inv_d);
        }
        partial[c] = st;
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (threads == 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t c = t; c < chunks; c += threads) run_chunk(c);
            });
    }
    RunningStats total;
    for (const auto& p : partial) total.merge(p);
    return {total.mean, total.standard_error()};
}

/// Dual of ||.||_{1,w}: max_j |p_j| / w_j. Cross-checks the value against
/// <p, v> at the extremal unit vector v = sgn(p_j) e_j / w_j.
inline double dual_norm_check(std::span<const double> p, std::span<const double> w) {
    if (p.size() != w.size()) throw std::invalid_argument("dual_norm_check: dimension mismatch");
    if (p.empty()) throw std::invalid_argument("dual_norm_check: empty input");
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (!(w[j] > 0.0)) throw std::domain_error("dual_norm_check: weights must be positive");
        const double r = std::abs(p[j]) / w[j];
        if (r > best) {
            best = r;
            arg = j;
        }
    }
    const double vj = (p[arg] < 0.0 ? -1.0 : 1.0) / w[arg];
    const double realized = p[arg] * vj;
    if (std::abs(realized - best) > 1e-12 * std::max(1.0, best))
        throw std::logic_error("dual_norm_check: extremal vector does not attain the dual norm");
    return best;
}

}  // namespace wl1
