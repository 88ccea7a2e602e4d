/**
 * @file experiments.hpp
 * @brief Seeded Monte Carlo phase-transition experiments for weighted basis
 * pursuit with Gaussian measurements.
 *
 * Every trial derives its own seed from (master_seed, strategy index, m,
 * trial index), so tallies do not depend on the number of worker threads or
 * the order trials run in.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "wl1/model.hpp"
#include "wl1/seeding.hpp"
#include "wl1/solver.hpp"
#include "wl1/strategy.hpp"
#include "wl1/thresholds.hpp"

namespace wl1 {

struct ExperimentConfig {
    PartitionModel model;
    std::vector<Strategy> strategies;
    std::vector<std::size_t> m_values;
    std::size_t trials_per_m = 200;
    std::uint64_t master_seed = 0;
    double success_threshold = 1e-3;
    unsigned threads = 1;
};

inline void validate_config(const ExperimentConfig& c) {
    if (c.strategies.empty()) throw ValidationError("experiment: no strategies given");
    if (c.m_values.empty()) throw ValidationError("experiment: no measurement counts given");
    if (c.trials_per_m == 0) throw ValidationError("experiment: trials_per_m must be >= 1");
    if (!(c.success_threshold >= 0.0)) throw ValidationError("experiment: success_threshold must be >= 0");
    for (std::size_t m : c.m_values)
        if (m < 1 || m > c.model.dimension())
            throw ValidationError("experiment: m = " + std::to_string(m) + " outside [1, d]");
    for (const Strategy& s : c.strategies)
        if (block_weights(c.model, s).all_zero()) throw ValidationError("experiment: strategy '" + label(s) + "' has all-zero weights");
}

struct TrialOutcome {
    bool success = false;
    bool solver_failed = false;
    double error = 0.0;  ///< ||x_hat - x0||_2
};

inline std::uint64_t trial_seed(const ExperimentConfig& c, std::size_t strategy_index, std::size_t m,
                                std::size_t trial_index) {
    return derive_seed({c.master_seed, strategy_index, m, trial_index});
}

/// Draws x0 and a Gaussian A, solves weighted basis pursuit with b = A x0 and
/// compares the minimizer to x0.
inline TrialOutcome run_trial_detailed(const ExperimentConfig& c, std::size_t strategy_index, std::size_t m,
                                       std::size_t trial_index) {
    const std::uint64_t seed = trial_seed(c, strategy_index, m, trial_index);
    const SupportInstance inst = generate_instance(c.model, derive_seed({seed, 1}));
    const auto d = static_cast<Eigen::Index>(c.model.dimension());

    std::mt19937_64 rng(derive_seed({seed, 2}));
    std::normal_distribution<double> normal(0.0, 1.0);
    BPProblem p;
    p.A.resize(static_cast<Eigen::Index>(m), d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < p.A.rows(); ++i) p.A(i, j) = normal(rng);
    const Eigen::VectorXd x0 = inst.signal();
    p.b = p.A * x0;
    p.w = expand(c.model, block_weights(c.model, c.strategies.at(strategy_index)));

    const BPSolution sol = weighted_bp(p);
    TrialOutcome out;
    if (!sol.solved()) {
        out.solver_failed = true;
        return out;
    }
    out.error = (sol.x_hat - x0).norm();
    out.success = success(sol.x_hat, x0, c.success_threshold);
    return out;
}

inline bool run_trial(const ExperimentConfig& c, std::size_t strategy_index, std::size_t m, std::size_t trial_index) {
    return run_trial_detailed(c, strategy_index, m, trial_index).success;
}

struct PhasePoint {
    std::size_t strategy_index = 0;
    std::size_t m = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::size_t solver_failures = 0;

    double rate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
    /// 3 sqrt(p (1 - p) / n)
    double halfwidth3() const {
        const double p = rate();
        return trials ? 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
    }
    double standard_error() const { return halfwidth3() / 3.0; }
};

struct PhaseCurve {
    std::vector<std::string> labels;
    std::vector<double> predicted_threshold;  ///< d * m_tilde per strategy
    std::vector<PhasePoint> points;           ///< strategy-major, m in config order

    const PhasePoint* find(std::size_t strategy_index, std::size_t m) const {
        for (const auto& p : points)
            if (p.strategy_index == strategy_index && p.m == m) return &p;
        return nullptr;
    }
    std::vector<PhasePoint> series(std::size_t strategy_index) const {
        std::vector<PhasePoint> out;
        for (const auto& p : points)
            if (p.strategy_index == strategy_index) out.push_back(p);
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.m < b.m; });
        return out;
    }
};

inline double predicted_threshold(const PartitionModel& model, const Strategy& s) {
    return minimize_J(model, block_weights(model, s)).m_tilde * static_cast<double>(model.dimension());
}

inline PhaseCurve run_phase_curve(const ExperimentConfig& c) {
    validate_config(c);
    PhaseCurve curve;
    const std::size_t S = c.strategies.size();
    const std::size_t M = c.m_values.size();
    const std::size_t T = c.trials_per_m;
    for (const Strategy& s : c.strategies) {
        curve.labels.push_back(label(s));
        curve.predicted_threshold.push_back(predicted_threshold(c.model, s));
    }

    const std::size_t total = S * M * T;
    std::vector<std::uint8_t> outcome(total, 0);  // bit 0 success, bit 1 solver failure
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next.fetch_add(1); t < total; t = next.fetch_add(1)) {
            const std::size_t si = t / (M * T);
            const std::size_t mi = (t / T) % M;
            const TrialOutcome r = run_trial_detailed(c, si, c.m_values[mi], t % T);
            outcome[t] = static_cast<std::uint8_t>((r.success ? 1 : 0) | (r.solver_failed ? 2 : 0));
        }
    };
    const unsigned n_threads = std::max(1u, c.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }

    for (std::size_t si = 0; si < S; ++si)
        for (std::size_t mi = 0; mi < M; ++mi) {
            PhasePoint p{si, c.m_values[mi], T, 0, 0};
            for (std::size_t t = 0; t < T; ++t) {
                const std::uint8_t o = outcome[(si * M + mi) * T + t];
                p.successes += o & 1;
                p.solver_failures += (o >> 1) & 1;
            }
            curve.points.push_back(p);
        }
    return curve;
}

/// First m at which the success rate reaches 1/2, linearly interpolated
/// between neighbouring measured counts. Empty if the rate never gets there.
inline std::optional<double> empirical_crossing(const PhaseCurve& curve, std::size_t strategy_index) {
    const auto s = curve.series(strategy_index);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].rate() < 0.5) continue;
        if (i == 0) return static_cast<double>(s[0].m);
        const double r0 = s[i - 1].rate(), r1 = s[i].rate();
        const double m0 = static_cast<double>(s[i - 1].m), m1 = static_cast<double>(s[i].m);
        return m0 + (0.5 - r0) / (r1 - r0) * (m1 - m0);
    }
    return std::nullopt;
}

/// CSV with header strategy,m,trials,successes,rate,halfwidth3,predicted_threshold.
inline void write_csv(std::ostream& os, const PhaseCurve& curve) {
    os << "strategy,m,trials,successes,rate,halfwidth3,predicted_threshold\n";
    const auto flags = os.flags();
    os << std::fixed << std::setprecision(6);
    for (const auto& p : curve.points) {
        const std::string& name = curve.labels[p.strategy_index];
        if (name.find(',') != std::string::npos)
            os << '"' << name << '"';
        else
            os << name;
        os << ',' << p.m << ',' << p.trials << ',' << p.successes << ','
           << p.rate() << ',' << p.halfwidth3() << ',' << curve.predicted_threshold[p.strategy_index] << '\n';
    }
    os.flags(flags);
}

}  // namespace wl1
