/**
 * @file thresholds.hpp
 * @brief Threshold objective J(tau), its minimization, the unweighted
 * threshold mu(s, d), statistical-dimension bounds and the block synthesis
 * identity.
 *
 * All thresholds are normalized by d. Multiply by d for a measurement count.
 *
 *   J(tau) = sigma + sum_i rho_i (alpha_i (omega_i tau)^2 + (1 - alpha_i) phi(omega_i tau))
 *
 * equals d^{-1} E dist^2(g, tau * subdiff ||.||_{1,w}(x0)) for g ~ N(0, I_d)
 * and is convex in tau.
 */
#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "wl1/gaussian_kernels.hpp"
#include "wl1/model.hpp"
#include "wl1/roots.hpp"
#include "wl1/weights_opt.hpp"

namespace wl1 {

struct DeltaBounds {
    double lower_tight;  ///< m_tilde - (2/d) sqrt(1/min alpha)
    double lower_loose;  ///< m_tilde - 2/sqrt(d)
    double upper;        ///< m_tilde
};

struct ThresholdResult {
    double tau_star = 0.0;
    double m_tilde = 0.0;
    double derivative_at_min = 0.0;
    DeltaBounds bounds{};
};

inline double eval_J(const PartitionModel& model, const Weights& w, double tau) {
    validate_weights(model, w);
    if (!(tau >= 0.0)) throw std::domain_error("eval_J: tau must be >= 0");
    double acc = model.sigma();
    for (std::size_t i = 0; i < model.num_blocks(); ++i) {
        const double a = model.alpha()[i];
        const double v = w.omega[i] * tau;
        acc += model.rho()[i] * (a * v * v + (1.0 - a) * phi(v));
    }
    return acc;
}

inline double eval_J_derivative(const PartitionModel& model, const Weights& w, double tau) {
    double acc = 0.0;
    for (std::size_t i = 0; i < model.num_blocks(); ++i) {
        const double a = model.alpha()[i];
        const double om = w.omega[i];
        const double v = om * tau;
        acc += model.rho()[i] * om * (2.0 * a * v + (1.0 - a) * phi_prime(v));
    }
    return acc;
}

inline DeltaBounds delta_bounds(const PartitionModel& model, double m_tilde) {
    const double d = static_cast<double>(model.dimension());
    return {m_tilde - (2.0 / d) * std::sqrt(1.0 / model.min_alpha()), m_tilde - 2.0 / std::sqrt(d), m_tilde};
}

/// inf_{tau > 0} J(tau), located as the root of dJ/dtau by bisection.
inline ThresholdResult minimize_J(const PartitionModel& model, const Weights& w) {
    validate_weights(model, w);
    if (w.all_zero()) throw ValidationError("minimize_J: all weights are zero, the program is degenerate");

    constexpr double kTauFloor = 1e-8;
    auto dJ = [&](double t) { return eval_J_derivative(model, w, t); };
    ThresholdResult r;
    if (dJ(kTauFloor) >= 0.0) {
        // J nondecreasing from the origin: every weighted block lies in the support.
        r.tau_star = kTauFloor;
    } else {
        const Bracket b = grow_bracket(dJ, kTauFloor, 1.0 / w.max());
        r.tau_star = bisect_increasing(dJ, b, 1e-12);
    }
    r.m_tilde = eval_J(model, w, r.tau_star);
    r.derivative_at_min = dJ(r.tau_star);
    r.bounds = delta_bounds(model, r.m_tilde);
    return r;
}

/// Normalized threshold for plain basis pursuit recovering s-sparse vectors in R^d.
inline double mu(std::size_t s, std::size_t d) {
    if (s >= d) throw std::domain_error("mu: requires s < d (s = " + std::to_string(s) + ", d = " + std::to_string(d) + ")");
    if (s == 0) return 0.0;
    return minimize_J(make_model_from_counts(d, {d}, {s}), Weights{{1.0}}).m_tilde;
}

/// sum_i rho_i mu(alpha_i |S_i|, |S_i|). A block lying entirely inside the
/// support contributes rho_i (the limit mu(s, s) = 1).
inline double synthesis_threshold(const PartitionModel& model) {
    double acc = 0.0;
    for (std::size_t i = 0; i < model.num_blocks(); ++i) {
        const std::size_t n = model.block_size(i);
        const std::size_t c = model.support_count(i);
        acc += model.rho()[i] * (c == n ? 1.0 : mu(c, n));
    }
    return acc;
}

/// Absolute half-width sqrt(8 log(4/eta)) sqrt(d) of the transition region
/// at failure probability eta.
inline double phase_window(std::size_t d, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("phase_window: eta must lie in (0, 1)");
    return std::sqrt(8.0 * std::log(4.0 / eta)) * std::sqrt(static_cast<double>(d));
}

}  // namespace wl1
