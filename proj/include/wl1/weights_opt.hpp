/**
 * @file weights_opt.hpp
 * @brief Optimal per-block weights.
 *
 * The expected squared distance of a Gaussian vector to the scaled
 * subdifferential, written in v = tau * omega, separates over blocks:
 *
 *   f(v) = sigma + sum_i rho_i (alpha_i v_i^2 + (1 - alpha_i) phi(v_i)).
 *
 * Each summand is strictly convex, so the minimizer solves the k independent
 * stationarity equations
 *
 *   alpha_i v_i = (1 - alpha_i) sqrt(2/pi) int_{v_i}^inf (x - v_i) exp(-x^2/2) dx,
 *
 * none of which involve rho.
 */
#pragma once

#include <span>
#include <string>
#include <vector>

#include "wl1/gaussian_kernels.hpp"
#include "wl1/model.hpp"
#include "wl1/roots.hpp"

namespace wl1 {

/// Left side minus right side of the stationarity equation; increasing in omega.
inline double weight_equation_residual(double alpha, double omega) {
    return alpha * omega - (1.0 - alpha) * first_tail_moment(omega);
}

inline double optimal_weight_single(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw ValidationError("optimal_weight_single: alpha = " + std::to_string(alpha) + " outside (0, 1]");
    if (alpha == 1.0) return 0.0;
    auto f = [alpha](double w) { return weight_equation_residual(alpha, w); };
    const Bracket b = grow_bracket(f, 0.0, 1.0);
    return bisect_increasing(f, b, 1e-12);
}

struct OptimalWeights {
    Weights raw;
    Weights normalized;
    std::vector<double> residuals;
};

inline OptimalWeights optimal_weights(const PartitionModel& model) {
    OptimalWeights out;
    const std::size_t k = model.num_blocks();
    out.raw.omega.resize(k);
    out.residuals.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double a = model.alpha()[i];
        out.raw.omega[i] = optimal_weight_single(a);
        out.residuals[i] = weight_equation_residual(a, out.raw.omega[i]);
    }
    // sigma < 1 guarantees some alpha_i < 1, hence a positive root.
    out.normalized = out.raw.normalized();
    return out;
}

/// f(v) above; v >= 0 componentwise.
inline double eval_weight_objective(const PartitionModel& model, std::span<const double> v) {
    if (v.size() != model.num_blocks())
        throw ValidationError("eval_weight_objective: expected " + std::to_string(model.num_blocks()) +
                              " components");
    double acc = model.sigma();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0)) throw std::domain_error("eval_weight_objective: components must be >= 0");
        const double a = model.alpha()[i];
        acc += model.rho()[i] * (a * v[i] * v[i] + (1.0 - a) * phi(v[i]));
    }
    return acc;
}

/// Partial derivative of f with respect to v_i.
inline double weight_objective_partial(const PartitionModel& model, std::span<const double> v, std::size_t i) {
    const double a = model.alpha()[i];
    return model.rho()[i] * (2.0 * a * v[i] + (1.0 - a) * phi_prime(v[i]));
}

}  // namespace wl1
