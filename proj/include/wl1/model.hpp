/**
 * @file model.hpp
 * @brief Partition model with prior support information, per-block weights
 * and concrete random support instances.
 *
 * Blocks occupy consecutive index ranges: block i covers
 * [offset(i), offset(i) + size(i)). Since Gaussian measurement matrices are
 * invariant under column permutations, this layout loses no generality.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wl1 {

/// Thrown for every input that violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure fails to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Absolute slack allowed between alpha_i * |S_i| and the nearest integer.
inline constexpr double kSupportCountSlack = 1e-2;

class PartitionModel {
public:
    PartitionModel() = default;

    std::size_t dimension() const noexcept { return d_; }
    std::size_t num_blocks() const noexcept { return sizes_.size(); }
    const std::vector<std::size_t>& block_sizes() const noexcept { return sizes_; }
    const std::vector<std::size_t>& support_counts() const noexcept { return counts_; }
    const std::vector<double>& alpha() const noexcept { return alpha_; }
    const std::vector<double>& rho() const noexcept { return rho_; }

    std::size_t block_size(std::size_t i) const { return sizes_.at(i); }
    std::size_t support_count(std::size_t i) const { return counts_.at(i); }
    std::size_t offset(std::size_t i) const { return offsets_.at(i); }

    /// sigma = sum_i alpha_i rho_i = |T| / d
    double sigma() const noexcept { return sigma_; }
    std::size_t sparsity() const noexcept {
        return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
    }
    double min_alpha() const noexcept { return *std::min_element(alpha_.begin(), alpha_.end()); }

    /// Block index for every coordinate.
    std::vector<std::size_t> block_of() const {
        std::vector<std::size_t> out(d_);
        for (std::size_t i = 0; i < sizes_.size(); ++i)
            std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(offsets_[i]), sizes_[i], i);
        return out;
    }

    friend PartitionModel make_model_from_counts(std::size_t d, std::vector<std::size_t> block_sizes,
                                                 std::vector<std::size_t> support_counts);

private:
    std::size_t d_ = 0;
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> offsets_;
    std::vector<double> alpha_;
    std::vector<double> rho_;
    double sigma_ = 0.0;
};

/// Builds a model from exact per-block support counts |T cap S_i|.
inline PartitionModel make_model_from_counts(std::size_t d, std::vector<std::size_t> block_sizes,
                                             std::vector<std::size_t> support_counts) {
    if (d == 0) throw ValidationError("model: dimension must be positive");
    if (block_sizes.empty()) throw ValidationError("model: at least one block required");
    if (block_sizes.size() != support_counts.size())
        throw ValidationError("model: blocks and alpha must have the same length");
    std::size_t total = 0;
    for (std::size_t s : block_sizes) {
        if (s == 0) throw ValidationError("model: block sizes must be positive");
        total += s;
    }
    if (total != d)
        throw ValidationError("model: block sizes sum to " + std::to_string(total) + ", expected d = " +
                              std::to_string(d));
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
        if (support_counts[i] == 0)
            throw ValidationError("model: alpha_" + std::to_string(i + 1) + " must be > 0");
        if (support_counts[i] > block_sizes[i])
            throw ValidationError("model: alpha_" + std::to_string(i + 1) + " must be <= 1");
    }
    const std::size_t s = std::accumulate(support_counts.begin(), support_counts.end(), std::size_t{0});
    if (s >= d) throw ValidationError("model: sparsity must be < d (sigma < 1)");

    PartitionModel m;
    m.d_ = d;
    m.sizes_ = std::move(block_sizes);
    m.counts_ = std::move(support_counts);
    const std::size_t k = m.sizes_.size();
    m.offsets_.resize(k);
    m.alpha_.resize(k);
    m.rho_.resize(k);
    std::size_t off = 0;
    for (std::size_t i = 0; i < k; ++i) {
        m.offsets_[i] = off;
        off += m.sizes_[i];
        m.alpha_[i] = static_cast<double>(m.counts_[i]) / static_cast<double>(m.sizes_[i]);
        m.rho_[i] = static_cast<double>(m.sizes_[i]) / static_cast<double>(d);
    }
    m.sigma_ = static_cast<double>(s) / static_cast<double>(d);
    return m;
}

/// Builds a model from support fractions alpha_i. Each alpha_i |S_i| must lie
/// within kSupportCountSlack of an integer; alpha_i is then stored as the
/// exact ratio count / |S_i|.
inline PartitionModel make_model(std::size_t d, const std::vector<std::size_t>& block_sizes,
                                 const std::vector<double>& alpha) {
    if (block_sizes.size() != alpha.size())
        throw ValidationError("model: blocks and alpha must have the same length");
    std::vector<std::size_t> counts(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double a = alpha[i];
        if (!(a > 0.0) || a > 1.0)
            throw ValidationError("model: alpha_" + std::to_string(i + 1) + " = " + std::to_string(a) +
                                  " outside (0, 1]");
        const double c = a * static_cast<double>(block_sizes[i]);
        const double r = std::round(c);
        if (std::abs(c - r) > kSupportCountSlack)
            throw ValidationError("model: alpha_" + std::to_string(i + 1) + " * |S_" + std::to_string(i + 1) +
                                  "| = " + std::to_string(c) + " is not an integer");
        counts[i] = static_cast<std::size_t>(r);
    }
    return make_model_from_counts(d, block_sizes, std::move(counts));
}

/// Per-block weights omega in R_+^k.
struct Weights {
    std::vector<double> omega;

    std::size_t size() const noexcept { return omega.size(); }
    double max() const { return omega.empty() ? 0.0 : *std::max_element(omega.begin(), omega.end()); }
    bool all_zero() const {
        return std::all_of(omega.begin(), omega.end(), [](double w) { return w == 0.0; });
    }
    Weights scaled(double c) const {
        Weights out = *this;
        for (double& w : out.omega) w *= c;
        return out;
    }
    /// omega / max(omega); requires at least one positive entry.
    Weights normalized() const {
        const double m = max();
        if (!(m > 0.0)) throw ValidationError("weights: cannot normalize all-zero weights");
        Weights out = *this;
        for (double& w : out.omega) w /= m;
        return out;
    }
};

inline void validate_weights(const PartitionModel& model, const Weights& w) {
    if (w.size() != model.num_blocks())
        throw ValidationError("weights: expected " + std::to_string(model.num_blocks()) + " values, got " +
                              std::to_string(w.size()));
    for (double v : w.omega)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("weights: entries must be finite and >= 0");
}

/// w = sum_i omega_i 1_{S_i}
inline Eigen::VectorXd expand(const PartitionModel& model, const Weights& w) {
    validate_weights(model, w);
    Eigen::VectorXd out(static_cast<Eigen::Index>(model.dimension()));
    for (std::size_t i = 0; i < model.num_blocks(); ++i)
        out.segment(static_cast<Eigen::Index>(model.offset(i)), static_cast<Eigen::Index>(model.block_size(i)))
            .setConstant(w.omega[i]);
    return out;
}

/// Support T, signs and values of one signal x0.
struct SupportInstance {
    std::size_t dimension = 0;
    std::vector<std::size_t> support;  ///< sorted
    std::vector<int> signs;            ///< +-1, parallel to support
    std::vector<double> values;        ///< nonzero, parallel to support
    std::vector<std::size_t> block_of; ///< per coordinate

    Eigen::VectorXd signal() const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension));
        for (std::size_t j = 0; j < support.size(); ++j) x[static_cast<Eigen::Index>(support[j])] = values[j];
        return x;
    }
    /// sgn(x0) extended by zero off the support.
    Eigen::VectorXd sign_vector() const {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension));
        for (std::size_t j = 0; j < support.size(); ++j) s[static_cast<Eigen::Index>(support[j])] = signs[j];
        return s;
    }
};

/// Draws alpha_i |S_i| support indices uniformly without replacement inside
/// each block and standard-normal values on them.
inline SupportInstance generate_instance(const PartitionModel& model, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SupportInstance inst;
    inst.dimension = model.dimension();
    inst.block_of = model.block_of();
    for (std::size_t i = 0; i < model.num_blocks(); ++i) {
        const std::size_t n = model.block_size(i);
        const std::size_t c = model.support_count(i);
        // partial Fisher-Yates over the block's index range
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), model.offset(i));
        for (std::size_t j = 0; j < c; ++j) {
            std::uniform_int_distribution<std::size_t> pick(j, n - 1);
            std::swap(idx[j], idx[pick(rng)]);
        }
        inst.support.insert(inst.support.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(c));
    }
    std::sort(inst.support.begin(), inst.support.end());
    inst.values.reserve(inst.support.size());
    inst.signs.reserve(inst.support.size());
    for (std::size_t j = 0; j < inst.support.size(); ++j) {
        double v = 0.0;
        while (v == 0.0) v = normal(rng);
        inst.values.push_back(v);
        inst.signs.push_back(v > 0.0 ? 1 : -1);
    }
    return inst;
}

}  // namespace wl1
