/**
 * @file strategy.hpp
 * @brief Weighting strategies compared in recovery experiments.
 *
 * The last block of a model plays the role of the complement of the support
 * estimate. Merged strategies first pool a group of blocks into one (sizes
 * and support counts add up), then apply an inner rule on the coarser model.
 */
#pragma once

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wl1/model.hpp"
#include "wl1/weights_opt.hpp"

namespace wl1 {

enum class StrategyKind { Unit, ZeroOne, OneMinusAlpha, Optimal, Merged };

struct Strategy {
    StrategyKind kind = StrategyKind::Unit;
    /// ZeroOne: blocks set to zero (empty = every block but the last).
    /// Merged: blocks pooled into one. Zero-based.
    std::vector<std::size_t> blocks;
    /// Rule applied after merging.
    StrategyKind inner = StrategyKind::Optimal;

    static Strategy unit() { return {StrategyKind::Unit, {}, StrategyKind::Optimal}; }
    static Strategy zero_one(std::vector<std::size_t> b = {}) { return {StrategyKind::ZeroOne, std::move(b), StrategyKind::Optimal}; }
    static Strategy one_minus_alpha() { return {StrategyKind::OneMinusAlpha, {}, StrategyKind::Optimal}; }
    static Strategy optimal() { return {StrategyKind::Optimal, {}, StrategyKind::Optimal}; }
    static Strategy merged(std::vector<std::size_t> group, StrategyKind rule) {
        return {StrategyKind::Merged, std::move(group), rule};
    }

    bool operator==(const Strategy&) const = default;
};

inline std::string_view kind_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::Unit: return "unit";
        case StrategyKind::ZeroOne: return "zero-one";
        case StrategyKind::OneMinusAlpha: return "one-minus-alpha";
        case StrategyKind::Optimal: return "optimal";
        case StrategyKind::Merged: return "merged";
    }
    return "?";
}

namespace detail {
inline std::string join_one_based(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i] + 1);
    }
    return out;
}

inline std::vector<std::size_t> parse_one_based(std::string_view s) {
    std::vector<std::size_t> out;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const std::string_view tok = s.substr(0, comma);
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size() || v == 0)
            throw ValidationError("strategy: bad block index '" + std::string(tok) + "'");
        out.push_back(v - 1);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

inline StrategyKind parse_kind(std::string_view s) {
    if (s == "unit") return StrategyKind::Unit;
    if (s == "zero-one") return StrategyKind::ZeroOne;
    if (s == "one-minus-alpha") return StrategyKind::OneMinusAlpha;
    if (s == "optimal") return StrategyKind::Optimal;
    throw ValidationError("strategy: unknown rule '" + std::string(s) + "'");
}
}  // namespace detail

/// Textual form: unit | zero-one[:i,j] | one-minus-alpha | optimal |
/// merged:i,j,...:<rule>. Block indices are one-based.
inline std::string label(const Strategy& s) {
    switch (s.kind) {
        case StrategyKind::ZeroOne:
            return s.blocks.empty() ? "zero-one" : "zero-one:" + detail::join_one_based(s.blocks);
        case StrategyKind::Merged:
            return "merged:" + detail::join_one_based(s.blocks) + ":" + std::string(kind_name(s.inner));
        default:
            return std::string(kind_name(s.kind));
    }
}

inline Strategy parse_strategy(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    if (head == "merged") {
        if (colon == std::string_view::npos) throw ValidationError("strategy: merged needs a block list");
        std::string_view rest = text.substr(colon + 1);
        const auto c2 = rest.find(':');
        const auto group = detail::parse_one_based(rest.substr(0, c2));
        const StrategyKind rule =
            c2 == std::string_view::npos ? StrategyKind::Optimal : detail::parse_kind(rest.substr(c2 + 1));
        if (rule == StrategyKind::ZeroOne)
            throw ValidationError("strategy: merged zero-one is not supported; use zero-one:<blocks>");
        return Strategy::merged(group, rule);
    }
    const StrategyKind k = detail::parse_kind(head);
    if (colon != std::string_view::npos) {
        if (k != StrategyKind::ZeroOne) throw ValidationError("strategy: '" + std::string(head) + "' takes no arguments");
        return Strategy::zero_one(detail::parse_one_based(text.substr(colon + 1)));
    }
    return {k, {}, StrategyKind::Optimal};
}

/// Coarser model obtained by pooling a group of blocks. The pooled block
/// takes the position of the group's first member.
struct MergedModel {
    PartitionModel model;
    std::vector<std::size_t> block_map;  ///< original block -> merged block
};

inline MergedModel merge_blocks(const PartitionModel& model, const std::vector<std::size_t>& group) {
    if (group.empty()) throw ValidationError("merge: empty block group");
    const std::set<std::size_t> members(group.begin(), group.end());
    if (members.size() != group.size()) throw ValidationError("merge: duplicate block index");
    if (*members.rbegin() >= model.num_blocks()) throw ValidationError("merge: block index out of range");

    const std::size_t first = *members.begin();
    MergedModel out;
    out.block_map.resize(model.num_blocks());
    std::vector<std::size_t> sizes, counts;
    std::size_t pooled = 0;
    for (std::size_t i = 0; i < model.num_blocks(); ++i) {
        if (members.count(i) && i != first) continue;
        if (i == first) pooled = sizes.size();
        out.block_map[i] = sizes.size();
        sizes.push_back(0);
        counts.push_back(0);
        if (!members.count(i)) {
            sizes.back() = model.block_size(i);
            counts.back() = model.support_count(i);
        }
    }
    for (std::size_t i : members) {
        out.block_map[i] = pooled;
        sizes[pooled] += model.block_size(i);
        counts[pooled] += model.support_count(i);
    }
    out.model = make_model_from_counts(model.dimension(), std::move(sizes), std::move(counts));
    return out;
}

namespace detail {
inline Weights apply_rule(const PartitionModel& model, StrategyKind rule, const std::vector<std::size_t>& zeroed) {
    const std::size_t k = model.num_blocks();
    Weights w{std::vector<double>(k, 1.0)};
    switch (rule) {
        case StrategyKind::Unit: break;
        case StrategyKind::ZeroOne:
            if (zeroed.empty()) {
                for (std::size_t i = 0; i + 1 < k; ++i) w.omega[i] = 0.0;
            } else {
                for (std::size_t i : zeroed) {
                    if (i >= k) throw ValidationError("strategy: zero-one block index out of range");
                    w.omega[i] = 0.0;
                }
            }
            break;
        case StrategyKind::OneMinusAlpha:
            for (std::size_t i = 0; i + 1 < k; ++i) w.omega[i] = 1.0 - model.alpha()[i];
            break;
        case StrategyKind::Optimal: w = optimal_weights(model).normalized; break;
        case StrategyKind::Merged: throw ValidationError("strategy: nested merge");
    }
    return w;
}
}  // namespace detail

/// Parameters the strategy's weights live on: the model itself, or the
/// pooled model for merged strategies.
inline PartitionModel effective_model(const PartitionModel& model, const Strategy& s) {
    return s.kind == StrategyKind::Merged ? merge_blocks(model, s.blocks).model : model;
}

/// Weights over the blocks of effective_model(model, s).
inline Weights weights_for_strategy(const PartitionModel& model, const Strategy& s) {
    if (s.kind == StrategyKind::Merged) {
        const MergedModel mm = merge_blocks(model, s.blocks);
        return detail::apply_rule(mm.model, s.inner, {});
    }
    return detail::apply_rule(model, s.kind, s.blocks);
}

/// Weights over the original blocks of model (pooled blocks share a value).
inline Weights block_weights(const PartitionModel& model, const Strategy& s) {
    if (s.kind != StrategyKind::Merged) return weights_for_strategy(model, s);
    const MergedModel mm = merge_blocks(model, s.blocks);
    const Weights coarse = detail::apply_rule(mm.model, s.inner, {});
    Weights out{std::vector<double>(model.num_blocks())};
    for (std::size_t i = 0; i < model.num_blocks(); ++i) out.omega[i] = coarse.omega[mm.block_map[i]];
    return out;
}

}  // namespace wl1
