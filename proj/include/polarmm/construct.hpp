#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "polarmm/codec.hpp"
#include "polarmm/common.hpp"
#include "polarmm/density.hpp"
#include "polarmm/parallel.hpp"

namespace polarmm {

// One per-index reliability figure: an exact value (stderr 0) or a Monte
// Carlo mean with its standard error. clamped counts samples that hit the
// log floor, a sign the index may have diverging mismatched information.
struct IndexEstimate {
    double value = 0;  // bits; may be -infinity for exact records
    double stderr_ = 0;
    std::uint64_t clamped = 0;
};

struct Selection {
    enum class Mode { threshold, top_k };

    Mode mode = Mode::threshold;
    double eps = 0;
    std::size_t k = 0;

    static Selection threshold(double eps) { return {Mode::threshold, eps, 0}; }
    static Selection top_k(std::size_t k) { return {Mode::top_k, 0, k}; }
};

struct SourceInfo {
    enum class Kind { exact, monte_carlo };

    Kind kind = Kind::exact;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

// Chosen indices (1-based, sorted) together with the per-index figures and
// the recipe that produced them.
struct InformationSet {
    int levels = 0;
    std::vector<std::uint32_t> indices;
    std::vector<IndexEstimate> per_index;  // all 2^levels entries
    Selection selection;
    SourceInfo source;

    std::size_t block_length() const { return static_cast<std::size_t>(1) << levels; }
};

// Monte Carlo log floor: samples of log2(1 + (-1)^u * delta) below -40 bits
// contribute -40 and are flagged, keeping estimates finite while signalling
// possibly diverging indices.
inline constexpr double kMcLogFloorBits = 40.0;

// Per-index mean and standard error of log2(1 + (-1)^{u_i} * delta_i) over
// genie-aided trials; by the posterior-difference representation of
// mismatched information this estimates I(W_N^(i), V_N^(i)) unbiasedly.
inline std::vector<IndexEstimate> estimate_indices_mc(const Bdmc& w, const Bdmc& v, int levels,
                                                      std::uint64_t trials, std::uint64_t seed) {
    if (trials < 100) throw UsageError("Monte Carlo construction needs at least 100 trials");
    const std::size_t n = static_cast<std::size_t>(1) << levels;
    const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<double> block_sum(blocks * n, 0.0);
    std::vector<double> block_sq(blocks * n, 0.0);
    std::vector<std::uint64_t> block_clamped(blocks * n, 0);
    const double floor_arg = std::exp2(-kMcLogFloorBits);
    detail::genie_trials(
        w, v, levels, trials, seed,
        [&](std::uint64_t t, const std::vector<std::uint8_t>& u, const std::vector<double>& deltas) {
            const std::size_t blk = t / kTrialBlock;
            double* sum = &block_sum[blk * n];
            double* sq = &block_sq[blk * n];
            std::uint64_t* cl = &block_clamped[blk * n];
            for (std::size_t i = 0; i < n; ++i) {
                double arg = u[i] ? 1.0 - deltas[i] : 1.0 + deltas[i];
                double s;
                if (arg < floor_arg) {
                    s = -kMcLogFloorBits;
                    ++cl[i];
                } else {
                    s = std::log2(arg);
                }
                sum[i] += s;
                sq[i] += s * s;
            }
        });
    std::vector<IndexEstimate> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0, sq = 0;
        std::uint64_t clamped = 0;
        for (std::size_t b = 0; b < blocks; ++b) {
            sum += block_sum[b * n + i];
            sq += block_sq[b * n + i];
            clamped += block_clamped[b * n + i];
        }
        const double t = static_cast<double>(trials);
        double mean = sum / t;
        double var = std::max(0.0, (sq - sum * sum / t) / (t - 1.0));
        out[i] = {mean, std::sqrt(var / t), clamped};
    }
    return out;
}

// Exact per-index figures from full density evolution.
inline std::vector<IndexEstimate> exact_indices(const ChannelPair& pair, int levels,
                                                const MergePolicy& policy) {
    EvolveResult ev = evolve_all(pair, levels, policy);
    std::vector<IndexEstimate> out(ev.records.size());
    for (std::size_t i = 0; i < ev.records.size(); ++i) out[i] = {ev.records[i].info_wv, 0.0, 0};
    return out;
}

// Threshold mode returns exactly {i : value_i >= 1 - eps}; top-k returns the
// k largest values with ties broken toward the smaller index.
inline InformationSet select_info_set(const std::vector<IndexEstimate>& per_index,
                                      const Selection& selection, int levels,
                                      const SourceInfo& source = {}) {
    const std::size_t n = per_index.size();
    if (n != (static_cast<std::size_t>(1) << levels))
        throw UsageError("per-index list does not match the level");
    InformationSet set;
    set.levels = levels;
    set.per_index = per_index;
    set.selection = selection;
    set.source = source;
    if (selection.mode == Selection::Mode::threshold) {
        if (!(selection.eps > 0.0 && selection.eps < 1.0))
            throw UsageError("threshold eps must lie in (0,1)");
        for (std::size_t i = 0; i < n; ++i)
            if (per_index[i].value >= 1.0 - selection.eps)
                set.indices.push_back(static_cast<std::uint32_t>(i + 1));
    } else {
        if (selection.k > n) throw UsageError("top-k selection larger than the block length");
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (per_index[a].value != per_index[b].value)
                return per_index[a].value > per_index[b].value;
            return a < b;
        });
        order.resize(selection.k);
        std::sort(order.begin(), order.end());
        for (auto i : order) set.indices.push_back(i + 1);
    }
    return set;
}

// Union bound on the successive-cancellation error probability: the sum of
// 1 - I over the selected indices. May exceed 1 (still a valid bound);
// clip_unit is the convenience form.
inline double scd_union_bound(const std::vector<IndexEstimate>& per_index,
                              const InformationSet& set) {
    double bound = 0;
    for (auto idx : set.indices) {
        if (idx == 0 || idx > per_index.size())
            throw UsageError("information set index " + std::to_string(idx) +
                             " not covered by the per-index values");
        double v = per_index[idx - 1].value;
        bound += is_neg_inf(v) ? std::numeric_limits<double>::infinity() : 1.0 - v;
    }
    return bound;
}

inline double clip_unit(double p) { return std::min(p, 1.0); }

// Default threshold schedule eps(N) = 2^(-sqrt(N)).
inline double eps_schedule(std::size_t block_length) {
    return std::exp2(-std::sqrt(static_cast<double>(block_length)));
}

// Frozen set = complement of the information set; frozen values default to
// all-zero (for common-permutation symmetric pairs performance does not
// depend on them).
inline PolarCode to_polar_code(const InformationSet& set,
                               std::vector<std::uint8_t> frozen_values = {}) {
    PolarCode code;
    code.levels = set.levels;
    const std::size_t n = set.block_length();
    code.frozen_mask.assign(n, 1);
    for (auto idx : set.indices) {
        if (idx == 0 || idx > n) throw DataError("information set index out of range");
        code.frozen_mask[idx - 1] = 0;
    }
    if (frozen_values.empty()) frozen_values.assign(n, 0);
    if (frozen_values.size() != n) throw DataError("frozen value length mismatch");
    code.frozen_values = std::move(frozen_values);
    return code;
}

}  // namespace polarmm
