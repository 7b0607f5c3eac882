#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polarmm/channel.hpp"
#include "polarmm/common.hpp"
#include "polarmm/density.hpp"
#include "polarmm/parallel.hpp"
#include "polarmm/rng.hpp"

namespace polarmm {

struct CheckResult {
    std::string name;
    std::uint64_t instances = 0;
    double worst_residual = 0;
    double tolerance = 0;
    bool pass = false;
    std::uint64_t skipped = 0;  // instances excluded by hypothesis (diverging information)
};

struct PropertyReport {
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// |(I(d-) + I(d+))/2 - I(d)|: the one-step balance of mismatched information
// under the transform pair. Holds for any density, so residuals measure only
// floating-point noise.
inline double martingale_residual(const PairDensity& d) {
    double i0 = mismatched_info(d);
    if (is_neg_inf(i0)) throw DataError("martingale residual undefined: information diverges");
    double im = mismatched_info(pair_minus(d));
    double ip = mismatched_info(pair_plus(d));
    return std::fabs(0.5 * (im + ip) - i0);
}

inline double martingale_residual(const ChannelPair& pair) {
    return martingale_residual(to_density(pair));
}

// mu - (mu(d-) + mu(d+))/2 with mu = E[sqrt|D_V|]; nonnegative up to
// floating-point noise.
inline double supermartingale_slack(const PairDensity& d) {
    double m0 = sqrt_delta_mean(d);
    double mm = sqrt_delta_mean(pair_minus(d));
    double mp = sqrt_delta_mean(pair_plus(d));
    return m0 - 0.5 * (mm + mp);
}

inline double supermartingale_slack(const ChannelPair& pair) {
    return supermartingale_slack(to_density(pair));
}

// Pointwise inequalities behind the plus-transform bound:
// sqrt|(d1 +- d2)/(1 +- d1 d2)| <= sqrt|d1| + sqrt|d2| - sqrt|d1 d2|.
// Returns the worst LHS - RHS over both sign choices (zero denominators
// skipped). Nonpositive up to floating-point noise.
inline double lemma2_worst_violation(const std::vector<std::pair<double, double>>& samples) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& [d1, d2] : samples) {
        double rhs = std::sqrt(std::fabs(d1)) + std::sqrt(std::fabs(d2)) -
                     std::sqrt(std::fabs(d1 * d2));
        for (double s : {1.0, -1.0}) {
            double den = 1.0 + s * d1 * d2;
            if (den == 0.0) continue;
            double lhs = std::sqrt(std::fabs((d1 + s * d2) / den));
            worst = std::max(worst, lhs - rhs);
        }
    }
    return worst;
}

inline std::vector<std::pair<double, double>> lemma2_boundary_grid() {
    static const std::array<double, 5> pts = {-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<std::pair<double, double>> grid;
    for (double a : pts)
        for (double b : pts) grid.emplace_back(a, b);
    return grid;
}

inline std::vector<std::pair<double, double>> lemma2_random_samples(std::uint64_t count,
                                                                    std::uint64_t seed) {
    std::vector<std::pair<double, double>> samples;
    samples.reserve(count);
    CounterRng rng = CounterRng::derive(seed, "lemma2", 0);
    for (std::uint64_t i = 0; i < count; ++i)
        samples.emplace_back(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
    return samples;
}

// Single-use error bound sweep: ML decoding with the metric channel errs with
// probability at most 1 - I(W,V) whenever the information is finite.
inline CheckResult pe_bound_sweep(std::uint64_t count, std::uint64_t seed) {
    CheckResult res;
    res.name = "pe-bound";
    res.tolerance = 1e-12;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::uint64_t i = 0; i < count; ++i) {
        CounterRng rng = CounterRng::derive(seed, "pe-bound-pair", i);
        ChannelPair pair = random_pair(rng);
        double info = mismatched_info(pair);
        if (is_neg_inf(info)) {
            ++res.skipped;
            continue;
        }
        double pe = pe_single_use(pair);
        worst = std::max(worst, pe - (1.0 - info));
        ++res.instances;
    }
    res.worst_residual = worst;
    res.pass = worst <= res.tolerance;
    return res;
}

// Residuals and slacks over every node of a synthesis tree. Children are
// measured straight off the transforms, before any alphabet reduction, so the
// balance identities hold regardless of the merge policy shaping the tree.
struct TreeCheckStats {
    double worst_martingale = 0;
    double worst_super_violation = 0;   // max of -slack
    double worst_minus_identity = 0;    // |mu(d-) - mu(d)^2|
    double worst_plus_excess = 0;       // mu(d+) - (2 mu - mu^2)
    std::uint64_t nodes = 0;
    std::uint64_t skipped = 0;
};

inline TreeCheckStats transform_tree_checks(const PairDensity& root, int depth,
                                            const MergePolicy& policy) {
    TreeCheckStats stats;
    struct Local {
        double mart = -1, super = -1e300, minus_id = -1, plus_ex = -1e300;
        std::uint64_t nodes = 0, skipped = 0;
    };
    auto node_check = [&](const PairDensity& d, Local& loc) {
        ++loc.nodes;
        double i0 = mismatched_info(d);
        PairDensity dm = pair_minus(d);
        PairDensity dp = pair_plus(d);
        if (is_neg_inf(i0)) {
            ++loc.skipped;
        } else {
            double resid = std::fabs(0.5 * (mismatched_info(dm) + mismatched_info(dp)) - i0);
            loc.mart = std::max(loc.mart, resid);
        }
        double m0 = sqrt_delta_mean(d);
        double mm = sqrt_delta_mean(dm);
        double mp = sqrt_delta_mean(dp);
        loc.super = std::max(loc.super, 0.5 * (mm + mp) - m0);
        loc.minus_id = std::max(loc.minus_id, std::fabs(mm - m0 * m0));
        loc.plus_ex = std::max(loc.plus_ex, mp - (2.0 * m0 - m0 * m0));
    };
    // Serial over the tree per pair; the caller parallelizes over pairs.
    Local loc;
    auto dfs = [&](const PairDensity& d, int level, auto&& self) -> void {
        node_check(d, loc);
        if (level == depth) return;
        self(reduce(pair_minus(d), policy), level + 1, self);
        self(reduce(pair_plus(d), policy), level + 1, self);
    };
    dfs(root, 0, dfs);
    stats.worst_martingale = loc.mart;
    stats.worst_super_violation = loc.super;
    stats.worst_minus_identity = loc.minus_id;
    stats.worst_plus_excess = loc.plus_ex;
    stats.nodes = loc.nodes;
    stats.skipped = loc.skipped;
    return stats;
}

// Per-level polarization summary: how much index mass has crossed the
// thresholds 1-eps (and eps) for eps in {1e-1, 1e-2, 1e-3}.
struct LevelSummary {
    int level = 0;
    std::uint64_t indices = 0;
    std::uint64_t diverged = 0;  // I = -infinity
    std::array<double, 3> frac_high{};  // I >= 1 - eps
    std::array<double, 3> frac_low{};   // I <= eps (or diverged)
    double middle_mass = 0;             // finite I strictly inside (1e-2, 1-1e-2)
    double mean_info = 0;               // diverging indices excluded
    std::uint32_t max_atoms = 0;
};

inline constexpr std::array<double, 3> kProfileEps = {1e-1, 1e-2, 1e-3};

struct PolarizationProfile {
    std::vector<LevelSummary> levels;
};

inline PolarizationProfile polarization_profile(const PairDensity& root, int n_max,
                                                const MergePolicy& policy) {
    if (is_neg_inf(mismatched_info(root)))
        throw DataError("polarization profile requires finite mismatched information");
    // Collect every node's record deterministically, then summarize.
    std::vector<std::vector<IndexRecord>> records(static_cast<std::size_t>(n_max) + 1);
    for (int l = 0; l <= n_max; ++l)
        records[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(1) << l);
    walk_tree(root, n_max, policy, [&](int level, std::uint64_t index, const PairDensity& d) {
        records[static_cast<std::size_t>(level)][index] = analyze(d);
    });
    PolarizationProfile prof;
    for (int l = 0; l <= n_max; ++l) {
        const auto& recs = records[static_cast<std::size_t>(l)];
        LevelSummary s;
        s.level = l;
        s.indices = recs.size();
        double info_sum = 0;
        std::array<std::uint64_t, 3> high{};
        std::array<std::uint64_t, 3> low{};
        std::uint64_t middle = 0;
        for (const auto& r : recs) {
            s.max_atoms = std::max(s.max_atoms, r.atoms);
            if (r.diverged()) {
                ++s.diverged;
                for (std::size_t e = 0; e < kProfileEps.size(); ++e) ++low[e];
                continue;
            }
            info_sum += r.info_wv;
            for (std::size_t e = 0; e < kProfileEps.size(); ++e) {
                if (r.info_wv >= 1.0 - kProfileEps[e]) ++high[e];
                if (r.info_wv <= kProfileEps[e]) ++low[e];
            }
            if (r.info_wv > 1e-2 && r.info_wv < 1.0 - 1e-2) ++middle;
        }
        auto count = static_cast<double>(recs.size());
        for (std::size_t e = 0; e < kProfileEps.size(); ++e) {
            s.frac_high[e] = static_cast<double>(high[e]) / count;
            s.frac_low[e] = static_cast<double>(low[e]) / count;
        }
        s.middle_mass = static_cast<double>(middle) / count;
        s.mean_info =
            s.indices > s.diverged ? info_sum / static_cast<double>(s.indices - s.diverged) : 0.0;
        prof.levels.push_back(s);
    }
    return prof;
}

inline PolarizationProfile polarization_profile(const ChannelPair& pair, int n_max,
                                                const MergePolicy& policy) {
    return polarization_profile(to_density(pair), n_max, policy);
}

// ---------------------------------------------------------------------------
// The bundled suite behind `check all`.

struct CheckOptions {
    std::uint64_t pairs = 100;            // random-pair corpus size
    int tree_depth = 4;                   // depth of per-pair synthesis trees
    std::uint64_t lemma2_samples = 1000000;
    std::uint64_t pe_pairs = 1000;
    int profile_levels = 10;              // mismatched profile depth
    MergePolicy tree_policy = MergePolicy::quantized_grid(12, 128);
    MergePolicy profile_policy = MergePolicy::quantized_grid(12, 512);
};

// Dual-route agreement of the mismatched information on a random corpus.
inline CheckResult check_dual_form(std::uint64_t seed, std::uint64_t pairs) {
    CheckResult c;
    c.name = "dual-form";
    c.tolerance = 1e-12;
    double worst = 0;
    for (std::uint64_t i = 0; i < pairs; ++i) {
        CounterRng rng = CounterRng::derive(seed, "dual-form-pair", i);
        ChannelPair pair = random_pair(rng);
        MismatchedInfoForms f = mismatched_info_forms(pair);
        ++c.instances;
        if (is_neg_inf(f.definition) || is_neg_inf(f.lemma)) {
            c.skipped += is_neg_inf(f.definition) != is_neg_inf(f.lemma);
            continue;
        }
        worst = std::max(worst, std::fabs(f.definition - f.lemma));
    }
    c.worst_residual = worst;
    c.pass = worst <= c.tolerance && c.skipped == 0;
    return c;
}

// Martingale balance, supermartingale slack and the two exact mu relations
// over depth-limited synthesis trees of a random corpus. Returns four results
// (martingale, supermartingale, minus-identity, plus-bound).
inline std::vector<CheckResult> check_transform_trees(std::uint64_t seed, std::uint64_t pairs,
                                                      int depth, const MergePolicy& policy) {
    CheckResult mart, super, minus_id, plus_bd;
    mart.name = "martingale";
    mart.tolerance = 1e-10;
    super.name = "supermartingale";
    super.tolerance = 1e-12;
    minus_id.name = "minus-identity";
    minus_id.tolerance = 1e-10;
    plus_bd.name = "plus-bound";
    plus_bd.tolerance = 1e-12;
    std::vector<TreeCheckStats> stats(pairs);
    parallel_blocks(pairs, [&](std::size_t i) {
        CounterRng rng = CounterRng::derive(seed, "tree-pair", i);
        ChannelPair pair = random_pair(rng);
        stats[i] = transform_tree_checks(to_density(pair), depth, policy);
    });
    double wm = 0, ws = -1e300, wi = 0, wp = -1e300;
    for (const auto& s : stats) {
        wm = std::max(wm, s.worst_martingale);
        ws = std::max(ws, s.worst_super_violation);
        wi = std::max(wi, s.worst_minus_identity);
        wp = std::max(wp, s.worst_plus_excess);
        mart.instances += s.nodes - s.skipped;
        mart.skipped += s.skipped;
        super.instances += s.nodes;
        minus_id.instances += s.nodes;
        plus_bd.instances += s.nodes;
    }
    mart.worst_residual = wm;
    mart.pass = wm <= mart.tolerance;
    super.worst_residual = ws;
    super.pass = ws <= super.tolerance;
    minus_id.worst_residual = wi;
    minus_id.pass = wi <= minus_id.tolerance;
    plus_bd.worst_residual = wp;
    plus_bd.pass = wp <= plus_bd.tolerance;
    return {mart, super, minus_id, plus_bd};
}

// Matched-erasure equality: half the transformed means recover the mean.
inline CheckResult check_bec_mu_equality() {
    CheckResult c;
    c.name = "bec-mu-equality";
    c.tolerance = 1e-10;
    double worst = 0;
    for (double eps : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        PairDensity d = to_density(bec(eps));
        for (int step = 0; step < 4; ++step) {
            double m0 = sqrt_delta_mean(d);
            double mm = sqrt_delta_mean(pair_minus(d));
            double mp = sqrt_delta_mean(pair_plus(d));
            worst = std::max(worst, std::fabs(0.5 * (mm + mp) - m0));
            d = reduce(pair_minus(d), MergePolicy::exact());
            ++c.instances;
        }
    }
    c.worst_residual = worst;
    c.pass = worst <= c.tolerance;
    return c;
}

// Pointwise plus-transform inequalities on random samples plus the boundary
// grid.
inline CheckResult check_lemma2(std::uint64_t seed, std::uint64_t count) {
    CheckResult c;
    c.name = "lemma2-pointwise";
    c.tolerance = 1e-12;
    auto samples = lemma2_random_samples(count, seed);
    auto grid = lemma2_boundary_grid();
    samples.insert(samples.end(), grid.begin(), grid.end());
    c.instances = samples.size();
    c.worst_residual = lemma2_worst_violation(samples);
    c.pass = c.worst_residual <= c.tolerance;
    return c;
}

// Polarization trend on the standard mismatched pair: the share of indices
// with I >= 0.99 grows with the level and ends within slack of I(W,V).
inline CheckResult check_polarization_trend(int levels, const MergePolicy& policy,
                                            double slack = 0.15) {
    CheckResult c;
    c.name = "polarization-trend";
    c.tolerance = 0.0;
    ChannelPair pair = make_pair(bsc(0.1), bsc(0.2));
    double target = mismatched_info(pair);
    PolarizationProfile prof = polarization_profile(pair, levels, policy);
    double prev = 0;
    bool monotone = true;
    for (const auto& s : prof.levels) {
        if (s.level < 2) continue;
        if (s.frac_high[1] + 1e-12 < prev) monotone = false;
        prev = s.frac_high[1];
        ++c.instances;
    }
    const LevelSummary& last = prof.levels.back();
    // Shallow profiles sit further from the asymptote.
    double required = target - slack - (levels < 14 ? 0.1 : 0.0);
    c.worst_residual = required - last.frac_high[1];
    c.pass = monotone && last.frac_high[1] >= required;
    return c;
}

inline PropertyReport run_all_checks(std::uint64_t seed, const CheckOptions& opt = {}) {
    PropertyReport rep;
    rep.seed = seed;
    rep.checks.push_back(check_dual_form(seed, opt.pairs));
    for (auto& c : check_transform_trees(seed, opt.pairs, opt.tree_depth, opt.tree_policy))
        rep.checks.push_back(c);
    rep.checks.push_back(check_bec_mu_equality());
    rep.checks.push_back(check_lemma2(seed, opt.lemma2_samples));
    rep.checks.push_back(pe_bound_sweep(opt.pe_pairs, seed));
    rep.checks.push_back(check_polarization_trend(opt.profile_levels, opt.profile_policy));
    return rep;
}

}  // namespace polarmm
