#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polarmm/channel.hpp"
#include "polarmm/codec.hpp"
#include "polarmm/construct.hpp"
#include "polarmm/density.hpp"

namespace polarmm {

// A parametric class of symmetric channels: a BSC or BEC parameter interval
// discretized on a step grid, or an explicit list. All members must be
// symmetric and share one output alphabet.
struct ChannelFamily {
    enum class Kind { bsc_interval, bec_interval, explicit_list };

    Kind kind = Kind::explicit_list;
    double lo = 0, hi = 0, step = 0;
    std::vector<Bdmc> channels;      // explicit members
    std::vector<std::string> names;  // labels for explicit members

    // "bsc:0.05:0.11:0.01" or "bec:lo:hi:step"
    static ChannelFamily parse(std::string_view spec) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : spec) {
            if (c == ':') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(cur);
        if (parts.size() != 4)
            throw UsageError("family spec must look like kind:lo:hi:step, got '" +
                             std::string(spec) + "'");
        ChannelFamily fam;
        if (parts[0] == "bsc")
            fam.kind = Kind::bsc_interval;
        else if (parts[0] == "bec")
            fam.kind = Kind::bec_interval;
        else
            throw UsageError("unknown family kind '" + parts[0] + "'");
        try {
            fam.lo = std::stod(parts[1]);
            fam.hi = std::stod(parts[2]);
            fam.step = std::stod(parts[3]);
        } catch (const std::exception&) {
            throw UsageError("family spec has non-numeric fields: '" + std::string(spec) + "'");
        }
        if (!(fam.lo >= 0.0 && fam.hi <= 1.0 && fam.lo <= fam.hi))
            throw UsageError("family interval must satisfy 0 <= lo <= hi <= 1");
        if (!(fam.step > 0.0)) throw UsageError("family step must be positive");
        return fam;
    }

    static ChannelFamily from_channels(std::vector<Bdmc> list, std::vector<std::string> labels) {
        ChannelFamily fam;
        fam.kind = Kind::explicit_list;
        fam.channels = std::move(list);
        fam.names = std::move(labels);
        fam.validate();
        return fam;
    }

    bool interval() const { return kind != Kind::explicit_list; }

    Bdmc make(double param) const {
        switch (kind) {
            case Kind::bsc_interval:
                return bsc(param);
            case Kind::bec_interval:
                return bec(param);
            default:
                throw UsageError("explicit families have no parameter");
        }
    }

    // Grid parameters lo, lo+step, ..., hi (endpoint included up to rounding).
    std::vector<double> params() const {
        std::vector<double> ps;
        if (interval()) {
            for (int i = 0;; ++i) {
                double p = lo + i * step;
                if (p > hi + 1e-12) break;
                ps.push_back(std::min(p, hi));
            }
        } else {
            for (std::size_t i = 0; i < channels.size(); ++i)
                ps.push_back(static_cast<double>(i));
        }
        return ps;
    }

    std::size_t size() const { return interval() ? params().size() : channels.size(); }

    Bdmc member(std::size_t i) const {
        if (interval()) return make(params().at(i));
        return channels.at(i);
    }

    std::string member_label(std::size_t i) const {
        if (interval()) {
            std::ostringstream os;
            os << (kind == Kind::bsc_interval ? "bsc(" : "bec(") << params().at(i) << ")";
            return os.str();
        }
        return i < names.size() && !names[i].empty() ? names[i] : "ch" + std::to_string(i);
    }

    void validate() const {
        if (size() == 0) throw DataError("channel family is empty");
        std::size_t alphabet = member(0).size();
        for (std::size_t i = 0; i < size(); ++i) {
            Bdmc ch = member(i);
            require_valid(ch, "family member");
            if (ch.size() != alphabet)
                throw DataError("family members must share one output alphabet; member " +
                                member_label(i) + " differs");
            if (!is_symmetric(ch))
                throw DataError("family member " + member_label(i) + " is not symmetric");
        }
    }
};

struct MinChannelResult {
    Bdmc channel;
    double capacity = 0;
    double param = 0;  // meaningful for interval families
    std::string label;
};

// The capacity minimizer over the family closure. Interval kinds run a
// golden-section search on the scalar parameter (capacity is unimodal in it)
// and snap to an endpoint when the optimum sits within tol of one; explicit
// lists are scanned, and a second member within tol of the minimum is an
// ambiguity error.
inline MinChannelResult family_min_channel(const ChannelFamily& fam, double tol = 1e-9) {
    fam.validate();
    if (!fam.interval()) {
        std::size_t best = 0;
        double best_cap = symmetric_capacity(fam.member(0));
        for (std::size_t i = 1; i < fam.size(); ++i) {
            double c = symmetric_capacity(fam.member(i));
            if (c < best_cap) {
                best_cap = c;
                best = i;
            }
        }
        for (std::size_t i = 0; i < fam.size(); ++i) {
            if (i == best) continue;
            if (symmetric_capacity(fam.member(i)) <= best_cap + tol)
                throw DataError("capacity minimizer is not unique: " + fam.member_label(best) +
                                " and " + fam.member_label(i) + " are within tolerance");
        }
        return {fam.member(best), best_cap, static_cast<double>(best), fam.member_label(best)};
    }
    auto cap = [&](double p) { return symmetric_capacity(fam.make(p)); };
    double a = fam.lo, b = fam.hi;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = cap(c), fd = cap(d);
    for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = cap(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = cap(d);
        }
        if (std::fabs(fc - fd) < tol * 1e-3) break;
    }
    double p = 0.5 * (a + b);
    double fp = cap(p);
    // Endpoints win whenever they reach the same capacity within tol.
    if (cap(fam.lo) <= fp + tol && cap(fam.lo) <= cap(fam.hi)) {
        p = fam.lo;
    } else if (cap(fam.hi) <= fp + tol) {
        p = fam.hi;
    }
    std::ostringstream os;
    os << (fam.kind == ChannelFamily::Kind::bsc_interval ? "bsc(" : "bec(") << p << ")";
    return {fam.make(p), cap(p), p, os.str()};
}

// Certificate that the family is one-sided for the metric V: the smallest
// margin I(W,V) - I(V) over the tested grid. Valid when no margin falls
// below -1e-9.
struct OneSidedCertificate {
    double min_capacity = 0;      // I(V)
    double worst_violation = 0;   // min over tested W of I(W,V) - I(V)
    std::string worst_member;
    std::string tested_grid;

    bool valid() const { return worst_violation >= -1e-9; }
};

inline OneSidedCertificate one_sided_check(const ChannelFamily& fam, const Bdmc& v,
                                           std::size_t grid = 0) {
    require_valid(v, "metric channel");
    OneSidedCertificate cert;
    cert.min_capacity = symmetric_capacity(v);
    cert.worst_violation = std::numeric_limits<double>::infinity();
    auto test = [&](const Bdmc& w, const std::string& label) {
        double iwv = mismatched_info(make_pair(w, v));
        double margin = is_neg_inf(iwv) ? neg_inf() : iwv - cert.min_capacity;
        if (margin < cert.worst_violation) {
            cert.worst_violation = margin;
            cert.worst_member = label;
        }
    };
    if (fam.interval() && grid >= 2) {
        for (std::size_t i = 0; i < grid; ++i) {
            double p = fam.lo + (fam.hi - fam.lo) * static_cast<double>(i) /
                                    static_cast<double>(grid - 1);
            std::ostringstream os;
            os << "p=" << p;
            test(fam.make(p), os.str());
        }
        std::ostringstream os;
        os << grid << " points on [" << fam.lo << "," << fam.hi << "]";
        cert.tested_grid = os.str();
    } else {
        for (std::size_t i = 0; i < fam.size(); ++i) test(fam.member(i), fam.member_label(i));
        std::ostringstream os;
        os << fam.size() << " family members";
        cert.tested_grid = os.str();
    }
    return cert;
}

struct CompoundRow {
    double param = 0;
    std::string label;
    double info_w = 0;    // I(W)
    double info_wv = 0;   // I(W,V)
    std::size_t set_size = 0;
    double rate = 0;
    double fer = 0;
    double ber = 0;
    double ci95 = 0;
    std::optional<double> union_bound;  // exact construction only
};

struct ExperimentReport {
    MinChannelResult metric;  // the shared decoder channel V
    OneSidedCertificate certificate;
    std::vector<CompoundRow> rows;  // sorted by parameter
    std::vector<std::string> warnings;
    int levels = 0;
    double rate = 0;
    std::uint64_t trials = 0, frames = 0, seed = 0;
};

struct CompoundOptions {
    bool exact_construction = false;
    MergePolicy policy = MergePolicy::quantized_grid();
    double min_tol = 1e-9;
    std::size_t onesided_grid = 0;  // 0: test the family's own grid
};

// The full compound experiment: fix the decoder metric to the family's
// capacity minimizer V, then for every member W construct the information
// set for the pair (W,V) at rate R (top ceil(N*R) indices), simulate frames
// with the mismatched decoder, and report per-channel error rates.
inline ExperimentReport compound_run(const ChannelFamily& fam, double rate, int levels,
                                     std::uint64_t trials, std::uint64_t frames,
                                     std::uint64_t seed, const CompoundOptions& opt = {}) {
    if (!(rate > 0.0 && rate <= 1.0)) throw UsageError("rate must lie in (0,1]");
    fam.validate();
    ExperimentReport rep;
    rep.levels = levels;
    rep.rate = rate;
    rep.trials = trials;
    rep.frames = frames;
    rep.seed = seed;
    rep.metric = family_min_channel(fam, opt.min_tol);
    rep.certificate = one_sided_check(fam, rep.metric.channel, opt.onesided_grid);
    if (!rep.certificate.valid())
        rep.warnings.push_back("family is not one-sided on the tested grid (worst margin " +
                               std::to_string(rep.certificate.worst_violation) + " bits at " +
                               rep.certificate.worst_member + ")");
    if (rate >= rep.metric.capacity)
        rep.warnings.push_back("rate " + std::to_string(rate) +
                               " is not below the compound capacity " +
                               std::to_string(rep.metric.capacity));
    const std::size_t n_block = static_cast<std::size_t>(1) << levels;
    const auto k = static_cast<std::size_t>(
        std::ceil(rate * static_cast<double>(n_block) - 1e-9));
    MetricTable metric = MetricTable::from_channel(rep.metric.channel);
    std::vector<double> ps = fam.params();
    for (std::size_t row_idx = 0; row_idx < fam.size(); ++row_idx) {
        Bdmc w = fam.member(row_idx);
        ChannelPair pair = make_pair(w, rep.metric.channel);
        CompoundRow row;
        row.param = ps[row_idx];
        row.label = fam.member_label(row_idx);
        row.info_w = symmetric_capacity(w);
        row.info_wv = mismatched_info(pair);
        std::vector<IndexEstimate> per_index;
        SourceInfo source;
        std::uint64_t row_seed = CounterRng::derive(seed, "compound-row", row_idx).next_u64();
        if (opt.exact_construction) {
            per_index = exact_indices(pair, levels, opt.policy);
            source = {SourceInfo::Kind::exact, 0, 0};
        } else {
            per_index = estimate_indices_mc(w, rep.metric.channel, levels, trials, row_seed);
            source = {SourceInfo::Kind::monte_carlo, trials, row_seed};
        }
        InformationSet set = select_info_set(per_index, Selection::top_k(k), levels, source);
        row.set_size = set.indices.size();
        row.rate = static_cast<double>(row.set_size) / static_cast<double>(n_block);
        if (opt.exact_construction) row.union_bound = scd_union_bound(per_index, set);
        PolarCode code = to_polar_code(set);
        SimulationResult sim = simulate_frames(
            w, code, metric, frames, CounterRng::derive(seed, "compound-sim", row_idx).next_u64());
        row.fer = sim.fer;
        row.ber = sim.ber;
        row.ci95 = sim.ci95;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace polarmm
