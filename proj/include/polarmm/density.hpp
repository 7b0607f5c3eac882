#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "polarmm/channel.hpp"
#include "polarmm/common.hpp"
#include "polarmm/parallel.hpp"

namespace polarmm {

// Sufficient-statistic form of a channel pair: the joint law of the posterior
// differences (D_W(Y), D_V(Y)) under the W-output distribution q_W. Every
// quantity the mismatched analysis needs (I(W,V), I(W), E[sqrt|D_V|]) and both
// polarization transforms close over these three numbers per output symbol,
// so output alphabets never have to be materialized.
struct Atom {
    double mass;  // q_W probability of the symbol
    double dw;    // posterior difference of the true channel, in [-1,1]
    double dv;    // posterior difference of the metric channel, in [-1,1]
};

struct PairDensity {
    std::vector<Atom> atoms;

    std::size_t size() const { return atoms.size(); }

    double total_mass() const {
        double m = 0;
        for (const auto& a : atoms) m += a.mass;
        return m;
    }
};

struct MergePolicy {
    enum class Mode { exact_only, quantized };

    Mode mode = Mode::quantized;
    std::size_t max_atoms = 65536;
    int grid_bits = 12;  // bins per delta axis = 2^grid_bits, atanh-warped

    static MergePolicy exact(std::size_t cap = 1u << 22) { return {Mode::exact_only, cap, 0}; }
    static MergePolicy quantized_grid(int bits = 12, std::size_t cap = 65536) {
        return {Mode::quantized, cap, bits};
    }

    void check() const {
        if (max_atoms < 2) throw UsageError("merge policy: max_atoms must be at least 2");
        if (mode == Mode::quantized && grid_bits < 1)
            throw UsageError("merge policy: quantized mode needs a positive grid");
    }
};

// Minus/plus choices along the synthesis recursion; bits[0] is applied first.
// Index i (1-based) at level n corresponds to the binary expansion of i-1,
// most significant bit first, with minus=0 and plus=1.
struct Branch {
    std::vector<std::uint8_t> bits;  // 0 = minus, 1 = plus

    static Branch from_index(std::uint64_t leaf, int levels) {
        Branch b;
        b.bits.resize(static_cast<std::size_t>(levels));
        for (int i = 0; i < levels; ++i)
            b.bits[static_cast<std::size_t>(i)] =
                static_cast<std::uint8_t>((leaf >> (levels - 1 - i)) & 1u);
        return b;
    }

    static Branch parse(std::string_view s) {
        Branch b;
        for (char c : s) {
            if (c == '-')
                b.bits.push_back(0);
            else if (c == '+')
                b.bits.push_back(1);
            else
                throw UsageError("branch string may contain only '-' and '+'");
        }
        return b;
    }

    std::size_t size() const { return bits.size(); }

    std::string str() const {
        std::string s;
        s.reserve(bits.size());
        for (auto b : bits) s.push_back(b ? '+' : '-');
        return s;
    }
};

struct TransformDiag {
    std::uint64_t degenerate_metric_atoms = 0;  // 0/0 metric updates mapped to delta 0
};

namespace detail {

// Largest double below 1; rounding guard for the plus-transform ratio, which
// mathematically stays inside (-1,1) for inputs inside (-1,1) but can round
// onto +-1 and would then fake a deterministic posterior.
inline constexpr double kDeltaCap = 0x1.fffffffffffffp-1;

inline double guard_unit(double x, double in1, double in2) {
    if (x >= 1.0) return (std::fabs(in1) == 1.0 || std::fabs(in2) == 1.0) ? 1.0 : kDeltaCap;
    if (x <= -1.0) return (std::fabs(in1) == 1.0 || std::fabs(in2) == 1.0) ? -1.0 : -kDeltaCap;
    return x;
}

inline double plus_delta(double d1, double d2, double sign, TransformDiag* diag) {
    double den = 1.0 + sign * d1 * d2;
    double num = d1 + sign * d2;
    if (den == 0.0) {
        // Only reachable with |d1| = |d2| = 1, where num vanishes as well:
        // the metric is uninformative on this event.
        if (diag) ++diag->degenerate_metric_atoms;
        return 0.0;
    }
    return guard_unit(num / den, d1, d2);
}

inline double normalize_zero(double x) { return x == 0.0 ? 0.0 : x; }  // folds -0.0 into +0.0

inline void sort_atoms(std::vector<Atom>& atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
        if (a.dw != b.dw) return a.dw < b.dw;
        return a.dv < b.dv;
    });
}

// Merges exactly equal (dw, dv) atoms and drops zero-mass atoms. Lossless for
// every downstream statistic.
inline void exact_merge(std::vector<Atom>& atoms) {
    for (auto& a : atoms) {
        a.dw = normalize_zero(a.dw);
        a.dv = normalize_zero(a.dv);
    }
    sort_atoms(atoms);
    std::size_t out = 0;
    for (std::size_t i = 0; i < atoms.size();) {
        Atom acc = atoms[i];
        std::size_t j = i + 1;
        while (j < atoms.size() && atoms[j].dw == acc.dw && atoms[j].dv == acc.dv) {
            acc.mass += atoms[j].mass;
            ++j;
        }
        if (acc.mass > 0.0) atoms[out++] = acc;
        i = j;
    }
    atoms.resize(out);
}

// Open-addressed accumulator over quantized (dw, dv) bins. Keys pack the two
// bin indices; coarsening halves each per-axis index, so an existing table
// can be re-binned without revisiting the original atoms. Insertion order is
// fixed by the caller, which keeps results independent of thread count.
class BinAccum {
  public:
    BinAccum(int bits, std::size_t max_atoms) : bits_(bits), target_(max_atoms) {
        coarsen_limit_ = std::max<std::size_t>(1024, 16 * max_atoms);
        rehash(1024);
    }

    void insert(double mass, double dw, double dv) {
        if (mass <= 0.0) return;
        insert_group(key_of(dw, dv), mass, mass * dw, mass * dv, unit_state(dw), unit_state(dv));
    }

    // Coarsens until the bin count fits, then emits centroid atoms.
    std::vector<Atom> finalize() {
        while (occupied_ > target_ && bits_ > 1) coarsen();
        if (occupied_ > target_)
            throw CapacityError("quantized merge cannot reach max_atoms=" +
                                std::to_string(target_));
        std::vector<std::size_t> order;
        order.reserve(occupied_);
        for (std::size_t s = 0; s < slots_.size(); ++s)
            if (slots_[s].key_plus_one) order.push_back(s);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return slots_[a].key_plus_one < slots_[b].key_plus_one;
        });
        std::vector<Atom> atoms;
        atoms.reserve(order.size());
        for (std::size_t s : order) {
            const Slot& sl = slots_[s];
            atoms.push_back({sl.mass, centroid(sl.sum_dw, sl.mass, sl.unit_w),
                             centroid(sl.sum_dv, sl.mass, sl.unit_v)});
        }
        exact_merge(atoms);
        return atoms;
    }

  private:
    struct Slot {
        std::uint64_t key_plus_one = 0;
        double mass = 0, sum_dw = 0, sum_dv = 0;
        // +1/-1 while every atom seen is exactly that unit value, else 0.
        std::int8_t unit_w = 0, unit_v = 0;
    };

    static std::int8_t unit_state(double d) {
        if (d == 1.0) return 1;
        if (d == -1.0) return -1;
        return 0;
    }

    static double centroid(double sum, double mass, std::int8_t unit) {
        if (unit != 0) return unit;  // bin holds only exact +-1 atoms
        double c = sum / mass;
        if (c >= 1.0) return kDeltaCap;
        if (c <= -1.0) return -kDeltaCap;
        return normalize_zero(c);
    }

    // Key layout: [sign_w | sign_v | 31-bit w bin | 31-bit v bin]. Coarsening
    // halves the two magnitude fields and leaves the signs alone.
    std::uint64_t key_of(double dw, double dv) const {
        std::uint64_t key = (bin(dw) << 31) | bin(dv);
        if (dw < 0) key |= 1ULL << 63;
        if (dv < 0) key |= 1ULL << 62;
        return key;
    }

    static std::uint64_t coarse_key(std::uint64_t key) {
        std::uint64_t signs = key & (3ULL << 62);
        std::uint64_t kw = (key >> 31) & 0x7fffffffULL;
        std::uint64_t kv = key & 0x7fffffffULL;
        return signs | ((kw >> 1) << 31) | (kv >> 1);
    }

    std::uint64_t bin(double d) const {
        // Mirrored logarithmic warp, read straight off the bit pattern of
        // 1 - |d|: bins are uniform in log2 distance from the endpoints with
        // 2^(bits-6) sub-bins per octave, saturated at 1e-9 from +-1. This
        // concentrates resolution where the information functional is
        // steepest, like an atanh warp, at a fraction of its cost.
        double u = 1.0 - std::fabs(d);
        if (u < 1e-9) u = 1e-9;
        int m = std::clamp(bits_ - 6, 0, 52);
        return std::bit_cast<std::uint64_t>(u) >> (52 - m);
    }

    void insert_group(std::uint64_t key, double mass, double sdw, double sdv, std::int8_t uw,
                      std::int8_t uv) {
        if (occupied_ * 4 >= slots_.size() * 3) {
            if (occupied_ >= coarsen_limit_ && bits_ > 1)
                coarsen();
            else
                rehash(slots_.size() * 2);
        }
        std::size_t mask = slots_.size() - 1;
        std::size_t s = static_cast<std::size_t>(polarmm::detail::mix64(key)) & mask;
        for (;; s = (s + 1) & mask) {
            Slot& sl = slots_[s];
            if (sl.key_plus_one == 0) {
                sl.key_plus_one = key + 1;
                sl.mass = mass;
                sl.sum_dw = sdw;
                sl.sum_dv = sdv;
                sl.unit_w = uw;
                sl.unit_v = uv;
                ++occupied_;
                return;
            }
            if (sl.key_plus_one == key + 1) {
                sl.mass += mass;
                sl.sum_dw += sdw;
                sl.sum_dv += sdv;
                if (sl.unit_w != uw) sl.unit_w = 0;
                if (sl.unit_v != uv) sl.unit_v = 0;
                return;
            }
        }
    }

    void coarsen() {
        std::vector<Slot> old;
        old.swap(slots_);
        slots_.assign(old.size(), Slot{});
        occupied_ = 0;
        --bits_;
        std::vector<const Slot*> groups;
        groups.reserve(old.size());
        for (const auto& sl : old)
            if (sl.key_plus_one) groups.push_back(&sl);
        std::sort(groups.begin(), groups.end(),
                  [](const Slot* a, const Slot* b) { return a->key_plus_one < b->key_plus_one; });
        for (const Slot* sl : groups) {
            std::uint64_t key = sl->key_plus_one - 1;
            std::uint64_t kw = (key >> 32) >> 1;
            std::uint64_t kv = (key & 0xffffffffULL) >> 1;
            insert_group((kw << 32) | kv, sl->mass, sl->sum_dw, sl->sum_dv, sl->unit_w,
                         sl->unit_v);
        }
    }

    void rehash(std::size_t cap) {
        std::vector<Slot> old;
        old.swap(slots_);
        slots_.assign(cap, Slot{});
        for (const auto& sl : old) {
            if (!sl.key_plus_one) continue;
            std::size_t mask = slots_.size() - 1;
            std::size_t s =
                static_cast<std::size_t>(polarmm::detail::mix64(sl.key_plus_one - 1)) & mask;
            while (slots_[s].key_plus_one) s = (s + 1) & mask;
            slots_[s] = sl;
        }
    }

    int bits_;
    std::size_t target_;
    std::size_t coarsen_limit_;
    std::size_t occupied_ = 0;
    std::vector<Slot> slots_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Conversions between the raw pair and the density form.

// Fails on symbols W can produce but V cannot: the metric posterior is
// undefined there and the pair has I(W,V) = -infinity outright.
inline PairDensity to_density(const ChannelPair& pair) {
    PairDensity d;
    for (std::size_t y = 0; y < pair.size(); ++y) {
        double qw = 0.5 * (pair.w.p0[y] + pair.w.p1[y]);
        if (qw <= 0.0) continue;
        double denv = pair.v.p0[y] + pair.v.p1[y];
        if (denv <= 0.0)
            throw DataError("symbol " + pair.w.label(y) +
                            " has W-mass but no V-mass; metric posterior undefined");
        double dw = (pair.w.p0[y] - pair.w.p1[y]) / (pair.w.p0[y] + pair.w.p1[y]);
        double dv = (pair.v.p0[y] - pair.v.p1[y]) / denv;
        d.atoms.push_back({qw, dw, dv});
    }
    detail::exact_merge(d.atoms);
    return d;
}

inline PairDensity to_density(const Bdmc& matched) { return to_density(matched_pair(matched)); }

// Rebuilds a concrete pair carrying this density. The W side is forced:
// W(y|x) = mass*(1 +- dw). The V side is scaled so both rows normalize; when
// the q_W-weighted mean of dv is nonzero the remaining V mass goes on one
// extra symbol W never produces, which vanishes again under to_density.
inline ChannelPair to_channel_pair(const PairDensity& d) {
    Bdmc w, v;
    double s = 0;
    for (const auto& a : d.atoms) s += a.mass * a.dv;
    double t = 1.0 / (1.0 + std::fabs(s));
    for (const auto& a : d.atoms) {
        w.p0.push_back(a.mass * (1.0 + a.dw));
        w.p1.push_back(a.mass * (1.0 - a.dw));
        double c = a.mass * t;
        v.p0.push_back(c * (1.0 + a.dv));
        v.p1.push_back(c * (1.0 - a.dv));
    }
    if (s != 0.0) {
        double r0 = 1.0 - t * (1.0 + s);
        double r1 = 1.0 - t * (1.0 - s);
        w.p0.push_back(0.0);
        w.p1.push_back(0.0);
        v.p0.push_back(std::max(r0, 0.0));
        v.p1.push_back(std::max(r1, 0.0));
    }
    return make_pair(std::move(w), std::move(v));
}

// ---------------------------------------------------------------------------
// The two polarization transforms.
//
// Density form: for atoms i, j the minus transform yields mass m_i*m_j with
// deltas (dw_i*dw_j, dv_i*dv_j); the plus transform, for each side bit
// u in {0,1} with sign s = (-1)^u, yields mass m_i*m_j*(1 + s*dw_i*dw_j)/2
// with deltas (d_i + s*d_j)/(1 + s*d_i*d_j) per coordinate.

template <typename Emit>
inline void emit_minus(const PairDensity& d, Emit&& emit) {
    for (const auto& a : d.atoms)
        for (const auto& b : d.atoms) emit(a.mass * b.mass, a.dw * b.dw, a.dv * b.dv);
}

template <typename Emit>
inline void emit_plus(const PairDensity& d, TransformDiag* diag, Emit&& emit) {
    for (const auto& a : d.atoms) {
        for (const auto& b : d.atoms) {
            double mm = a.mass * b.mass;
            for (double sign : {1.0, -1.0}) {
                double mass = mm * 0.5 * (1.0 + sign * a.dw * b.dw);
                if (mass <= 0.0) continue;
                double dw = detail::guard_unit((a.dw + sign * b.dw) / (1.0 + sign * a.dw * b.dw),
                                               a.dw, b.dw);
                double dv = detail::plus_delta(a.dv, b.dv, sign, diag);
                emit(mass, dw, dv);
            }
        }
    }
}

inline PairDensity pair_minus(const PairDensity& d) {
    PairDensity out;
    out.atoms.reserve(d.size() * d.size());
    emit_minus(d, [&](double m, double dw, double dv) { out.atoms.push_back({m, dw, dv}); });
    return out;
}

inline PairDensity pair_plus(const PairDensity& d, TransformDiag* diag = nullptr) {
    PairDensity out;
    out.atoms.reserve(2 * d.size() * d.size());
    emit_plus(d, diag, [&](double m, double dw, double dv) { out.atoms.push_back({m, dw, dv}); });
    return out;
}

// Raw-alphabet forms, used for small-scale cross-checks. The minus alphabet is
// ordered pairs (y1,y2); the plus alphabet appends the side bit u1.
inline ChannelPair pair_minus(const ChannelPair& p) {
    Bdmc w, v;
    const std::size_t n = p.size();
    for (std::size_t y1 = 0; y1 < n; ++y1) {
        for (std::size_t y2 = 0; y2 < n; ++y2) {
            w.p0.push_back(0.5 * (p.w.p0[y1] * p.w.p0[y2] + p.w.p1[y1] * p.w.p1[y2]));
            w.p1.push_back(0.5 * (p.w.p1[y1] * p.w.p0[y2] + p.w.p0[y1] * p.w.p1[y2]));
            v.p0.push_back(0.5 * (p.v.p0[y1] * p.v.p0[y2] + p.v.p1[y1] * p.v.p1[y2]));
            v.p1.push_back(0.5 * (p.v.p1[y1] * p.v.p0[y2] + p.v.p0[y1] * p.v.p1[y2]));
            w.labels.push_back("(" + p.w.label(y1) + "," + p.w.label(y2) + ")");
        }
    }
    v.labels = w.labels;
    return make_pair(std::move(w), std::move(v));
}

inline ChannelPair pair_plus(const ChannelPair& p) {
    Bdmc w, v;
    const std::size_t n = p.size();
    for (std::size_t y1 = 0; y1 < n; ++y1) {
        for (std::size_t y2 = 0; y2 < n; ++y2) {
            for (int u1 = 0; u1 < 2; ++u1) {
                // input u2: the first use carries u1 xor u2, the second u2
                w.p0.push_back(0.5 * p.w.w(y1, u1) * p.w.p0[y2]);
                w.p1.push_back(0.5 * p.w.w(y1, u1 ^ 1) * p.w.p1[y2]);
                v.p0.push_back(0.5 * p.v.w(y1, u1) * p.v.p0[y2]);
                v.p1.push_back(0.5 * p.v.w(y1, u1 ^ 1) * p.v.p1[y2]);
                w.labels.push_back("(" + p.w.label(y1) + "," + p.w.label(y2) + "|" +
                                   std::to_string(u1) + ")");
            }
        }
    }
    v.labels = w.labels;
    return make_pair(std::move(w), std::move(v));
}

// ---------------------------------------------------------------------------
// Alphabet control.

inline PairDensity reduce(PairDensity d, const MergePolicy& policy) {
    policy.check();
    detail::exact_merge(d.atoms);
    if (d.size() <= policy.max_atoms) return d;
    if (policy.mode == MergePolicy::Mode::exact_only)
        throw CapacityError("exact merge left " + std::to_string(d.size()) +
                            " atoms, above the limit of " + std::to_string(policy.max_atoms));
    detail::BinAccum accum(policy.grid_bits, policy.max_atoms);
    for (const auto& a : d.atoms) accum.insert(a.mass, a.dw, a.dv);
    PairDensity out;
    out.atoms = accum.finalize();
    return out;
}

namespace detail {

// Folded emitters for the streaming path: the transforms are symmetric under
// swapping the two atom arguments (the odd plus branch swaps into its sign
// mirror, which is a distinct atom), so unordered pairs carry double mass.
template <typename Emit>
inline void emit_minus_folded(const PairDensity& d, Emit&& emit) {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Atom& a = d.atoms[i];
        emit(a.mass * a.mass, a.dw * a.dw, a.dv * a.dv);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Atom& b = d.atoms[j];
            emit(2.0 * (a.mass * b.mass), a.dw * b.dw, a.dv * b.dv);
        }
    }
}

template <typename Emit>
inline void emit_plus_folded(const PairDensity& d, TransformDiag* diag, Emit&& emit) {
    const std::size_t n = d.size();
    auto one = [&](const Atom& a, const Atom& b, double sign, double fold) {
        double mass = fold * a.mass * b.mass * 0.5 * (1.0 + sign * a.dw * b.dw);
        if (mass <= 0.0) return;
        double dw = guard_unit((a.dw + sign * b.dw) / (1.0 + sign * a.dw * b.dw), a.dw, b.dw);
        double dv = plus_delta(a.dv, b.dv, sign, diag);
        emit(mass, dw, dv);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Atom& a = d.atoms[i];
        one(a, a, 1.0, 1.0);
        one(a, a, -1.0, 1.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Atom& b = d.atoms[j];
            one(a, b, 1.0, 2.0);  // even branch is swap-symmetric
            one(a, b, -1.0, 1.0);
            one(b, a, -1.0, 1.0);
        }
    }
}

// Transform + reduce without materializing the squared alphabet when it is
// already clear quantization will be needed.
inline PairDensity transform_reduced(const PairDensity& d, bool plus, const MergePolicy& policy,
                                     TransformDiag* diag) {
    std::size_t raw = d.size() * d.size() * (plus ? 2 : 1);
    bool stream = policy.mode == MergePolicy::Mode::quantized &&
                  raw > std::max<std::size_t>(4 * policy.max_atoms, 1u << 16);
    if (!stream) {
        PairDensity t = plus ? pair_plus(d, diag) : pair_minus(d);
        return reduce(std::move(t), policy);
    }
    BinAccum accum(policy.grid_bits, policy.max_atoms);
    auto emit = [&](double m, double dw, double dv) { accum.insert(m, dw, dv); };
    if (plus)
        emit_plus_folded(d, diag, emit);
    else
        emit_minus_folded(d, emit);
    PairDensity out;
    out.atoms = accum.finalize();
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Functionals of a density. Terms with zero W-side weight contribute zero;
// a positive-weight term hitting log2(0) makes the value -infinity.

namespace detail {

inline double info_term(double weight, double one_plus_delta) {
    if (weight <= 0.0) return 0.0;
    if (one_plus_delta <= 0.0) return neg_inf();
    return weight * std::log2(one_plus_delta);
}

}  // namespace detail

// I(W,V) of the density (the posterior-difference representation).
inline double mismatched_info(const PairDensity& d) {
    double acc = 0;
    for (const auto& a : d.atoms) {
        double t0 = detail::info_term(0.5 * a.mass * (1.0 + a.dw), 1.0 + a.dv);
        double t1 = detail::info_term(0.5 * a.mass * (1.0 - a.dw), 1.0 - a.dv);
        if (is_neg_inf(t0) || is_neg_inf(t1)) return neg_inf();
        acc += t0 + t1;
    }
    return acc;
}

// I(W) of the density's true-channel marginal; never -infinity.
inline double symmetric_capacity(const PairDensity& d) {
    double acc = 0;
    for (const auto& a : d.atoms) {
        acc += detail::info_term(0.5 * a.mass * (1.0 + a.dw), 1.0 + a.dw);
        acc += detail::info_term(0.5 * a.mass * (1.0 - a.dw), 1.0 - a.dw);
    }
    return acc;
}

// E[sqrt|D_V|] under q_W; the supermartingale statistic.
inline double sqrt_delta_mean(const PairDensity& d) {
    double acc = 0;
    for (const auto& a : d.atoms) acc += a.mass * std::sqrt(std::fabs(a.dv));
    return acc;
}

// ---------------------------------------------------------------------------
// Synthesis along a branch and full-tree evolution.

inline PairDensity synthesize(PairDensity d, const Branch& branch, const MergePolicy& policy,
                              TransformDiag* diag = nullptr) {
    policy.check();
    for (auto bit : branch.bits) d = detail::transform_reduced(d, bit != 0, policy, diag);
    return d;
}

// Independent scalar oracle for matched erasure channels: eps -> 2eps - eps^2
// under minus, eps -> eps^2 under plus.
inline double bec_analytic(double eps, const Branch& branch) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw UsageError("erasure probability must lie in [0,1]");
    for (auto bit : branch.bits) eps = bit ? eps * eps : 2.0 * eps - eps * eps;
    return eps;
}

struct IndexRecord {
    double info_wv = 0;  // I(W_N^(i), V_N^(i)), possibly -infinity
    double info_w = 0;   // I(W_N^(i))
    double mu = 0;       // E[sqrt|D_V|] at this index
    std::uint32_t atoms = 0;

    bool diverged() const { return is_neg_inf(info_wv); }
};

inline IndexRecord analyze(const PairDensity& d) {
    return {mismatched_info(d), symmetric_capacity(d), sqrt_delta_mean(d),
            static_cast<std::uint32_t>(d.size())};
}

// Visits every node of the synthesis tree down to `levels`, minus child
// first. visit(level, index, density) sees node `index` (0-based within its
// level; its binary expansion, MSB first, is the branch). Subtrees hanging off
// the frontier level may be visited concurrently, so the visitor must confine
// its writes to per-(level,index) slots or otherwise tolerate concurrency.
template <typename Visitor>
void walk_tree(const PairDensity& root, int levels, const MergePolicy& policy, Visitor&& visit,
               TransformDiag* diag = nullptr) {
    policy.check();
    auto dfs = [&](const PairDensity& d, int level, std::uint64_t index, TransformDiag* dg,
                   auto&& self) -> void {
        visit(level, index, d);
        if (level == levels) return;
        {
            PairDensity minus = detail::transform_reduced(d, false, policy, dg);
            self(minus, level + 1, index << 1, dg, self);
        }
        PairDensity plus = detail::transform_reduced(d, true, policy, dg);
        self(plus, level + 1, (index << 1) | 1, dg, self);
    };

    std::size_t workers = thread_count();
    int split = 0;
    while (split < levels && (static_cast<std::size_t>(1) << split) < 4 * workers) ++split;
    if (workers <= 1 || levels <= split) {
        dfs(root, 0, 0, diag, dfs);
        return;
    }
    struct Frame {
        PairDensity d;
        int level;
        std::uint64_t index;
    };
    std::vector<Frame> frontier;
    auto build = [&](const PairDensity& d, int level, std::uint64_t index, auto&& self) -> void {
        visit(level, index, d);
        if (level == split) {
            frontier.push_back({d, level, index});
            return;
        }
        {
            PairDensity minus = detail::transform_reduced(d, false, policy, diag);
            self(minus, level + 1, index << 1, self);
        }
        PairDensity plus = detail::transform_reduced(d, true, policy, diag);
        self(plus, level + 1, (index << 1) | 1, self);
    };
    build(root, 0, 0, build);
    std::vector<TransformDiag> diags(frontier.size());
    parallel_blocks(frontier.size(), [&](std::size_t i) {
        const Frame& f = frontier[i];
        TransformDiag* dg = &diags[i];
        {
            PairDensity minus = detail::transform_reduced(f.d, false, policy, dg);
            dfs(minus, f.level + 1, f.index << 1, dg, dfs);
        }
        PairDensity plus = detail::transform_reduced(f.d, true, policy, dg);
        dfs(plus, f.level + 1, (f.index << 1) | 1, dg, dfs);
    });
    if (diag)
        for (const auto& dg : diags) diag->degenerate_metric_atoms += dg.degenerate_metric_atoms;
}

struct EvolveResult {
    std::vector<IndexRecord> records;  // 2^levels entries, index order
    TransformDiag diag;
};

// All level-n synthesized pairs. records[i] belongs to 1-based index i+1,
// i.e. branch bits = binary expansion of i, MSB applied first.
inline EvolveResult evolve_all(const PairDensity& root, int levels, const MergePolicy& policy) {
    if (levels < 0) throw UsageError("level must be nonnegative");
    if (levels > 26) throw UsageError("level too deep to enumerate all indices");
    EvolveResult res;
    res.records.assign(static_cast<std::size_t>(1) << levels, IndexRecord{});
    walk_tree(
        root, levels, policy,
        [&](int level, std::uint64_t index, const PairDensity& d) {
            if (level == levels) res.records[index] = analyze(d);
        },
        &res.diag);
    return res;
}

inline EvolveResult evolve_all(const ChannelPair& pair, int levels, const MergePolicy& policy) {
    return evolve_all(to_density(pair), levels, policy);
}

}  // namespace polarmm
