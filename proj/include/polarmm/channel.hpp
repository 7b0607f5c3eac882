#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polarmm/common.hpp"
#include "polarmm/rng.hpp"

namespace polarmm {

// Binary-input discrete memoryless channel with a finite, indexed output
// alphabet. p0[y] and p1[y] are the transition probabilities W(y|0), W(y|1);
// each row sums to one. Labels are optional and purely cosmetic.
struct Bdmc {
    std::vector<double> p0;
    std::vector<double> p1;
    std::vector<std::string> labels;

    std::size_t size() const { return p0.size(); }

    double w(std::size_t y, int x) const { return x == 0 ? p0[y] : p1[y]; }

    std::string label(std::size_t y) const {
        if (y < labels.size() && !labels[y].empty()) return labels[y];
        return "y" + std::to_string(y);
    }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }

    std::string to_string() const {
        if (ok()) return "ok";
        std::string out;
        for (const auto& v : violations) {
            if (!out.empty()) out += "; ";
            out += v;
        }
        return out;
    }
};

inline ValidationReport validate(const Bdmc& ch) {
    ValidationReport rep;
    if (ch.size() == 0) {
        rep.violations.push_back("channel has no output symbols");
        return rep;
    }
    if (ch.p1.size() != ch.p0.size()) {
        rep.violations.push_back("input rows have different lengths");
        return rep;
    }
    double s0 = 0, s1 = 0;
    for (std::size_t y = 0; y < ch.size(); ++y) {
        for (int x = 0; x < 2; ++x) {
            double p = ch.w(y, x);
            if (!(p >= 0.0) || p > 1.0 || !std::isfinite(p)) {
                std::ostringstream os;
                os << "symbol " << ch.label(y) << " row " << x << " entry " << p
                   << " outside [0,1]";
                rep.violations.push_back(os.str());
            }
        }
        s0 += ch.p0[y];
        s1 += ch.p1[y];
    }
    if (std::fabs(s0 - 1.0) > kProbTol) {
        std::ostringstream os;
        os << "row 0 sums to " << s0;
        rep.violations.push_back(os.str());
    }
    if (std::fabs(s1 - 1.0) > kProbTol) {
        std::ostringstream os;
        os << "row 1 sums to " << s1;
        rep.violations.push_back(os.str());
    }
    return rep;
}

inline void require_valid(const Bdmc& ch, const char* what = "channel") {
    ValidationReport rep = validate(ch);
    if (!rep.ok()) throw DataError(std::string(what) + " invalid: " + rep.to_string());
}

enum class StandardKind { bsc, bec };

inline Bdmc standard_channel(StandardKind kind, double param) {
    if (!(param >= 0.0 && param <= 1.0))
        throw UsageError("channel parameter must lie in [0,1]");
    Bdmc ch;
    if (kind == StandardKind::bsc) {
        ch.p0 = {1.0 - param, param};
        ch.p1 = {param, 1.0 - param};
        ch.labels = {"0", "1"};
    } else {
        ch.p0 = {1.0 - param, param, 0.0};
        ch.p1 = {0.0, param, 1.0 - param};
        ch.labels = {"0", "e", "1"};
    }
    return ch;
}

inline Bdmc bsc(double p) { return standard_channel(StandardKind::bsc, p); }
inline Bdmc bec(double eps) { return standard_channel(StandardKind::bec, eps); }

// Output distribution under uniform inputs and the posterior difference
// W(0|y) - W(1|y) = (W(y|0) - W(y|1)) / (W(y|0) + W(y|1)).
struct SymbolStats {
    double q;
    double delta;
};

inline SymbolStats stats(const Bdmc& ch, std::size_t y) {
    if (y >= ch.size()) throw UsageError("symbol index out of range");
    double a = ch.p0[y], b = ch.p1[y];
    double q = 0.5 * (a + b);
    if (q <= 0.0)
        throw DataError("symbol " + ch.label(y) + " has zero mass; posterior difference undefined");
    return {q, (a - b) / (a + b)};
}

// A (true channel, metric channel) pair over one shared output alphabet.
// Output symbols that carry no mass under either channel are dropped at
// construction; dropped_symbols records how many.
struct ChannelPair {
    Bdmc w;
    Bdmc v;
    std::size_t dropped_symbols = 0;

    std::size_t size() const { return w.size(); }
};

inline ChannelPair make_pair(Bdmc w, Bdmc v) {
    require_valid(w, "true channel W");
    require_valid(v, "metric channel V");
    if (w.size() != v.size())
        throw DataError("W and V must share the output alphabet (sizes " +
                        std::to_string(w.size()) + " vs " + std::to_string(v.size()) + ")");
    ChannelPair pair;
    for (std::size_t y = 0; y < w.size(); ++y) {
        double qw = w.p0[y] + w.p1[y];
        double qv = v.p0[y] + v.p1[y];
        if (qw == 0.0 && qv == 0.0) {
            ++pair.dropped_symbols;
            continue;
        }
        pair.w.p0.push_back(w.p0[y]);
        pair.w.p1.push_back(w.p1[y]);
        pair.v.p0.push_back(v.p0[y]);
        pair.v.p1.push_back(v.p1[y]);
        pair.w.labels.push_back(w.label(y));
        pair.v.labels.push_back(v.label(y));
    }
    if (pair.size() == 0) throw DataError("pair has no output symbols with mass");
    return pair;
}

inline ChannelPair matched_pair(const Bdmc& w) { return make_pair(w, w); }

// I(W) = sum_y sum_x (1/2) W(y|x) log2(W(y|x)/q(y)), in bits.
inline double symmetric_capacity(const Bdmc& ch) {
    double acc = 0;
    for (std::size_t y = 0; y < ch.size(); ++y) {
        double q = 0.5 * (ch.p0[y] + ch.p1[y]);
        if (q <= 0.0) continue;
        for (int x = 0; x < 2; ++x) {
            double p = ch.w(y, x);
            if (p > 0.0) acc += 0.5 * p * std::log2(p / q);
        }
    }
    return acc;
}

struct MismatchedInfoForms {
    double definition;  // sum_y sum_x (1/2) W(y|x) log2(V(y|x)/q_V(y))
    double lemma;       // (1/2) sum_y W(y|0) log2(1+D_V(y)) + W(y|1) log2(1-D_V(y))
};

// Both routes to I(W,V). Either both are finite (and must agree) or both are
// -infinity, which happens exactly when W puts mass where V puts none.
inline MismatchedInfoForms mismatched_info_forms(const ChannelPair& pair) {
    const Bdmc& w = pair.w;
    const Bdmc& v = pair.v;
    double definition = 0;
    bool def_inf = false;
    for (std::size_t y = 0; y < w.size() && !def_inf; ++y) {
        double qv = 0.5 * (v.p0[y] + v.p1[y]);
        for (int x = 0; x < 2; ++x) {
            double pw = w.w(y, x);
            if (pw <= 0.0) continue;
            double pv = v.w(y, x);
            if (pv <= 0.0) {
                def_inf = true;
                break;
            }
            definition += 0.5 * pw * std::log2(pv / qv);
        }
    }
    double lemma = 0;
    bool lem_inf = false;
    for (std::size_t y = 0; y < w.size() && !lem_inf; ++y) {
        double qw0 = w.p0[y], qw1 = w.p1[y];
        if (qw0 <= 0.0 && qw1 <= 0.0) continue;
        double denom = v.p0[y] + v.p1[y];
        if (denom <= 0.0) {
            lem_inf = true;  // W reaches a symbol V cannot produce
            break;
        }
        double dv = (v.p0[y] - v.p1[y]) / denom;
        if (qw0 > 0.0) {
            if (1.0 + dv <= 0.0) {
                lem_inf = true;
                break;
            }
            lemma += 0.5 * qw0 * std::log2(1.0 + dv);
        }
        if (qw1 > 0.0) {
            if (1.0 - dv <= 0.0) {
                lem_inf = true;
                break;
            }
            lemma += 0.5 * qw1 * std::log2(1.0 - dv);
        }
    }
    return {def_inf ? neg_inf() : definition, lem_inf ? neg_inf() : lemma};
}

// Mismatched information I(W,V) in bits, at most 1, possibly -infinity.
// Computed along both routes as a self-check; disagreement beyond 1e-12
// indicates a numerically pathological channel file and is rejected.
inline double mismatched_info(const ChannelPair& pair) {
    MismatchedInfoForms f = mismatched_info_forms(pair);
    if (is_neg_inf(f.definition) != is_neg_inf(f.lemma))
        throw DataError("mismatched information self-check failed: one form diverged");
    if (!is_neg_inf(f.definition) && std::fabs(f.definition - f.lemma) > 1e-12)
        throw DataError("mismatched information self-check failed: forms differ by " +
                        std::to_string(std::fabs(f.definition - f.lemma)));
    return f.definition;
}

// Average error probability of a single channel use under ML decoding with
// respect to the metric V: decide 0 iff D_V(y) > 0, 1 iff D_V(y) < 0, fair
// coin at D_V(y) = 0 (contributes half its mass). Symbols V cannot produce
// carry no metric information and count as ties.
inline double pe_single_use(const ChannelPair& pair) {
    const Bdmc& w = pair.w;
    const Bdmc& v = pair.v;
    double pe = 0;
    for (std::size_t y = 0; y < w.size(); ++y) {
        double denom = v.p0[y] + v.p1[y];
        double dv = denom > 0.0 ? (v.p0[y] - v.p1[y]) / denom : 0.0;
        if (dv > 0.0) {
            pe += 0.5 * w.p1[y];
        } else if (dv < 0.0) {
            pe += 0.5 * w.p0[y];
        } else {
            pe += 0.25 * (w.p0[y] + w.p1[y]);
        }
    }
    return pe;
}

// Searches for an involutive output permutation pi with W(y|1) = W(pi(y)|0)
// and V(y|1) = V(pi(y)|0) for every y. Backtracking over candidate partners;
// alphabets here are small.
inline std::optional<std::vector<std::size_t>> check_common_symmetry(const ChannelPair& pair,
                                                                     double tol = 1e-12) {
    const std::size_t n = pair.size();
    const Bdmc& w = pair.w;
    const Bdmc& v = pair.v;
    auto compatible = [&](std::size_t y, std::size_t z) {
        return std::fabs(w.p1[y] - w.p0[z]) <= tol && std::fabs(v.p1[y] - v.p0[z]) <= tol &&
               std::fabs(w.p1[z] - w.p0[y]) <= tol && std::fabs(v.p1[z] - v.p0[y]) <= tol;
    };
    std::vector<std::size_t> pi(n, n);
    std::function<bool(std::size_t)> match = [&](std::size_t y) -> bool {
        while (y < n && pi[y] != n) ++y;
        if (y == n) return true;
        for (std::size_t z = y; z < n; ++z) {
            if (pi[z] != n && z != y) continue;
            if (!compatible(y, z)) continue;
            pi[y] = z;
            pi[z] = y;
            if (match(y + 1)) return true;
            pi[y] = n;
            if (z != y) pi[z] = n;
        }
        return false;
    };
    if (!match(0)) return std::nullopt;
    return pi;
}

inline bool is_symmetric(const Bdmc& ch, double tol = 1e-12) {
    return check_common_symmetry(matched_pair(ch), tol).has_value();
}

// Test/diagnostic corpus generator: rows drawn from the flat simplex over a
// fixed alphabet size.
inline Bdmc random_bdmc_sized(CounterRng& rng, std::size_t symbols) {
    Bdmc ch;
    ch.p0.resize(symbols);
    ch.p1.resize(symbols);
    for (auto* row : {&ch.p0, &ch.p1}) {
        double sum = 0;
        for (auto& p : *row) {
            p = -std::log1p(-rng.next_open());
            sum += p;
        }
        for (auto& p : *row) p /= sum;
    }
    return ch;
}

inline Bdmc random_bdmc(CounterRng& rng, std::size_t min_symbols = 2, std::size_t max_symbols = 8) {
    std::size_t symbols = min_symbols + rng.next_below(max_symbols - min_symbols + 1);
    return random_bdmc_sized(rng, symbols);
}

inline ChannelPair random_pair(CounterRng& rng, std::size_t min_symbols = 2,
                               std::size_t max_symbols = 8) {
    std::size_t symbols = min_symbols + rng.next_below(max_symbols - min_symbols + 1);
    Bdmc w = random_bdmc_sized(rng, symbols);
    Bdmc v = random_bdmc_sized(rng, symbols);
    return make_pair(std::move(w), std::move(v));
}

}  // namespace polarmm
