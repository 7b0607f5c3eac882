#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polarmm/channel.hpp"
#include "polarmm/common.hpp"
#include "polarmm/parallel.hpp"
#include "polarmm/rng.hpp"

namespace polarmm {

// Code description: which of the N = 2^levels input positions are frozen and
// to what values. Position i (0-based) carries synthesized index i+1.
struct PolarCode {
    int levels = 0;
    std::vector<std::uint8_t> frozen_mask;    // 1 = frozen
    std::vector<std::uint8_t> frozen_values;  // used where frozen

    std::size_t block_length() const { return static_cast<std::size_t>(1) << levels; }

    std::size_t info_length() const {
        std::size_t k = 0;
        for (auto f : frozen_mask) k += !f;
        return k;
    }

    void check() const {
        if (levels < 0 || levels > 30) throw DataError("code level out of range");
        if (frozen_mask.size() != block_length() || frozen_values.size() != block_length())
            throw DataError("frozen mask/value length does not match the block length");
    }

    static PolarCode rate_zero(int levels) {
        PolarCode c;
        c.levels = levels;
        c.frozen_mask.assign(static_cast<std::size_t>(1) << levels, 1);
        c.frozen_values.assign(static_cast<std::size_t>(1) << levels, 0);
        return c;
    }
};

// x = u F^{xn} via the in-place butterfly; stage order is irrelevant over
// GF(2). Self-inverse, so encode(encode(u)) = u.
inline void butterfly_transform(std::vector<std::uint8_t>& u) {
    const std::size_t n = u.size();
    for (std::size_t inc = 1; inc < n; inc <<= 1)
        for (std::size_t i = 0; i < n; i += 2 * inc)
            for (std::size_t j = i; j < i + inc; ++j) u[j] ^= u[j + inc];
}

inline std::vector<std::uint8_t> assemble_input(const PolarCode& code,
                                                std::span<const std::uint8_t> info_bits) {
    code.check();
    if (info_bits.size() != code.info_length())
        throw UsageError("expected " + std::to_string(code.info_length()) + " info bits, got " +
                         std::to_string(info_bits.size()));
    std::vector<std::uint8_t> u(code.block_length());
    std::size_t k = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = code.frozen_mask[i] ? code.frozen_values[i] : info_bits[k++];
    return u;
}

inline std::vector<std::uint8_t> encode(const PolarCode& code,
                                        std::span<const std::uint8_t> info_bits) {
    std::vector<std::uint8_t> u = assemble_input(code, info_bits);
    butterfly_transform(u);
    return u;
}

// The decoder's entire channel knowledge: the metric-channel posterior
// difference per output symbol. Symbols the metric channel cannot produce get
// delta 0 (no information).
struct MetricTable {
    std::vector<double> delta;
    std::vector<std::string> labels;

    static MetricTable from_channel(const Bdmc& v) {
        require_valid(v, "metric channel");
        MetricTable t;
        t.delta.resize(v.size());
        t.labels.resize(v.size());
        for (std::size_t y = 0; y < v.size(); ++y) {
            double den = v.p0[y] + v.p1[y];
            t.delta[y] = den > 0.0 ? (v.p0[y] - v.p1[y]) / den : 0.0;
            t.labels[y] = v.label(y);
        }
        return t;
    }

    std::size_t size() const { return delta.size(); }
};

struct DecodeResult {
    std::vector<std::uint8_t> u_hat;
    std::vector<std::uint8_t> info_hat;
};

// Successive cancellation in the posterior-difference domain. Combine step:
// D- = D1*D2. Update step with the side bit u already decided (sign
// s = (-1)^u applied to the branch that carries the xor):
// D+ = (s*D1 + D2) / (1 + s*D1*D2). Decisions take 0 on ties.
class ScDecoder {
  public:
    ScDecoder(const PolarCode& code, const MetricTable& metric) : code_(code), metric_(metric) {
        code_.check();
        const std::size_t n = code_.block_length();
        soft_.resize(2 * n);
        hard_.resize(4 * n);
        u_hat_.resize(n);
    }

    DecodeResult decode(std::span<const std::uint32_t> y) {
        load(y);
        genie_mode_ = false;
        run(&soft_[0], code_.block_length(), 0, &hard_[0], &soft_[code_.block_length()],
            &hard_[code_.block_length()]);
        DecodeResult res;
        res.u_hat = u_hat_;
        res.info_hat.reserve(code_.info_length());
        for (std::size_t i = 0; i < u_hat_.size(); ++i)
            if (!code_.frozen_mask[i]) res.info_hat.push_back(u_hat_[i]);
        return res;
    }

    // Genie-aided pass: every past decision is replaced by the true input
    // bit, and the posterior difference seen at each decision point is
    // recorded into deltas (size N).
    void genie(std::span<const std::uint32_t> y, std::span<const std::uint8_t> true_u,
               std::span<double> deltas) {
        if (true_u.size() != code_.block_length() || deltas.size() != code_.block_length())
            throw UsageError("genie buffers must match the block length");
        load(y);
        genie_mode_ = true;
        true_u_ = true_u.data();
        deltas_ = deltas.data();
        run(&soft_[0], code_.block_length(), 0, &hard_[0], &soft_[code_.block_length()],
            &hard_[code_.block_length()]);
    }

  private:
    void load(std::span<const std::uint32_t> y) {
        if (y.size() != code_.block_length())
            throw UsageError("received word length does not match the block length");
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] >= metric_.size())
                throw DataError("received symbol index " + std::to_string(y[i]) +
                                " not present in the metric table");
            soft_[i] = metric_.delta[y[i]];
        }
    }

    static double update(double d1, double d2, std::uint8_t u) {
        double s = u ? -1.0 : 1.0;
        double num = s * d1 + d2;
        double den = 1.0 + s * d1 * d2;
        if (std::fabs(den) < 1e-300) {
            if (num > 0.0) return 1.0;
            if (num < 0.0) return -1.0;
            return 0.0;
        }
        return num / den;
    }

    // soft: len posterior differences for this subcode. xhat: len re-encoded
    // hard decisions (x domain) written on return. cs/ch: scratch regions.
    void run(double* soft, std::size_t len, std::size_t ubase, std::uint8_t* xhat, double* cs,
             std::uint8_t* ch) {
        if (len == 1) {
            std::uint8_t bit;
            if (genie_mode_) {
                deltas_[ubase] = soft[0];
                bit = true_u_[ubase];
            } else if (code_.frozen_mask[ubase]) {
                bit = code_.frozen_values[ubase];
            } else {
                bit = soft[0] >= 0.0 ? 0 : 1;
            }
            u_hat_[ubase] = bit;
            xhat[0] = bit;
            return;
        }
        const std::size_t half = len / 2;
        std::uint8_t* xa = ch;
        std::uint8_t* xb = ch + half;
        for (std::size_t i = 0; i < half; ++i) cs[i] = soft[i] * soft[i + half];
        run(cs, half, ubase, xa, cs + half, ch + len);
        for (std::size_t i = 0; i < half; ++i) cs[i] = update(soft[i], soft[i + half], xa[i]);
        run(cs, half, ubase + half, xb, cs + half, ch + len);
        for (std::size_t i = 0; i < half; ++i) {
            xhat[i] = xa[i] ^ xb[i];
            xhat[i + half] = xb[i];
        }
    }

    PolarCode code_;
    MetricTable metric_;
    std::vector<double> soft_;
    std::vector<std::uint8_t> hard_;
    std::vector<std::uint8_t> u_hat_;
    bool genie_mode_ = false;
    const std::uint8_t* true_u_ = nullptr;
    double* deltas_ = nullptr;
};

inline DecodeResult sc_decode(const PolarCode& code, const MetricTable& metric,
                              std::span<const std::uint32_t> y) {
    ScDecoder dec(code, metric);
    return dec.decode(y);
}

// Inverse-CDF sampling of channel outputs given the input bit.
class ChannelSampler {
  public:
    explicit ChannelSampler(const Bdmc& ch) {
        cdf0_ = cumulative(ch.p0);
        cdf1_ = cumulative(ch.p1);
    }

    std::uint32_t sample(int x, double u) const {
        const auto& cdf = x == 0 ? cdf0_ : cdf1_;
        for (std::size_t y = 0; y + 1 < cdf.size(); ++y)
            if (u < cdf[y]) return static_cast<std::uint32_t>(y);
        return static_cast<std::uint32_t>(cdf.size() - 1);
    }

  private:
    static std::vector<double> cumulative(const std::vector<double>& row) {
        std::vector<double> cdf(row.size());
        double acc = 0;
        for (std::size_t y = 0; y < row.size(); ++y) {
            acc += row[y];
            cdf[y] = acc;
        }
        return cdf;
    }

    std::vector<double> cdf0_, cdf1_;
};

struct FrameResult {
    std::uint32_t info_bit_errors = 0;
    bool frame_error = false;
    std::optional<std::uint32_t> first_error_index;  // position within the info bits
};

struct SimulationResult {
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t bit_errors = 0;
    double fer = 0;
    double ber = 0;
    double ci95 = 0;  // normal-approximation half width on FER
    std::vector<FrameResult> per_frame;  // filled only when requested
};

// Transmits random frames of the given code over w, decodes with the metric
// table, and counts info-bit and frame errors. Frame f draws its bits and
// noise from the stream (seed, "frame", f), so results do not depend on the
// thread count. A code with no info bits reports zero errors by convention.
inline SimulationResult simulate_frames(const Bdmc& w, const PolarCode& code,
                                        const MetricTable& metric, std::uint64_t frames,
                                        std::uint64_t seed, bool keep_frames = false) {
    if (frames < 1) throw UsageError("need at least one frame");
    require_valid(w, "true channel W");
    if (w.size() != metric.size())
        throw DataError("metric table does not cover the channel alphabet");
    code.check();
    SimulationResult res;
    res.frames = frames;
    const std::size_t k = code.info_length();
    if (keep_frames) res.per_frame.assign(frames, FrameResult{});
    if (k == 0) return res;  // rate-0 convention

    const std::size_t n = code.block_length();
    const std::size_t blocks = (frames + kFrameBlock - 1) / kFrameBlock;
    std::vector<std::uint64_t> block_frame_errors(blocks, 0);
    std::vector<std::uint64_t> block_bit_errors(blocks, 0);
    ChannelSampler sampler(w);
    parallel_blocks(blocks, [&](std::size_t blk) {
        ScDecoder dec(code, metric);
        std::vector<std::uint8_t> info(k);
        std::vector<std::uint32_t> y(n);
        std::uint64_t fe = 0, be = 0;
        const std::uint64_t lo = blk * kFrameBlock;
        const std::uint64_t hi = std::min<std::uint64_t>(lo + kFrameBlock, frames);
        for (std::uint64_t f = lo; f < hi; ++f) {
            CounterRng rng = CounterRng::derive(seed, "frame", f);
            for (auto& b : info) b = static_cast<std::uint8_t>(rng.next_bit());
            std::vector<std::uint8_t> x = encode(code, info);
            for (std::size_t i = 0; i < n; ++i) y[i] = sampler.sample(x[i], rng.next_double());
            DecodeResult out = dec.decode(y);
            FrameResult fr;
            for (std::size_t i = 0; i < k; ++i) {
                if (out.info_hat[i] != info[i]) {
                    ++fr.info_bit_errors;
                    if (!fr.first_error_index) fr.first_error_index = static_cast<std::uint32_t>(i);
                }
            }
            fr.frame_error = fr.info_bit_errors > 0;
            fe += fr.frame_error;
            be += fr.info_bit_errors;
            if (keep_frames) res.per_frame[f] = fr;
        }
        block_frame_errors[blk] = fe;
        block_bit_errors[blk] = be;
    });
    for (std::size_t b = 0; b < blocks; ++b) {
        res.frame_errors += block_frame_errors[b];
        res.bit_errors += block_bit_errors[b];
    }
    res.fer = static_cast<double>(res.frame_errors) / static_cast<double>(frames);
    res.ber = static_cast<double>(res.bit_errors) / (static_cast<double>(frames) * k);
    res.ci95 = 1.96 * std::sqrt(res.fer * (1.0 - res.fer) / static_cast<double>(frames));
    return res;
}

struct GenieSample {
    std::uint8_t u;
    double delta;
};

struct GenieTrajectories {
    int levels = 0;
    std::vector<std::vector<GenieSample>> per_index;  // [N][trials]
};

namespace detail {

// Shared genie loop: uniform input word through W, SC pass with the metric of
// V fed the true bits, sink(trial, u, deltas) per trial. Trials are chunked
// into fixed blocks; the sink is called from worker threads but each trial
// index exactly once.
template <typename Sink>
void genie_trials(const Bdmc& w, const Bdmc& v, int levels, std::uint64_t trials,
                  std::uint64_t seed, Sink&& sink) {
    if (trials < 1) throw UsageError("need at least one trial");
    require_valid(w, "true channel W");
    require_valid(v, "metric channel V");
    if (w.size() != v.size()) throw DataError("W and V must share the output alphabet");
    PolarCode free_code;
    free_code.levels = levels;
    free_code.frozen_mask.assign(static_cast<std::size_t>(1) << levels, 0);
    free_code.frozen_values.assign(static_cast<std::size_t>(1) << levels, 0);
    MetricTable metric = MetricTable::from_channel(v);
    ChannelSampler sampler(w);
    const std::size_t n = free_code.block_length();
    const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    parallel_blocks(blocks, [&](std::size_t blk) {
        ScDecoder dec(free_code, metric);
        std::vector<std::uint8_t> u(n);
        std::vector<std::uint32_t> y(n);
        std::vector<double> deltas(n);
        const std::uint64_t lo = blk * kTrialBlock;
        const std::uint64_t hi = std::min<std::uint64_t>(lo + kTrialBlock, trials);
        for (std::uint64_t t = lo; t < hi; ++t) {
            CounterRng rng = CounterRng::derive(seed, "genie-trial", t);
            for (auto& b : u) b = static_cast<std::uint8_t>(rng.next_bit());
            std::vector<std::uint8_t> x = u;
            butterfly_transform(x);
            for (std::size_t i = 0; i < n; ++i) y[i] = sampler.sample(x[i], rng.next_double());
            dec.genie(y, u, deltas);
            sink(t, u, deltas);
        }
    });
}

}  // namespace detail

// Per-index samples of (true bit, decision-point posterior difference).
// Memory is O(N * trials); intended for small exploratory scales.
inline GenieTrajectories genie_trajectories(const Bdmc& w, const Bdmc& v, int levels,
                                            std::uint64_t trials, std::uint64_t seed) {
    GenieTrajectories traj;
    traj.levels = levels;
    const std::size_t n = static_cast<std::size_t>(1) << levels;
    traj.per_index.assign(n, std::vector<GenieSample>(trials));
    detail::genie_trials(w, v, levels, trials, seed,
                         [&](std::uint64_t t, const std::vector<std::uint8_t>& u,
                             const std::vector<double>& deltas) {
                             for (std::size_t i = 0; i < n; ++i)
                                 traj.per_index[i][t] = {u[i], deltas[i]};
                         });
    return traj;
}

}  // namespace polarmm
