#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarmm/analysis.hpp"
#include "polarmm/channel.hpp"
#include "polarmm/codec.hpp"
#include "polarmm/common.hpp"
#include "polarmm/compound.hpp"
#include "polarmm/construct.hpp"

namespace polarmm {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Number formatting: 17 significant digits round-trip doubles exactly.

inline std::string fmt17(double x) {
    if (is_neg_inf(x)) return "-inf";
    if (std::isinf(x)) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& s) {
    if (s == "-inf") return neg_inf();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    return std::stod(s);
}

// ---------------------------------------------------------------------------
// base64 (standard alphabet, padded) for packed bitsets: bit i lives in byte
// i/8 at position i%8 (least significant bit first).

namespace detail {

inline constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
        if (i + 1 < bytes.size()) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
        if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
        out.push_back(kB64Alphabet[(chunk >> 18) & 63]);
        out.push_back(kB64Alphabet[(chunk >> 12) & 63]);
        out.push_back(i + 1 < bytes.size() ? kB64Alphabet[(chunk >> 6) & 63] : '=');
        out.push_back(i + 2 < bytes.size() ? kB64Alphabet[chunk & 63] : '=');
    }
    return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string& text) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        if (c == '=') return -1;
        throw DataError("invalid base64 character");
    };
    std::vector<std::uint8_t> out;
    std::uint32_t chunk = 0;
    int have = 0;
    for (char c : text) {
        int v = value(c);
        if (v < 0) break;
        chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
        have += 6;
        if (have >= 8) {
            have -= 8;
            out.push_back(static_cast<std::uint8_t>((chunk >> have) & 0xff));
        }
    }
    return out;
}

inline std::string pack_bits(const std::vector<std::uint8_t>& bits) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    return base64_encode(bytes);
}

inline std::vector<std::uint8_t> unpack_bits(const std::string& b64, std::size_t count) {
    std::vector<std::uint8_t> bytes = base64_decode(b64);
    if (bytes.size() < (count + 7) / 8) throw DataError("bitset shorter than expected");
    std::vector<std::uint8_t> bits(count);
    for (std::size_t i = 0; i < count; ++i) bits[i] = (bytes[i / 8] >> (i % 8)) & 1u;
    return bits;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Channel and pair JSON:
//   {"outputs":[{"label":"0","w":[0.9,0.1]},...]}            single channel
//   {"outputs":[{"label":"0","w":[...],"v":[...]},...]}      (W,V) pair

inline json channel_to_json(const Bdmc& ch) {
    json outputs = json::array();
    for (std::size_t y = 0; y < ch.size(); ++y) {
        json sym;
        sym["label"] = ch.label(y);
        sym["w"] = {ch.p0[y], ch.p1[y]};
        outputs.push_back(sym);
    }
    return json{{"outputs", outputs}};
}

inline json pair_to_json(const ChannelPair& pair) {
    json outputs = json::array();
    for (std::size_t y = 0; y < pair.size(); ++y) {
        json sym;
        sym["label"] = pair.w.label(y);
        sym["w"] = {pair.w.p0[y], pair.w.p1[y]};
        sym["v"] = {pair.v.p0[y], pair.v.p1[y]};
        outputs.push_back(sym);
    }
    return json{{"outputs", outputs}};
}

inline Bdmc channel_from_json(const json& j, const char* row = "w") {
    if (!j.contains("outputs") || !j["outputs"].is_array())
        throw DataError("channel JSON needs an 'outputs' array");
    Bdmc ch;
    for (const auto& sym : j["outputs"]) {
        if (!sym.contains(row)) throw DataError(std::string("output symbol lacks the '") + row +
                                                "' probability pair");
        const auto& p = sym[row];
        if (!p.is_array() || p.size() != 2)
            throw DataError("symbol probabilities must be [p(y|0), p(y|1)]");
        ch.p0.push_back(p[0].get<double>());
        ch.p1.push_back(p[1].get<double>());
        ch.labels.push_back(sym.value("label", ""));
    }
    require_valid(ch, "loaded channel");
    return ch;
}

inline bool json_is_pair(const json& j) {
    return j.contains("outputs") && j["outputs"].is_array() && !j["outputs"].empty() &&
           j["outputs"][0].contains("v");
}

inline ChannelPair pair_from_json(const json& j) {
    return make_pair(channel_from_json(j, "w"), channel_from_json(j, "v"));
}

// ---------------------------------------------------------------------------
// Code JSON: {"n":10,"frozen_mask":"<base64>","frozen_values":"<base64>"}

inline json code_to_json(const PolarCode& code) {
    return json{{"n", code.levels},
                {"frozen_mask", detail::pack_bits(code.frozen_mask)},
                {"frozen_values", detail::pack_bits(code.frozen_values)}};
}

inline PolarCode code_from_json(const json& j) {
    PolarCode code;
    code.levels = j.at("n").get<int>();
    if (code.levels < 0 || code.levels > 30) throw DataError("code level out of range");
    std::size_t n = static_cast<std::size_t>(1) << code.levels;
    code.frozen_mask = detail::unpack_bits(j.at("frozen_mask").get<std::string>(), n);
    code.frozen_values = detail::unpack_bits(j.at("frozen_values").get<std::string>(), n);
    code.check();
    return code;
}

// ---------------------------------------------------------------------------
// Information set JSON.

inline json info_set_to_json(const InformationSet& set) {
    json j;
    j["n"] = set.levels;
    if (set.selection.mode == Selection::Mode::threshold)
        j["selection"] = {{"mode", "threshold"}, {"eps", set.selection.eps}};
    else
        j["selection"] = {{"mode", "top_k"}, {"k", set.selection.k}};
    if (set.source.kind == SourceInfo::Kind::exact)
        j["source"] = {{"mode", "exact"}};
    else
        j["source"] = {{"mode", "monte_carlo"},
                       {"trials", set.source.trials},
                       {"seed", set.source.seed}};
    j["indices"] = set.indices;
    json per = json::array();
    for (std::size_t i = 0; i < set.per_index.size(); ++i) {
        const IndexEstimate& e = set.per_index[i];
        json rec;
        rec["index"] = i + 1;
        if (is_neg_inf(e.value))
            rec["value"] = "-inf";
        else
            rec["value"] = e.value;
        if (set.source.kind == SourceInfo::Kind::monte_carlo) {
            rec["stderr"] = e.stderr_;
            rec["clamped"] = e.clamped;
        }
        per.push_back(rec);
    }
    j["per_index"] = per;
    return j;
}

inline InformationSet info_set_from_json(const json& j) {
    InformationSet set;
    set.levels = j.at("n").get<int>();
    const auto& sel = j.at("selection");
    if (sel.at("mode") == "threshold")
        set.selection = Selection::threshold(sel.at("eps").get<double>());
    else
        set.selection = Selection::top_k(sel.at("k").get<std::size_t>());
    const auto& src = j.at("source");
    if (src.at("mode") == "exact") {
        set.source = {SourceInfo::Kind::exact, 0, 0};
    } else {
        set.source = {SourceInfo::Kind::monte_carlo, src.at("trials").get<std::uint64_t>(),
                      src.at("seed").get<std::uint64_t>()};
    }
    set.indices = j.at("indices").get<std::vector<std::uint32_t>>();
    for (const auto& rec : j.at("per_index")) {
        IndexEstimate e;
        if (rec.at("value").is_string())
            e.value = parse_double(rec.at("value").get<std::string>());
        else
            e.value = rec.at("value").get<double>();
        e.stderr_ = rec.value("stderr", 0.0);
        e.clamped = rec.value("clamped", std::uint64_t{0});
        set.per_index.push_back(e);
    }
    if (set.per_index.size() != set.block_length())
        throw DataError("information set per-index list does not match the level");
    for (auto idx : set.indices)
        if (idx == 0 || idx > set.block_length())
            throw DataError("information set index out of range");
    return set;
}

// ---------------------------------------------------------------------------
// Property report JSON.

inline json property_report_to_json(const PropertyReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"instances", c.instances},
                          {"worst_residual", c.worst_residual},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"skipped", c.skipped}});
    }
    return json{{"seed", rep.seed}, {"checks", checks}};
}

inline PropertyReport property_report_from_json(const json& j) {
    PropertyReport rep;
    rep.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& cj : j.at("checks")) {
        CheckResult c;
        c.name = cj.at("name").get<std::string>();
        c.instances = cj.at("instances").get<std::uint64_t>();
        c.worst_residual = cj.at("worst_residual").get<double>();
        c.tolerance = cj.at("tolerance").get<double>();
        c.pass = cj.at("pass").get<bool>();
        c.skipped = cj.at("skipped").get<std::uint64_t>();
        rep.checks.push_back(c);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Compound experiment report JSON.

inline json experiment_report_to_json(const ExperimentReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows) {
        json row{{"param", r.param},     {"label", r.label}, {"info_w", r.info_w},
                 {"info_wv", r.info_wv}, {"set_size", r.set_size}, {"rate", r.rate},
                 {"fer", r.fer},         {"ber", r.ber},     {"ci95", r.ci95}};
        if (r.union_bound) row["union_bound"] = *r.union_bound;
        rows.push_back(row);
    }
    return json{{"metric",
                 {{"label", rep.metric.label},
                  {"param", rep.metric.param},
                  {"capacity", rep.metric.capacity},
                  {"channel", channel_to_json(rep.metric.channel)}}},
                {"certificate",
                 {{"min_capacity", rep.certificate.min_capacity},
                  {"worst_violation", rep.certificate.worst_violation},
                  {"worst_member", rep.certificate.worst_member},
                  {"tested_grid", rep.certificate.tested_grid},
                  {"valid", rep.certificate.valid()}}},
                {"n", rep.levels},
                {"rate", rep.rate},
                {"trials", rep.trials},
                {"frames", rep.frames},
                {"seed", rep.seed},
                {"warnings", rep.warnings},
                {"rows", rows}};
}

inline ExperimentReport experiment_report_from_json(const json& j) {
    ExperimentReport rep;
    rep.metric.label = j.at("metric").at("label").get<std::string>();
    rep.metric.param = j.at("metric").at("param").get<double>();
    rep.metric.capacity = j.at("metric").at("capacity").get<double>();
    rep.metric.channel = channel_from_json(j.at("metric").at("channel"));
    rep.certificate.min_capacity = j.at("certificate").at("min_capacity").get<double>();
    rep.certificate.worst_violation = j.at("certificate").at("worst_violation").get<double>();
    rep.certificate.worst_member = j.at("certificate").at("worst_member").get<std::string>();
    rep.certificate.tested_grid = j.at("certificate").at("tested_grid").get<std::string>();
    rep.levels = j.at("n").get<int>();
    rep.rate = j.at("rate").get<double>();
    rep.trials = j.at("trials").get<std::uint64_t>();
    rep.frames = j.at("frames").get<std::uint64_t>();
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& rj : j.at("rows")) {
        CompoundRow r;
        r.param = rj.at("param").get<double>();
        r.label = rj.at("label").get<std::string>();
        r.info_w = rj.at("info_w").get<double>();
        r.info_wv = rj.at("info_wv").get<double>();
        r.set_size = rj.at("set_size").get<std::size_t>();
        r.rate = rj.at("rate").get<double>();
        r.fer = rj.at("fer").get<double>();
        r.ber = rj.at("ber").get<double>();
        r.ci95 = rj.at("ci95").get<double>();
        if (rj.contains("union_bound")) r.union_bound = rj.at("union_bound").get<double>();
        rep.rows.push_back(r);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// File helpers.

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("cannot parse " + path + ": " + e.what());
    }
    return j;
}

inline void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << "\n";
}

inline Bdmc load_channel(const std::string& path) { return channel_from_json(load_json(path)); }

inline ChannelPair load_pair(const std::string& path) {
    json j = load_json(path);
    if (!json_is_pair(j)) throw DataError(path + " holds a single channel, not a (W,V) pair");
    return pair_from_json(j);
}

// ---------------------------------------------------------------------------
// CSV writing. Lines starting with '#' carry metadata (config echo and
// timestamp); the body - header row plus data rows - is what reproducibility
// compares, and it is byte-identical for identical config and seed.

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw DataError("cannot write " + path);
    }

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void header(const std::vector<std::string>& cols) { write_row(cols); }

    void row(const std::vector<std::string>& cells) { write_row(cells); }

  private:
    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

    std::ofstream out_;
};

// The CSV body of a file: everything below the '#' metadata block.
inline std::string csv_body(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string body, line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        body += line;
        body += "\n";
    }
    return body;
}

}  // namespace polarmm
