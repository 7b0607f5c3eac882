#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polarmm/analysis.hpp"
#include "polarmm/channel.hpp"
#include "polarmm/codec.hpp"
#include "polarmm/common.hpp"
#include "polarmm/compound.hpp"
#include "polarmm/construct.hpp"
#include "polarmm/density.hpp"
#include "polarmm/io.hpp"
#include "polarmm/parallel.hpp"

namespace polarmm::cli {

// Reconstructable run parameters, echoed into every artifact header.
struct ConfigEcho {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
    void add(const std::string& key, double value) { entries.emplace_back(key, fmt17(value)); }
    void add(const std::string& key, std::uint64_t value) {
        entries.emplace_back(key, std::to_string(value));
    }
    void add(const std::string& key, int value) { entries.emplace_back(key, std::to_string(value)); }

    std::string line() const {
        std::string s;
        for (const auto& [k, v] : entries) {
            if (!s.empty()) s += " ";
            s += k + "=" + v;
        }
        return s;
    }

    json to_json() const {
        json j = json::object();
        for (const auto& [k, v] : entries) j[k] = v;
        return j;
    }
};

inline std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Timestamps stay in the '#' header; the body below it is reproducible.
inline void csv_preamble(CsvWriter& csv, const std::string& tool, const ConfigEcho& cfg) {
    csv.comment("tool: polarmm " + tool);
    csv.comment("generated: " + timestamp_utc());
    csv.comment("config: " + cfg.line());
}

struct CommonChannelArgs {
    std::string w_path, v_path, pair_path;

    ChannelPair load() const {
        if (!pair_path.empty()) {
            if (!w_path.empty() || !v_path.empty())
                throw UsageError("--pair excludes --w/--v");
            return load_pair(pair_path);
        }
        if (w_path.empty()) throw UsageError("need --w (or --pair)");
        Bdmc w = load_channel(w_path);
        Bdmc v = v_path.empty() ? w : load_channel(v_path);
        return make_pair(std::move(w), std::move(v));
    }
};

// ---------------------------------------------------------------------------

inline int cmd_channel_make(const std::string& out, std::optional<double> bsc_p,
                            std::optional<double> bec_e) {
    if (bsc_p.has_value() == bec_e.has_value())
        throw UsageError("channel make needs exactly one of --bsc or --bec");
    Bdmc ch = bsc_p ? bsc(*bsc_p) : bec(*bec_e);
    ConfigEcho cfg;
    cfg.add("kind", bsc_p ? "bsc" : "bec");
    cfg.add("param", bsc_p ? *bsc_p : *bec_e);
    json j = channel_to_json(ch);
    j["config"] = cfg.to_json();
    save_json(out, j);
    std::cout << "wrote " << out << " (capacity " << fmt17(symmetric_capacity(ch)) << " bits)\n";
    return kExitOk;
}

inline int cmd_channel_inspect(const std::string& path) {
    json j = load_json(path);
    if (json_is_pair(j)) {
        ChannelPair pair = pair_from_json(j);
        std::cout << "pair with " << pair.size() << " output symbols\n";
        std::cout << "I(W)   = " << fmt17(symmetric_capacity(pair.w)) << " bits\n";
        std::cout << "I(V)   = " << fmt17(symmetric_capacity(pair.v)) << " bits\n";
        std::cout << "I(W,V) = " << fmt17(mismatched_info(pair)) << " bits\n";
        std::cout << "Pe(W,V) single use = " << fmt17(pe_single_use(pair)) << "\n";
        auto sym = check_common_symmetry(pair);
        if (sym) {
            std::cout << "common symmetry: ";
            for (std::size_t y = 0; y < sym->size(); ++y)
                std::cout << pair.w.label(y) << "->" << pair.w.label((*sym)[y]) << " ";
            std::cout << "\n";
        } else {
            std::cout << "common symmetry: none\n";
        }
        return kExitOk;
    }
    Bdmc ch = channel_from_json(j);
    ValidationReport rep = validate(ch);
    std::cout << "channel with " << ch.size() << " output symbols: " << rep.to_string() << "\n";
    if (!rep.ok()) return kExitData;
    std::cout << "I(W) = " << fmt17(symmetric_capacity(ch)) << " bits\n";
    std::cout << "symbol  q(y)  delta(y)\n";
    for (std::size_t y = 0; y < ch.size(); ++y) {
        SymbolStats st = stats(ch, y);
        std::cout << "  " << ch.label(y) << "  " << fmt17(st.q) << "  " << fmt17(st.delta) << "\n";
    }
    std::cout << "symmetric: " << (is_symmetric(ch) ? "yes" : "no") << "\n";
    return kExitOk;
}

inline int cmd_polarize(const CommonChannelArgs& chans, int levels, const MergePolicy& policy,
                        const std::string& out) {
    ChannelPair pair = chans.load();
    if (pair.dropped_symbols)
        std::cerr << "warning: dropped " << pair.dropped_symbols << " zero-mass symbols\n";
    EvolveResult ev = evolve_all(pair, levels, policy);
    ConfigEcho cfg;
    cfg.add("w", chans.w_path.empty() ? chans.pair_path : chans.w_path);
    if (!chans.v_path.empty()) cfg.add("v", chans.v_path);
    cfg.add("n", levels);
    cfg.add("exact", policy.mode == MergePolicy::Mode::exact_only ? "1" : "0");
    cfg.add("merge-limit", static_cast<std::uint64_t>(policy.max_atoms));
    cfg.add("grid-bits", policy.grid_bits);
    CsvWriter csv(out);
    csv_preamble(csv, "polarize", cfg);
    csv.header({"index", "branch", "I_wv", "I_w", "mu", "atoms"});
    for (std::size_t i = 0; i < ev.records.size(); ++i) {
        const IndexRecord& r = ev.records[i];
        csv.row({std::to_string(i + 1), Branch::from_index(i, levels).str(), fmt17(r.info_wv),
                 fmt17(r.info_w), fmt17(r.mu), std::to_string(r.atoms)});
    }
    if (ev.diag.degenerate_metric_atoms)
        std::cerr << "note: " << ev.diag.degenerate_metric_atoms
                  << " degenerate metric updates were mapped to delta 0\n";
    std::cout << "wrote " << out << " (" << ev.records.size() << " indices)\n";
    return kExitOk;
}

struct ConstructArgs {
    CommonChannelArgs chans;
    int levels = 10;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
    std::optional<double> rate;
    std::optional<double> eps;
    bool eps_auto = false;
    std::string out;
    std::string code_out;
    MergePolicy policy = MergePolicy::quantized_grid();
};

inline Selection make_selection(const ConstructArgs& a, std::size_t n) {
    if (a.rate.has_value() + a.eps.has_value() + static_cast<int>(a.eps_auto) != 1)
        throw UsageError("construct needs exactly one of --rate, --eps, --eps-auto");
    if (a.rate) {
        auto k = static_cast<std::size_t>(
            std::ceil(*a.rate * static_cast<double>(n) - 1e-9));
        if (k > n) throw UsageError("rate above 1");
        return Selection::top_k(k);
    }
    double eps = a.eps ? *a.eps : eps_schedule(n);
    return Selection::threshold(eps);
}

inline int cmd_construct(const ConstructArgs& a, bool monte_carlo) {
    ChannelPair pair = a.chans.load();
    const std::size_t n = static_cast<std::size_t>(1) << a.levels;
    std::vector<IndexEstimate> per_index;
    SourceInfo source;
    if (monte_carlo) {
        per_index = estimate_indices_mc(pair.w, pair.v, a.levels, a.trials, a.seed);
        source = {SourceInfo::Kind::monte_carlo, a.trials, a.seed};
    } else {
        per_index = exact_indices(pair, a.levels, a.policy);
        source = {SourceInfo::Kind::exact, 0, 0};
    }
    InformationSet set = select_info_set(per_index, make_selection(a, n), a.levels, source);
    ConfigEcho cfg;
    cfg.add("method", monte_carlo ? "mc" : "exact");
    cfg.add("w", a.chans.w_path.empty() ? a.chans.pair_path : a.chans.w_path);
    if (!a.chans.v_path.empty()) cfg.add("v", a.chans.v_path);
    cfg.add("n", a.levels);
    if (monte_carlo) {
        cfg.add("trials", a.trials);
        cfg.add("seed", a.seed);
    } else {
        cfg.add("merge-limit", static_cast<std::uint64_t>(a.policy.max_atoms));
        cfg.add("grid-bits", a.policy.grid_bits);
    }
    if (a.rate) cfg.add("rate", *a.rate);
    if (a.eps) cfg.add("eps", *a.eps);
    if (a.eps_auto) cfg.add("eps", eps_schedule(n));
    json j = info_set_to_json(set);
    j["config"] = cfg.to_json();
    if (!monte_carlo) {
        double bound = scd_union_bound(per_index, set);
        j["union_bound"] = is_neg_inf(-bound) ? json("inf") : json(bound);
        j["union_bound_clipped"] = clip_unit(bound);
    }
    save_json(a.out, j);
    std::cout << "wrote " << a.out << " (" << set.indices.size() << " of " << n << " indices)\n";
    if (!a.code_out.empty()) {
        json cj = code_to_json(to_polar_code(set));
        cj["config"] = cfg.to_json();
        save_json(a.code_out, cj);
        std::cout << "wrote " << a.code_out << "\n";
    }
    return kExitOk;
}

inline int cmd_simulate(const CommonChannelArgs& chans, const std::string& code_path,
                        std::uint64_t frames, std::uint64_t seed, const std::string& out) {
    ChannelPair pair = chans.load();
    PolarCode code = code_from_json(load_json(code_path));
    MetricTable metric = MetricTable::from_channel(pair.v);
    SimulationResult sim = simulate_frames(pair.w, code, metric, frames, seed);
    ConfigEcho cfg;
    cfg.add("w", chans.w_path.empty() ? chans.pair_path : chans.w_path);
    if (!chans.v_path.empty()) cfg.add("v", chans.v_path);
    cfg.add("code", code_path);
    cfg.add("frames", frames);
    cfg.add("seed", seed);
    CsvWriter csv(out);
    csv_preamble(csv, "simulate", cfg);
    csv.header({"seed", "frames", "fer", "ber", "ci95"});
    csv.row({std::to_string(seed), std::to_string(frames), fmt17(sim.fer), fmt17(sim.ber),
             fmt17(sim.ci95)});
    std::cout << "wrote " << out << " (fer " << fmt17(sim.fer) << ", ber " << fmt17(sim.ber)
              << ")\n";
    return kExitOk;
}

inline ChannelFamily load_family(const std::string& spec, const std::string& file) {
    if (spec.empty() == file.empty())
        throw UsageError("need exactly one of --family or --family-file");
    if (!spec.empty()) return ChannelFamily::parse(spec);
    json j = load_json(file);
    if (!j.contains("channels") || !j["channels"].is_array())
        throw DataError("family file needs a 'channels' array");
    std::vector<Bdmc> chans;
    std::vector<std::string> labels;
    for (const auto& cj : j["channels"]) {
        chans.push_back(channel_from_json(cj));
        labels.push_back(cj.value("name", ""));
    }
    return ChannelFamily::from_channels(std::move(chans), std::move(labels));
}

inline void write_report_csv(const std::string& out, const ExperimentReport& rep,
                             const ConfigEcho& cfg) {
    CsvWriter csv(out);
    csv_preamble(csv, "compound", cfg);
    csv.comment("metric: " + rep.metric.label + " capacity " + fmt17(rep.metric.capacity));
    csv.comment("one-sided: " + std::string(rep.certificate.valid() ? "valid" : "INVALID") +
                " worst margin " + fmt17(rep.certificate.worst_violation) + " over " +
                rep.certificate.tested_grid);
    for (const auto& w : rep.warnings) csv.comment("warning: " + w);
    csv.header({"param", "I_W", "I_WV", "set_size", "rate", "fer", "ci95", "union_bound"});
    for (const auto& r : rep.rows) {
        csv.row({fmt17(r.param), fmt17(r.info_w), fmt17(r.info_wv), std::to_string(r.set_size),
                 fmt17(r.rate), fmt17(r.fer), fmt17(r.ci95),
                 r.union_bound ? fmt17(*r.union_bound) : ""});
    }
}

inline int cmd_compound(const std::string& family_spec, const std::string& family_file,
                        double rate, int levels, std::uint64_t trials, std::uint64_t frames,
                        std::uint64_t seed, const CompoundOptions& opt, const std::string& out,
                        const std::string& json_out) {
    ChannelFamily fam = load_family(family_spec, family_file);
    ExperimentReport rep = compound_run(fam, rate, levels, trials, frames, seed, opt);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    ConfigEcho cfg;
    cfg.add("family", family_spec.empty() ? family_file : family_spec);
    cfg.add("rate", rate);
    cfg.add("n", levels);
    cfg.add("trials", trials);
    cfg.add("frames", frames);
    cfg.add("seed", seed);
    cfg.add("construction", opt.exact_construction ? "exact" : "mc");
    write_report_csv(out, rep, cfg);
    std::cout << "metric " << rep.metric.label << ", I(V) = " << fmt17(rep.metric.capacity)
              << " bits, one-sided margin " << fmt17(rep.certificate.worst_violation) << "\n";
    std::cout << "wrote " << out << " (" << rep.rows.size() << " rows)\n";
    if (!json_out.empty()) {
        json j = experiment_report_to_json(rep);
        j["config"] = cfg.to_json();
        save_json(json_out, j);
        std::cout << "wrote " << json_out << "\n";
    }
    return kExitOk;
}

inline void print_report_table(const PropertyReport& rep) {
    std::printf("%-22s %12s %14s %10s %8s %s\n", "check", "instances", "worst", "tolerance",
                "skipped", "result");
    for (const auto& c : rep.checks) {
        std::printf("%-22s %12llu %14.3e %10.1e %8llu %s\n", c.name.c_str(),
                    static_cast<unsigned long long>(c.instances), c.worst_residual, c.tolerance,
                    static_cast<unsigned long long>(c.skipped), c.pass ? "pass" : "FAIL");
    }
}

inline int cmd_check(const std::string& which, std::uint64_t seed, const CheckOptions& opt,
                     const std::string& json_out) {
    PropertyReport rep;
    rep.seed = seed;
    if (which == "all") {
        rep = run_all_checks(seed, opt);
    } else if (which == "martingale" || which == "supermartingale") {
        for (auto& c : check_transform_trees(seed, opt.pairs, opt.tree_depth, opt.tree_policy))
            rep.checks.push_back(c);
        if (which == "supermartingale") rep.checks.push_back(check_bec_mu_equality());
    } else if (which == "lemma2") {
        rep.checks.push_back(check_lemma2(seed, opt.lemma2_samples));
    } else if (which == "pebound") {
        rep.checks.push_back(pe_bound_sweep(opt.pe_pairs, seed));
    } else if (which == "profile") {
        rep.checks.push_back(check_polarization_trend(opt.profile_levels, opt.profile_policy));
    } else {
        throw UsageError("unknown check '" + which + "'");
    }
    print_report_table(rep);
    if (!json_out.empty()) {
        ConfigEcho cfg;
        cfg.add("check", which);
        cfg.add("seed", seed);
        json j = property_report_to_json(rep);
        j["config"] = cfg.to_json();
        save_json(json_out, j);
        std::cout << "wrote " << json_out << "\n";
    }
    return rep.all_pass() ? kExitOk : kExitInternal;
}

// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args) {
    CLI::App app{"polar coding with mismatched successive-cancellation decoding"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (0 = logical cores)")
        ->envname("POLARMM_THREADS");

    // channel make | inspect
    auto* channel = app.add_subcommand("channel", "create or inspect channel files");
    channel->require_subcommand(1);
    auto* make = channel->add_subcommand("make", "write a standard channel as JSON");
    std::optional<double> bsc_p, bec_e;
    std::string out_path;
    make->add_option("--bsc", bsc_p, "binary symmetric channel crossover");
    make->add_option("--bec", bec_e, "binary erasure channel erasure probability");
    make->add_option("-o,--out", out_path, "output JSON path")->required();
    auto* inspect = channel->add_subcommand("inspect", "validate and summarize a channel file");
    std::string inspect_path;
    inspect->add_option("file", inspect_path, "channel or pair JSON")->required();

    // polarize
    auto* polarize = app.add_subcommand("polarize", "evolve all synthesized pairs to a level");
    CommonChannelArgs pol_chans;
    int pol_levels = 6;
    bool pol_exact = false;
    std::size_t pol_limit = 65536;
    int pol_grid = 12;
    std::string pol_out;
    polarize->add_option("--w", pol_chans.w_path, "true channel JSON");
    polarize->add_option("--v", pol_chans.v_path, "metric channel JSON (default: matched)");
    polarize->add_option("--pair", pol_chans.pair_path, "(W,V) pair JSON");
    polarize->add_option("-n,--levels", pol_levels, "number of transform levels")->required();
    polarize->add_flag("--exact", pol_exact, "exact merging only (error when above the limit)");
    polarize->add_option("--merge-limit", pol_limit, "alphabet cap per node");
    polarize->add_option("--grid-bits", pol_grid, "quantization bins per axis, log2");
    polarize->add_option("-o,--out", pol_out, "profile CSV path")->required();

    // construct exact|mc
    auto* construct = app.add_subcommand("construct", "build an information set");
    construct->require_subcommand(1);
    ConstructArgs cons;
    bool cons_exact_merge = false;
    auto add_construct_common = [&](CLI::App* sub) {
        sub->add_option("--w", cons.chans.w_path, "true channel JSON");
        sub->add_option("--v", cons.chans.v_path, "metric channel JSON (default: matched)");
        sub->add_option("--pair", cons.chans.pair_path, "(W,V) pair JSON");
        sub->add_option("-n,--levels", cons.levels, "number of transform levels")->required();
        sub->add_option("--rate", cons.rate, "target rate; selects the top ceil(N*rate) indices");
        sub->add_option("--eps", cons.eps, "threshold: keep indices with I >= 1-eps");
        sub->add_flag("--eps-auto", cons.eps_auto, "use the 2^(-sqrt(N)) threshold schedule");
        sub->add_option("-o,--out", cons.out, "information set JSON path")->required();
        sub->add_option("--code", cons.code_out, "also write the polar code JSON here");
    };
    auto* cons_mc = construct->add_subcommand("mc", "Monte Carlo construction");
    add_construct_common(cons_mc);
    cons_mc->add_option("--trials", cons.trials, "genie-aided trials");
    cons_mc->add_option("--seed", cons.seed, "construction seed")->required();
    auto* cons_exact = construct->add_subcommand("exact", "exact density-evolution construction");
    add_construct_common(cons_exact);
    cons_exact->add_flag("--exact", cons_exact_merge, "exact merging only");
    cons_exact->add_option("--merge-limit", cons.policy.max_atoms, "alphabet cap per node");
    cons_exact->add_option("--grid-bits", cons.policy.grid_bits,
                           "quantization bins per axis, log2");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "frame-error simulation of a code");
    CommonChannelArgs sim_chans;
    std::string sim_code, sim_out;
    std::uint64_t sim_frames = 1000, sim_seed = 0;
    simulate->add_option("--w", sim_chans.w_path, "true channel JSON");
    simulate->add_option("--v", sim_chans.v_path, "metric channel JSON (default: matched)");
    simulate->add_option("--pair", sim_chans.pair_path, "(W,V) pair JSON");
    simulate->add_option("--code", sim_code, "polar code JSON")->required();
    simulate->add_option("--frames", sim_frames, "number of frames");
    simulate->add_option("--seed", sim_seed, "simulation seed")->required();
    simulate->add_option("-o,--out", sim_out, "result CSV path")->required();

    // compound
    auto* compound = app.add_subcommand("compound", "full compound-class experiment");
    std::string fam_spec, fam_file, comp_out, comp_json;
    double comp_rate = 0.3;
    int comp_levels = 10;
    std::uint64_t comp_trials = 10000, comp_frames = 1000, comp_seed = 0;
    CompoundOptions comp_opt;
    compound->add_option("--family", fam_spec, "family spec, e.g. bsc:0.05:0.11:0.01");
    compound->add_option("--family-file", fam_file, "explicit family JSON file");
    compound->add_option("--rate", comp_rate, "code rate")->required();
    compound->add_option("-n,--levels", comp_levels, "number of transform levels")->required();
    compound->add_option("--trials", comp_trials, "construction trials per channel");
    compound->add_option("--frames", comp_frames, "simulated frames per channel");
    compound->add_option("--seed", comp_seed, "experiment seed")->required();
    compound->add_flag("--exact", comp_opt.exact_construction,
                       "exact construction instead of Monte Carlo");
    compound->add_option("--merge-limit", comp_opt.policy.max_atoms, "alphabet cap per node");
    compound->add_option("--grid-bits", comp_opt.policy.grid_bits,
                         "quantization bins per axis, log2");
    compound->add_option("--onesided-grid", comp_opt.onesided_grid,
                         "one-sidedness test points (0 = family grid)");
    compound->add_option("-o,--out", comp_out, "report CSV path")->required();
    compound->add_option("--json", comp_json, "also write the report as JSON here");

    // check
    auto* check = app.add_subcommand("check", "run the property suite");
    check->require_subcommand(1);
    std::uint64_t check_seed = 42;
    std::string check_json;
    CheckOptions check_opt;
    std::string check_name;
    for (const char* name : {"all", "martingale", "supermartingale", "lemma2", "pebound",
                             "profile"}) {
        auto* sub = check->add_subcommand(name);
        sub->add_option("--seed", check_seed, "corpus seed");
        sub->add_option("-o,--out", check_json, "report JSON path");
        sub->add_option("--pairs", check_opt.pairs, "random pair corpus size");
        sub->add_option("--depth", check_opt.tree_depth, "synthesis tree depth");
        sub->add_option("--samples", check_opt.lemma2_samples, "pointwise inequality samples");
        sub->add_option("--count", check_opt.pe_pairs, "error-bound sweep pairs");
        sub->add_option("--nmax", check_opt.profile_levels, "profile depth");
        sub->callback([name, &check_name] { check_name = name; });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        set_thread_cap(static_cast<std::size_t>(threads < 0 ? 0 : threads));
        if (make->parsed()) return cmd_channel_make(out_path, bsc_p, bec_e);
        if (inspect->parsed()) return cmd_channel_inspect(inspect_path);
        if (polarize->parsed()) {
            MergePolicy policy = pol_exact ? MergePolicy::exact(pol_limit)
                                           : MergePolicy::quantized_grid(pol_grid, pol_limit);
            return cmd_polarize(pol_chans, pol_levels, policy, pol_out);
        }
        if (cons_mc->parsed()) return cmd_construct(cons, true);
        if (cons_exact->parsed()) {
            if (cons_exact_merge) cons.policy.mode = MergePolicy::Mode::exact_only;
            return cmd_construct(cons, false);
        }
        if (simulate->parsed())
            return cmd_simulate(sim_chans, sim_code, sim_frames, sim_seed, sim_out);
        if (compound->parsed())
            return cmd_compound(fam_spec, fam_file, comp_rate, comp_levels, comp_trials,
                                comp_frames, comp_seed, comp_opt, comp_out, comp_json);
        if (check->parsed()) return cmd_check(check_name, check_seed, check_opt, check_json);
        throw UsageError("no subcommand given");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args));
}

}  // namespace polarmm::cli
