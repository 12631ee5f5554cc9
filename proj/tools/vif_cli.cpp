/*
 * Copyright 2026 The VIF Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// vif: experiment runner over the libvif C interface.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vif/vif.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInfeasible = 3 };

struct Failure {
    int code;
    std::string message;
};

int verbosity = 0;

void log(int level, const std::string& msg) {
    if (verbosity >= level) std::cerr << "vif: " << msg << '\n';
}

void check(vif_status st, const std::string& context) {
    if (st == VIF_OK) return;
    std::string msg = context + ": " + vif_status_name(st) + ": " + vif_last_error();
    throw Failure{st == VIF_E_INFEASIBLE ? kInfeasible : kData, msg};
}

// Owns a string returned by the library.
struct CString {
    char* p = nullptr;
    ~CString() { vif_string_free(p); }
    char** out() { return &p; }
    std::string str() const { return p ? std::string(p) : std::string(); }
};

template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};

using Rules = Handle<vif_ruleset, vif_ruleset_free>;
using Trace = Handle<vif_trace, vif_trace_free>;
using Filter = Handle<vif_filter, vif_filter_free>;
using Report = Handle<vif_report, vif_report_free>;
using Instance = Handle<vif_instance, vif_instance_free>;
using Plan = Handle<vif_plan, vif_plan_free>;
using Graph = Handle<vif_graph, vif_graph_free>;

struct Globals {
    std::uint64_t seed = 1;
    std::string out = "vif-out";
    std::size_t threads = 1;
    std::string format = "json";
};

// Relative inputs that do not exist locally are looked up under VIF_DATA_DIR.
std::string resolve(const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute() || fs::exists(path)) return path;
    if (const char* dir = std::getenv("VIF_DATA_DIR")) {
        fs::path alt = fs::path(dir) / path;
        if (fs::exists(alt)) return alt.string();
    }
    return path;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kData, "cannot open " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const Globals& g, const std::string& name, const std::string& content) {
    fs::create_directories(g.out);
    fs::path p = fs::path(g.out) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Failure{kData, "cannot write " + p.string()};
    out << content;
    log(1, "wrote " + p.string());
}

std::map<std::string, std::string> key_values(const std::vector<std::string>& items) {
    std::map<std::string, std::string> kv;
    for (const auto& item : items) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw Failure{kUsage, "expected key=value, got '" + item + "'"};
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

std::string take(std::map<std::string, std::string>& kv, const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    auto v = it->second;
    kv.erase(it);
    return v;
}

template <class T>
T take_num(std::map<std::string, std::string>& kv, const std::string& key, T fallback) {
    auto text = take(kv, key, "");
    if (text.empty()) return fallback;
    std::istringstream is(text);
    T v{};
    if (!(is >> v) || !is.eof()) throw Failure{kUsage, "bad value for " + key + ": " + text};
    return v;
}

void reject_leftovers(const std::map<std::string, std::string>& kv, const std::string& flag) {
    if (!kv.empty()) throw Failure{kUsage, "unknown " + flag + " key '" + kv.begin()->first + "'"};
}

// Prints the run summary to stdout as JSON or as key,value CSV.
void print_summary(const Globals& g, const json& summary) {
    if (g.format == "json") {
        std::cout << summary.dump(2) << '\n';
        return;
    }
    std::cout << "key,value\n";
    for (const auto& [k, v] : summary.items()) std::cout << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

// ---- filter-run -------------------------------------------------------------

struct FilterRunArgs {
    std::string rules, trace, profile;
    std::uint64_t update_period = 0;
};

void load_trace(Trace& trace, const std::string& trace_path, const std::string& profile_path) {
    if (!trace_path.empty())
        check(vif_trace_load(resolve(trace_path).c_str(), trace.out()), "trace");
    else if (!profile_path.empty())
        check(vif_trace_generate(read_file(resolve(profile_path)).c_str(), trace.out()), "profile");
    else
        throw Failure{kUsage, "one of --trace or --profile is required"};
}

int cmd_filter_run(const Globals& g, const FilterRunArgs& a) {
    Rules rules;
    check(vif_ruleset_load(resolve(a.rules).c_str(), rules.out()), "rules");
    Trace trace;
    load_trace(trace, a.trace, a.profile);
    vif_filter_options opts;
    vif_filter_options_default(&opts);
    opts.secret_seed = g.seed;
    opts.update_period = a.update_period;
    Filter filter;
    check(vif_filter_new(rules.get(), &opts, filter.out()), "filter");
    auto start = std::chrono::steady_clock::now();
    CString decisions;
    check(vif_filter_run(filter.get(), trace.get(), decisions.out()), "filter");
    double ms = elapsed_ms(start);
    CString in_csv, out_csv;
    check(vif_filter_sketch_csv(filter.get(), VIF_SKETCH_FILTER_INCOMING, in_csv.out()), "sketch");
    check(vif_filter_sketch_csv(filter.get(), VIF_SKETCH_FILTER_OUTGOING, out_csv.out()), "sketch");
    vif_filter_stats s;
    check(vif_filter_stats_get(filter.get(), &s), "stats");
    write_file(g, "decisions.csv", decisions.str());
    write_file(g, "sketch_incoming.csv", in_csv.str());
    write_file(g, "sketch_outgoing.csv", out_csv.str());
    json stats{{"packets", s.packets},         {"lookups", s.lookups},
               {"hashes", s.hashes},           {"cache_hits", s.cache_hits},
               {"batch_insertions", s.batch_insertions}, {"sketch_updates", s.sketch_updates}};
    write_file(g, "stats.json", stats.dump(2) + "\n");
    std::size_t allowed = 0;
    std::istringstream lines(decisions.str());
    for (std::string line; std::getline(lines, line);)
        if (line.find(",ALLOW,") != std::string::npos) ++allowed;
    json summary{{"packets", s.packets}, {"allowed", allowed}, {"dropped", s.packets - allowed}, {"elapsed_ms", ms}};
    summary["stats"] = stats;
    print_summary(g, summary);
    return kOk;
}

// ---- bypass-demo ------------------------------------------------------------

int cmd_bypass_demo(const Globals& g, const std::string& scenario) {
    Report report;
    check(vif_scenario_run_file(resolve(scenario).c_str(), report.out()), "scenario");
    CString rj, dec;
    check(vif_report_json(report.get(), rj.out()), "report");
    check(vif_report_decisions_csv(report.get(), dec.out()), "report");
    write_file(g, "report.json", rj.str() + "\n");
    write_file(g, "decisions.csv", dec.str());
    const std::pair<vif_sketch_role, const char*> roles[] = {{VIF_SKETCH_NEIGHBOR_SENT, "sketch_neighbor_sent.csv"},
                                                             {VIF_SKETCH_FILTER_INCOMING, "sketch_filter_incoming.csv"},
                                                             {VIF_SKETCH_FILTER_OUTGOING, "sketch_filter_outgoing.csv"},
                                                             {VIF_SKETCH_VICTIM_RECEIVED, "sketch_victim_received.csv"}};
    for (const auto& [role, name] : roles) {
        CString csv;
        check(vif_report_sketch_csv(report.get(), role, csv.out()), "sketch");
        write_file(g, name, csv.str());
    }
    auto full = json::parse(rj.str());
    json summary{{"victim", vif_report_victim_kind(report.get())},
                 {"neighbor", vif_report_neighbor_kind(report.get())},
                 {"misdispatch_count", vif_report_misdispatch_count(report.get())}};
    summary["rounds"] = full["rounds"].size();
    summary["decisions"] = full["decisions"];
    print_summary(g, summary);
    return kOk;
}

// ---- distribute -------------------------------------------------------------

struct DistributeArgs {
    std::string instance;
    std::vector<std::string> synthetic;
    std::uint64_t memory = 0, bytes_per_rule = 0, overhead = 0, delta_h = 0;
    std::string bandwidth, lambda, alpha, delta_g;
    std::size_t enclaves = 0;
    std::string exact = "auto";
};

json plan_summary(const vif_plan* plan) {
    CString s;
    check(vif_plan_summary_json(plan, s.out()), "plan");
    return json::parse(s.str());
}

int cmd_distribute(const Globals& g, const DistributeArgs& a) {
    Instance inst;
    if (!a.synthetic.empty()) {
        if (!a.instance.empty()) throw Failure{kUsage, "--instance and --synthetic are exclusive"};
        auto kv = key_values(a.synthetic);
        auto k = take_num<std::size_t>(kv, "k", 0);
        auto total = take(kv, "total", "");
        auto dist = take(kv, "dist", "lognormal");
        auto sigma = take_num<double>(kv, "sigma", 1.0);
        auto seed = take_num<std::uint64_t>(kv, "seed", g.seed);
        reject_leftovers(kv, "--synthetic");
        if (k == 0 || total.empty()) throw Failure{kUsage, "--synthetic needs k=<rules> and total=<Gb/s>"};
        if (dist != "lognormal") throw Failure{kUsage, "only dist=lognormal is supported"};
        check(vif_instance_synthetic(k, total.c_str(), sigma, seed, inst.out()), "synthetic instance");
        CString csv;
        check(vif_instance_csv(inst.get(), csv.out()), "instance");
        write_file(g, "instance.csv", csv.str());
    } else if (!a.instance.empty()) {
        check(vif_instance_load(resolve(a.instance).c_str(), inst.out()), "instance");
    } else {
        throw Failure{kUsage, "one of --instance or --synthetic is required"};
    }

    vif_capacity cap;
    vif_capacity_default(&cap);
    if (a.memory) cap.memory_limit = a.memory;
    if (a.bytes_per_rule) cap.bytes_per_rule = a.bytes_per_rule;
    if (a.overhead) cap.fixed_overhead = a.overhead;
    if (!a.bandwidth.empty()) cap.bandwidth_limit = a.bandwidth.c_str();
    if (!a.lambda.empty()) cap.lambda = a.lambda.c_str();
    if (!a.alpha.empty()) cap.alpha = a.alpha.c_str();
    if (!a.delta_g.empty()) cap.delta_g = a.delta_g.c_str();
    cap.delta_h = a.delta_h;

    std::uint64_t n_min = 0, n = 0;
    check(vif_enclave_count(inst.get(), &cap, &n_min, &n), "enclave count");
    std::size_t use_n = a.enclaves ? a.enclaves : static_cast<std::size_t>(n);
    const std::size_t k = vif_instance_size(inst.get());
    log(1, "k=" + std::to_string(k) + " n_min=" + std::to_string(n_min) + " n=" + std::to_string(use_n));

    json summary{{"k", k}, {"n_min", n_min}, {"n_formula", n}};
    auto start = std::chrono::steady_clock::now();
    Plan greedy;
    // Without --enclaves, grow n past the formula value until greedy fits.
    const std::size_t n_cap = 2 * use_n + k;
    auto st = vif_greedy_solve(inst.get(), &cap, use_n, greedy.out());
    while (st == VIF_E_INFEASIBLE && a.enclaves == 0 && use_n < n_cap)
        st = vif_greedy_solve(inst.get(), &cap, ++use_n, greedy.out());
    check(st, "greedy");
    double greedy_ms = elapsed_ms(start);
    summary["n"] = use_n;
    log(1, "greedy plan on n=" + std::to_string(use_n));
    CString violations;
    check(vif_plan_validate(greedy.get(), inst.get(), &cap, violations.out()), "greedy plan validation");
    CString greedy_csv;
    check(vif_plan_csv(greedy.get(), greedy_csv.out()), "plan");
    auto gsum = plan_summary(greedy.get());
    write_file(g, "plan_greedy.csv", greedy_csv.str());
    write_file(g, "plan_greedy.json", gsum.dump(2) + "\n");
    summary["greedy"] = gsum;
    summary["greedy"]["elapsed_ms"] = greedy_ms;

    bool run_exact = a.exact == "on" || (a.exact == "auto" && k <= 12 && use_n <= 4);
    if (a.exact != "on" && a.exact != "off" && a.exact != "auto") throw Failure{kUsage, "--exact must be auto, on or off"};
    if (run_exact) {
        start = std::chrono::steady_clock::now();
        Plan exact;
        check(vif_exact_solve(inst.get(), &cap, use_n, exact.out()), "exact");
        double exact_ms = elapsed_ms(start);
        CString exact_csv;
        check(vif_plan_csv(exact.get(), exact_csv.out()), "plan");
        auto esum = plan_summary(exact.get());
        write_file(g, "plan_exact.csv", exact_csv.str());
        write_file(g, "plan_exact.json", esum.dump(2) + "\n");
        summary["exact"] = esum;
        summary["exact"]["elapsed_ms"] = exact_ms;
        double zg = vif_plan_objective(greedy.get()), ze = vif_plan_objective(exact.get());
        double gap = ze > 0 ? (zg - ze) / ze : 0.0;
        summary["gap"] = gap;
        json gap_report{{"k", k}, {"n", use_n}, {"z_greedy", gsum["z"]}, {"z_exact", esum["z"]}, {"gap", gap}};
        write_file(g, "gap.json", gap_report.dump(2) + "\n");
    }
    print_summary(g, summary);
    return kOk;
}

// ---- cluster-sim ------------------------------------------------------------

struct ClusterArgs {
    std::string rules, trace, profile, config;
};

int cmd_cluster_sim(const Globals& g, const ClusterArgs& a) {
    Rules rules;
    check(vif_ruleset_load(resolve(a.rules).c_str(), rules.out()), "rules");
    Trace trace;
    load_trace(trace, a.trace, a.profile);
    json cfg = a.config.empty() ? json::object() : json::parse(read_file(resolve(a.config)), nullptr, false);
    if (cfg.is_discarded()) throw Failure{kData, "cluster config is not valid JSON"};
    if (!cfg.contains("seed")) cfg["seed"] = g.seed;
    if (g.threads <= 1 && !cfg.contains("threaded")) cfg["threaded"] = false;
    CString round_log, summary;
    auto start = std::chrono::steady_clock::now();
    check(vif_cluster_simulate(rules.get(), trace.get(), cfg.dump().c_str(), round_log.out(), summary.out()),
          "cluster");
    double ms = elapsed_ms(start);
    write_file(g, "round_log.jsonl", round_log.str());
    write_file(g, "cluster_summary.json", summary.str() + "\n");
    auto s = json::parse(summary.str());
    s["elapsed_ms"] = ms;
    print_summary(g, s);
    return kOk;
}

// ---- coverage / altpaths ----------------------------------------------------

struct TopologyArgs {
    std::string topology, ixps;
    std::vector<std::string> synthetic;
};

void load_graph(Graph& graph, const Globals& g, const TopologyArgs& a) {
    if (!a.synthetic.empty()) {
        if (!a.topology.empty()) throw Failure{kUsage, "--topology and --synthetic are exclusive"};
        auto kv = key_values(a.synthetic);
        auto nodes = take_num<std::size_t>(kv, "nodes", 200);
        auto ixps = take_num<std::size_t>(kv, "ixps", 10);
        auto seed = take_num<std::uint64_t>(kv, "seed", g.seed);
        reject_leftovers(kv, "--synthetic");
        check(vif_graph_synthetic(nodes, ixps, seed, graph.out()), "synthetic topology");
    } else if (!a.topology.empty()) {
        check(vif_graph_load_caida(resolve(a.topology).c_str(), graph.out()), "topology");
    } else {
        throw Failure{kUsage, "one of --topology or --synthetic is required"};
    }
    if (!a.ixps.empty()) check(vif_graph_load_ixps(graph.get(), resolve(a.ixps).c_str()), "ixp membership");
    log(1, std::to_string(vif_graph_node_count(graph.get())) + " ASes, " +
               std::to_string(vif_graph_ixp_count(graph.get())) + " IXPs");
}

int cmd_coverage(const Globals& g, const TopologyArgs& t, vif_coverage_options opts) {
    Graph graph;
    load_graph(graph, g, t);
    opts.seed = g.seed;
    opts.threads = g.threads;
    CString rows, summary;
    check(vif_coverage_study(graph.get(), &opts, rows.out(), summary.out()), "coverage");
    write_file(g, "coverage.csv", rows.str());
    write_file(g, "coverage_summary.csv", summary.str());
    if (g.format == "csv") {
        std::cout << summary.str();
        return kOk;
    }
    json out = json::array();
    std::istringstream lines(summary.str());
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        std::vector<std::string> f;
        std::istringstream cells(line);
        for (std::string c; std::getline(cells, c, ',');) f.push_back(c);
        if (f.size() != 8) continue;
        out.push_back({{"region_policy", f[0]}, {"ixp_set_size", std::stoul(f[1])}, {"victims", std::stoul(f[2])},
                       {"p5", std::stod(f[3])}, {"q1", std::stod(f[4])}, {"median", std::stod(f[5])},
                       {"q3", std::stod(f[6])}, {"p95", std::stod(f[7])}});
    }
    std::cout << out.dump(2) << '\n';
    return kOk;
}

int cmd_altpaths(const Globals& g, const TopologyArgs& t, std::size_t pairs) {
    Graph graph;
    load_graph(graph, g, t);
    CString csv;
    check(vif_altpath_study(graph.get(), pairs, g.seed, g.threads, csv.out()), "altpaths");
    write_file(g, "altpaths.csv", csv.str());
    std::map<std::size_t, std::size_t> histogram;
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) histogram[std::stoul(line.substr(line.rfind(',') + 1))]++;
    json h = json::object();
    for (auto [count, freq] : histogram) h[std::to_string(count)] = freq;
    print_summary(g, json{{"pairs", pairs}, {"path_count_histogram", h}});
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verifiable in-network filtering: engine and simulation harness"};
    app.set_version_flag("--version", std::string(vif_version()));
    app.require_subcommand(1);

    Globals g;
    app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "Summary format on stdout")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_flag_function("-v,--verbose", [](std::int64_t c) { verbosity += static_cast<int>(c); },
                          "More log output on stderr");
    app.add_flag_function("-q,--quiet", [](std::int64_t) { verbosity = -1; }, "Errors only");

    FilterRunArgs fr;
    auto* filter_run = app.add_subcommand("filter-run", "Filter a trace through one sealed filter");
    filter_run->add_option("--rules", fr.rules, "Rule file")->required();
    auto* fr_trace = filter_run->add_option("--trace", fr.trace, "Trace CSV");
    filter_run->add_option("--profile", fr.profile, "Traffic profile JSON to generate the trace")->excludes(fr_trace);
    filter_run->add_option("--update-period", fr.update_period, "Packets between exact-match promotions (0 = off)");

    std::string scenario;
    auto* bypass = app.add_subcommand("bypass-demo", "Run an adversarial scenario and audit the logs");
    bypass->add_option("scenario", scenario, "Scenario JSON")->required();

    DistributeArgs da;
    auto* distribute = app.add_subcommand("distribute", "Distribute rules across filter instances");
    auto* inst_opt = distribute->add_option("--instance", da.instance, "Instance CSV rule_id,bandwidth_gbps");
    distribute->add_option("--synthetic", da.synthetic, "k=<rules> total=<Gb/s> [dist=lognormal] [sigma=] [seed=]")
        ->expected(1, -1)
        ->delimiter(',')
        ->excludes(inst_opt);
    distribute->add_option("--memory", da.memory, "Per-enclave memory limit M, bytes");
    distribute->add_option("--bandwidth", da.bandwidth, "Per-enclave bandwidth limit G, Gb/s");
    distribute->add_option("--bytes-per-rule", da.bytes_per_rule, "u, bytes");
    distribute->add_option("--overhead", da.overhead, "v, bytes");
    distribute->add_option("--lambda", da.lambda, "Slack ratio");
    distribute->add_option("--alpha", da.alpha, "Balance coefficient (default G/M)");
    distribute->add_option("--delta-g", da.delta_g, "Greedy bandwidth step");
    distribute->add_option("--delta-h", da.delta_h, "Greedy rule-count step");
    distribute->add_option("--enclaves", da.enclaves, "Enclave count (default from the capacity formula)");
    distribute->add_option("--exact", da.exact, "Exact solve: auto (k <= 12), on, off")->capture_default_str();

    ClusterArgs ca;
    auto* cluster = app.add_subcommand("cluster-sim", "Simulate a multi-enclave filtering cluster");
    cluster->add_option("--rules", ca.rules, "Rule file")->required();
    auto* ca_trace = cluster->add_option("--trace", ca.trace, "Trace CSV");
    cluster->add_option("--profile", ca.profile, "Traffic profile JSON")->excludes(ca_trace);
    cluster->add_option("--config", ca.config, "Cluster config JSON");

    TopologyArgs cov_t;
    vif_coverage_options cov;
    vif_coverage_options_default(&cov);
    auto* coverage = app.add_subcommand("coverage", "IXP coverage of attack sources");
    auto* cov_topo = coverage->add_option("--topology", cov_t.topology, "CAIDA AS-relationship file");
    coverage->add_option("--ixps", cov_t.ixps, "IXP membership file ixp|as[|region]");
    coverage->add_option("--synthetic", cov_t.synthetic, "nodes=<n> ixps=<m> [seed=]")
        ->expected(1, -1)
        ->delimiter(',')
        ->excludes(cov_topo);
    coverage->add_option("--sources", cov.sources, "Attack sources per victim")->capture_default_str();
    coverage->add_option("--victims", cov.victims, "Victim ASes")->capture_default_str();
    coverage->add_option("--topk", cov.top_k, "Largest IXP set size")->capture_default_str();

    TopologyArgs alt_t;
    std::size_t pairs = 100;
    auto* altpaths = app.add_subcommand("altpaths", "Count alternative policy-compliant AS paths");
    auto* alt_topo = altpaths->add_option("--topology", alt_t.topology, "CAIDA AS-relationship file");
    altpaths->add_option("--synthetic", alt_t.synthetic, "nodes=<n> [seed=]")
        ->expected(1, -1)
        ->delimiter(',')
        ->excludes(alt_topo);
    altpaths->add_option("--pairs", pairs, "Random (source, destination) pairs")->capture_default_str();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*filter_run) return cmd_filter_run(g, fr);
        if (*bypass) return cmd_bypass_demo(g, scenario);
        if (*distribute) return cmd_distribute(g, da);
        if (*cluster) return cmd_cluster_sim(g, ca);
        if (*coverage) return cmd_coverage(g, cov_t, cov);
        if (*altpaths) return cmd_altpaths(g, alt_t, pairs);
    } catch (const Failure& f) {
        std::cerr << "vif: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "vif: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}
