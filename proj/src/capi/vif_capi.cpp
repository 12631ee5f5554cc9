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

#include "vif/vif.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "json.hpp"
#include "vif/adversary_sim.hpp"
#include "vif/cluster.hpp"
#include "vif/error.hpp"
#include "vif/filter_engine.hpp"
#include "vif/flow_model.hpp"
#include "vif/route_sim.hpp"
#include "vif/rule_distribution.hpp"

struct vif_ruleset {
    vif::RuleSet rules;
};
struct vif_trace {
    std::vector<vif::Packet> packets;
};
struct vif_filter {
    vif::SealedFilter filter;
};
struct vif_report {
    vif::ScenarioReport report;
};
struct vif_instance {
    std::vector<vif::RuleLoad> loads;
};
struct vif_plan {
    vif::SolveResult result;
    vif::CapacityConfig cfg;
};
struct vif_graph {
    vif::AsGraph graph;
};

namespace {

thread_local std::string g_last_error;

vif_status fail(vif_status s, const char* what) {
    g_last_error = what;
    return s;
}

template <class F>
vif_status guarded(F&& body) {
    try {
        body();
        return VIF_OK;
    } catch (const vif::Error& e) {
        return fail(static_cast<vif_status>(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(VIF_E_PARSE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(VIF_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(VIF_E_INTERNAL, e.what());
    } catch (...) {
        return fail(VIF_E_INTERNAL, "unknown error");
    }
}

void require(const void* p, const char* what) {
    if (!p) throw vif::Error(vif::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void emit(char** out, const std::string& s) {
    require(out, "output pointer");
    *out = dup_string(s);
}

vif::CapacityConfig to_config(const vif_capacity* cap) {
    vif::CapacityConfig c;
    if (!cap) return c;
    c.memory_limit = cap->memory_limit;
    c.bytes_per_rule = cap->bytes_per_rule;
    c.fixed_overhead = cap->fixed_overhead;
    if (cap->bandwidth_limit) c.bandwidth_limit = vif::parse_rational(cap->bandwidth_limit);
    if (cap->lambda) c.lambda = vif::parse_rational(cap->lambda);
    if (cap->alpha) c.alpha = vif::parse_rational(cap->alpha);
    if (cap->delta_g) c.delta_g = vif::parse_rational(cap->delta_g);
    if (cap->delta_h) c.delta_h = cap->delta_h;
    c.validate();
    return c;
}

const vif::CountMinSketch& report_sketch(const vif::ScenarioReport& r, vif_sketch_role role) {
    switch (role) {
        case VIF_SKETCH_NEIGHBOR_SENT: return r.neighbor_sent;
        case VIF_SKETCH_FILTER_INCOMING: return r.filter_incoming;
        case VIF_SKETCH_FILTER_OUTGOING: return r.filter_outgoing;
        case VIF_SKETCH_VICTIM_RECEIVED: return r.victim_received;
    }
    throw vif::Error(vif::ErrorCode::InvalidArgument, "unknown sketch role");
}

std::string decision_rule(const vif::Decision& d) { return d.matched_rule ? std::to_string(*d.matched_rule) : "-"; }

vif_status solved(vif::SolveResult res, const vif::CapacityConfig& cfg, vif_plan** out) {
    if (!res.ok()) {
        *out = nullptr;
        return fail(VIF_E_INFEASIBLE, "no feasible plan for this instance");
    }
    *out = new vif_plan{std::move(res), cfg};
    return VIF_OK;
}

}  // namespace

extern "C" {

const char* vif_version(void) { return "1.0.0"; }

const char* vif_status_name(vif_status status) {
    switch (status) {
        case VIF_OK: return "OK";
        case VIF_E_INVALID_ARGUMENT: return "INVALID_ARGUMENT";
        case VIF_E_PARSE: return "PARSE";
        case VIF_E_IO: return "IO";
        case VIF_E_DOMAIN: return "DOMAIN";
        case VIF_E_INCOMPARABLE: return "INCOMPARABLE";
        case VIF_E_INFEASIBLE: return "INFEASIBLE";
        case VIF_E_OVERFLOW: return "OVERFLOW";
        case VIF_E_AUTH: return "AUTH";
        case VIF_E_INTERNAL: return "INTERNAL";
    }
    return "UNKNOWN";
}

const char* vif_last_error(void) { return g_last_error.c_str(); }

void vif_string_free(char* s) { std::free(s); }

// ---- rules and traces ------------------------------------------------------

vif_status vif_ruleset_parse(const char* text, vif_ruleset** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = new vif_ruleset{vif::parse_ruleset(text)};
    });
}

vif_status vif_ruleset_load(const char* path, vif_ruleset** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new vif_ruleset{vif::load_ruleset(path)};
    });
}

size_t vif_ruleset_size(const vif_ruleset* rules) { return rules ? rules->rules.size() : 0; }
void vif_ruleset_free(vif_ruleset* rules) { delete rules; }

vif_status vif_trace_load(const char* path, vif_trace** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new vif_trace{vif::load_trace(path)};
    });
}

vif_status vif_trace_generate(const char* profile_json, vif_trace** out) {
    return guarded([&] {
        require(profile_json, "profile_json");
        require(out, "out");
        *out = new vif_trace{vif::generate(vif::parse_profile(profile_json))};
    });
}

vif_status vif_trace_save(const vif_trace* trace, const char* path) {
    return guarded([&] {
        require(trace, "trace");
        require(path, "path");
        vif::save_trace(path, trace->packets);
    });
}

size_t vif_trace_size(const vif_trace* trace) { return trace ? trace->packets.size() : 0; }
void vif_trace_free(vif_trace* trace) { delete trace; }

// ---- single sealed filter --------------------------------------------------

void vif_filter_options_default(vif_filter_options* opts) {
    if (!opts) return;
    vif::SketchParams d;
    opts->secret_seed = 0;
    opts->update_period = 0;
    opts->sketch_seed = d.session_seed;
    opts->sketch_width = d.width;
    opts->sketch_depth = d.depth;
}

vif_status vif_filter_new(const vif_ruleset* rules, const vif_filter_options* opts, vif_filter** out) {
    return guarded([&] {
        require(rules, "rules");
        require(out, "out");
        vif_filter_options o;
        vif_filter_options_default(&o);
        if (opts) o = *opts;
        vif::SketchParams sp;
        sp.depth = o.sketch_depth;
        sp.width = o.sketch_width;
        sp.session_seed = o.sketch_seed;
        vif::FilterConfig fc;
        fc.update_period = o.update_period;
        *out = new vif_filter{vif::SealedFilter(rules->rules, vif::FilterSecret::from_seed(o.secret_seed), fc, sp)};
    });
}

vif_status vif_filter_run(vif_filter* filter, const vif_trace* trace, char** decisions_csv) {
    return guarded([&] {
        require(filter, "filter");
        require(trace, "trace");
        std::ostringstream os;
        os << "arrival_index,payload_tag,verdict,rule\n";
        for (const auto& p : trace->packets) {
            auto d = filter->filter.process(vif::digest(p, p.arrival_index));
            if (decisions_csv)
                os << p.arrival_index << ',' << p.payload_tag << ',' << vif::to_string(d.verdict) << ','
                   << decision_rule(d) << '\n';
        }
        if (decisions_csv) emit(decisions_csv, os.str());
    });
}

vif_status vif_filter_stats_get(const vif_filter* filter, vif_filter_stats* out) {
    return guarded([&] {
        require(filter, "filter");
        require(out, "out");
        auto s = filter->filter.stats();
        *out = vif_filter_stats{s.packets, s.lookups, s.hashes, s.cache_hits, s.batch_insertions, s.sketch_updates};
    });
}

vif_status vif_filter_sketch_csv(const vif_filter* filter, vif_sketch_role role, char** csv) {
    return guarded([&] {
        require(filter, "filter");
        if (role == VIF_SKETCH_FILTER_INCOMING)
            emit(csv, filter->filter.incoming().dump_csv());
        else if (role == VIF_SKETCH_FILTER_OUTGOING)
            emit(csv, filter->filter.outgoing().dump_csv());
        else
            throw vif::Error(vif::ErrorCode::InvalidArgument, "a filter only holds incoming and outgoing sketches");
    });
}

void vif_filter_free(vif_filter* filter) { delete filter; }

// ---- adversarial scenarios -------------------------------------------------

vif_status vif_scenario_run_file(const char* path, vif_report** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new vif_report{vif::run_scenario(vif::load_scenario(path))};
    });
}

vif_status vif_scenario_run_json(const char* json, const char* base_dir, vif_report** out) {
    return guarded([&] {
        require(json, "json");
        require(out, "out");
        *out = new vif_report{vif::run_scenario(vif::parse_scenario(json, base_dir ? base_dir : "."))};
    });
}

vif_status vif_report_json(const vif_report* report, char** json) {
    return guarded([&] {
        require(report, "report");
        emit(json, report->report.to_json());
    });
}

vif_status vif_report_sketch_csv(const vif_report* report, vif_sketch_role role, char** csv) {
    return guarded([&] {
        require(report, "report");
        emit(csv, report_sketch(report->report, role).dump_csv());
    });
}

vif_status vif_report_decisions_csv(const vif_report* report, char** csv) {
    return guarded([&] {
        require(report, "report");
        std::ostringstream os;
        os << "payload_tag,verdict,rule\n";
        for (const auto& [tag, d] : report->report.decisions)
            os << tag << ',' << vif::to_string(d.verdict) << ',' << decision_rule(d) << '\n';
        emit(csv, os.str());
    });
}

const char* vif_report_victim_kind(const vif_report* report) {
    return report ? vif::to_string(report->report.victim.kind).data() : "";
}

const char* vif_report_neighbor_kind(const vif_report* report) {
    return report ? vif::to_string(report->report.neighbor.kind).data() : "";
}

size_t vif_report_misdispatch_count(const vif_report* report) {
    return report ? report->report.misdispatches.size() : 0;
}

void vif_report_free(vif_report* report) { delete report; }

// ---- rule distribution -----------------------------------------------------

void vif_capacity_default(vif_capacity* cap) {
    if (!cap) return;
    vif::CapacityConfig d;
    cap->memory_limit = d.memory_limit;
    cap->bandwidth_limit = "10";
    cap->bytes_per_rule = d.bytes_per_rule;
    cap->fixed_overhead = d.fixed_overhead;
    cap->lambda = "0";
    cap->alpha = nullptr;
    cap->delta_g = nullptr;
    cap->delta_h = 0;
}

vif_status vif_instance_load(const char* path, vif_instance** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw vif::Error(vif::ErrorCode::Io, std::string("cannot open ") + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        *out = new vif_instance{vif::parse_instance_csv(ss.str())};
    });
}

vif_status vif_instance_parse(const char* csv, vif_instance** out) {
    return guarded([&] {
        require(csv, "csv");
        require(out, "out");
        *out = new vif_instance{vif::parse_instance_csv(csv)};
    });
}

vif_status vif_instance_synthetic(size_t k, const char* total_gbps, double sigma, uint64_t seed, vif_instance** out) {
    return guarded([&] {
        require(total_gbps, "total_gbps");
        require(out, "out");
        *out = new vif_instance{vif::synthetic_lognormal_loads(k, vif::parse_rational(total_gbps), sigma, seed)};
    });
}

size_t vif_instance_size(const vif_instance* inst) { return inst ? inst->loads.size() : 0; }

vif_status vif_instance_csv(const vif_instance* inst, char** csv) {
    return guarded([&] {
        require(inst, "instance");
        emit(csv, vif::format_instance_csv(inst->loads));
    });
}

void vif_instance_free(vif_instance* inst) { delete inst; }

vif_status vif_enclave_count(const vif_instance* inst, const vif_capacity* cap, uint64_t* n_min, uint64_t* n) {
    return guarded([&] {
        require(inst, "instance");
        auto c = vif::enclave_count(inst->loads, to_config(cap));
        if (n_min) *n_min = c.n_min;
        if (n) *n = c.n;
    });
}

vif_status vif_greedy_solve(const vif_instance* inst, const vif_capacity* cap, size_t n, vif_plan** out) {
    vif_status status = VIF_OK;
    auto st = guarded([&] {
        require(inst, "instance");
        require(out, "out");
        *out = nullptr;
        auto cfg = to_config(cap);
        auto res = n == 0 ? vif::greedy_solve(inst->loads, cfg) : vif::greedy_solve(inst->loads, cfg, n);
        status = solved(std::move(res), cfg, out);
    });
    return st != VIF_OK ? st : status;
}

vif_status vif_exact_solve(const vif_instance* inst, const vif_capacity* cap, size_t n, vif_plan** out) {
    vif_status status = VIF_OK;
    auto st = guarded([&] {
        require(inst, "instance");
        require(out, "out");
        *out = nullptr;
        auto cfg = to_config(cap);
        if (n == 0) n = static_cast<size_t>(vif::enclave_count(inst->loads, cfg).n);
        status = solved(vif::exact_solve(inst->loads, cfg, n), cfg, out);
    });
    return st != VIF_OK ? st : status;
}

size_t vif_plan_enclaves(const vif_plan* plan) { return plan ? plan->result.plan.n : 0; }

double vif_plan_objective(const vif_plan* plan) { return plan ? vif::to_double(plan->result.objective) : 0.0; }

vif_status vif_plan_objective_exact(const vif_plan* plan, char** value) {
    return guarded([&] {
        require(plan, "plan");
        std::ostringstream os;
        os << plan->result.objective;
        emit(value, os.str());
    });
}

uint64_t vif_plan_work(const vif_plan* plan) { return plan ? plan->result.work : 0; }

vif_status vif_plan_csv(const vif_plan* plan, char** csv) {
    return guarded([&] {
        require(plan, "plan");
        emit(csv, vif::format_plan_csv(plan->result.plan));
    });
}

vif_status vif_plan_summary_json(const vif_plan* plan, char** json) {
    return guarded([&] {
        require(plan, "plan");
        const auto& p = plan->result.plan;
        std::uint64_t max_c = 0;
        vif::Rational max_i = 0;
        for (std::size_t j = 0; j < p.n; ++j) {
            max_c = std::max(max_c, p.memory_on(j, plan->cfg));
            max_i = std::max(max_i, p.bandwidth_on(j));
        }
        bool feasible = true;
        try {
            vif::plan_objective(p, plan->cfg);
        } catch (const vif::InfeasibleError&) {
            feasible = false;
        }
        nlohmann::json j{{"n", p.n},
                         {"z", vif::format_decimal(plan->result.objective, 9)},
                         {"max_C", max_c},
                         {"max_I", vif::format_decimal(max_i, 9)},
                         {"feasible", feasible},
                         {"work", plan->result.work}};
        emit(json, j.dump());
    });
}

vif_status vif_plan_validate(const vif_plan* plan, const vif_instance* inst, const vif_capacity* cap,
                             char** violations) {
    vif_status status = VIF_OK;
    auto st = guarded([&] {
        require(plan, "plan");
        require(inst, "instance");
        auto bad = vif::validate_plan(plan->result.plan, inst->loads, to_config(cap));
        if (violations) *violations = nullptr;
        if (bad.empty()) return;
        std::string joined;
        for (const auto& b : bad) joined += b + "\n";
        if (violations) emit(violations, joined);
        g_last_error = bad.front();
        status = VIF_E_INFEASIBLE;
    });
    return st != VIF_OK ? st : status;
}

void vif_plan_free(vif_plan* plan) { delete plan; }

// ---- multi-enclave cluster -------------------------------------------------

vif_status vif_cluster_simulate(const vif_ruleset* rules, const vif_trace* trace, const char* cluster_json,
                                char** round_log, char** summary_json) {
    return guarded([&] {
        require(rules, "rules");
        require(trace, "trace");
        auto cfg = vif::parse_cluster_config(cluster_json ? cluster_json : "{}");
        vif::Cluster cluster(rules->rules, cfg);
        auto rounds = cluster.run(trace->packets);
        std::string log;
        std::size_t misdispatches = 0, allowed = 0, redistributions = 0;
        for (const auto& r : rounds) {
            log += r.log.to_json() + "\n";
            misdispatches += r.misdispatches.size();
            redistributions += r.redistribution ? 1 : 0;
            for (const auto& d : r.decisions) allowed += d.verdict == vif::Verdict::Allow ? 1 : 0;
        }
        auto s = cluster.stats();
        nlohmann::json j{{"rounds", rounds.size()},
                         {"redistributions", redistributions},
                         {"enclaves_final", cluster.size()},
                         {"simulated_seconds", cluster.simulated_seconds()},
                         {"packets", trace->packets.size()},
                         {"allowed", allowed},
                         {"misdispatch_count", misdispatches},
                         {"stats",
                          {{"lookups", s.lookups},
                           {"hashes", s.hashes},
                           {"cache_hits", s.cache_hits},
                           {"batch_insertions", s.batch_insertions},
                           {"sketch_updates", s.sketch_updates}}}};
        if (round_log) emit(round_log, log);
        if (summary_json) emit(summary_json, j.dump(2));
    });
}

// ---- AS-level routing ------------------------------------------------------

vif_status vif_graph_load_caida(const char* path, vif_graph** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new vif_graph{vif::AsGraph::load_caida(path)};
    });
}

vif_status vif_graph_parse_caida(const char* text, vif_graph** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = new vif_graph{vif::AsGraph::parse_caida(text)};
    });
}

vif_status vif_graph_synthetic(size_t nodes, size_t ixps, uint64_t seed, vif_graph** out) {
    return guarded([&] {
        require(out, "out");
        *out = new vif_graph{vif::AsGraph::synthetic(nodes, ixps, seed)};
    });
}

vif_status vif_graph_load_ixps(vif_graph* graph, const char* path) {
    return guarded([&] {
        require(graph, "graph");
        require(path, "path");
        graph->graph.load_ixp_membership(path);
    });
}

vif_status vif_graph_parse_ixps(vif_graph* graph, const char* text) {
    return guarded([&] {
        require(graph, "graph");
        require(text, "text");
        graph->graph.parse_ixp_membership(text);
    });
}

size_t vif_graph_node_count(const vif_graph* graph) { return graph ? graph->graph.node_count() : 0; }
size_t vif_graph_ixp_count(const vif_graph* graph) { return graph ? graph->graph.ixps().size() : 0; }

vif_status vif_graph_best_path(const vif_graph* graph, uint32_t src, uint32_t dst, char** path) {
    return guarded([&] {
        require(graph, "graph");
        if (!graph->graph.contains(src) || !graph->graph.contains(dst))
            throw vif::Error(vif::ErrorCode::InvalidArgument, "unknown AS");
        auto p = vif::compute_routes(graph->graph, dst).best_path(src);
        std::string text;
        if (p)
            for (std::size_t i = 0; i < p->size(); ++i) text += (i ? " " : "") + std::to_string((*p)[i]);
        emit(path, text);
    });
}

void vif_graph_free(vif_graph* graph) { delete graph; }

void vif_coverage_options_default(vif_coverage_options* opts) {
    if (!opts) return;
    vif::CoverageStudyConfig d;
    *opts = vif_coverage_options{d.victims, d.sources, d.top_k, d.seed, d.threads};
}

vif_status vif_coverage_study(const vif_graph* graph, const vif_coverage_options* opts, char** rows_csv,
                              char** summary_csv) {
    return guarded([&] {
        require(graph, "graph");
        vif::CoverageStudyConfig cfg;
        if (opts) cfg = {opts->victims, opts->sources, opts->top_k, opts->seed, opts->threads};
        auto rows = vif::coverage_study(graph->graph, cfg);
        auto summary = rows.empty() ? std::vector<vif::CoverageSummary>{} : vif::summarize_coverage(rows);
        if (rows_csv) emit(rows_csv, vif::format_coverage_csv(rows));
        if (summary_csv) emit(summary_csv, vif::format_coverage_summary_csv(summary));
    });
}

vif_status vif_altpath_study(const vif_graph* graph, size_t pairs, uint64_t seed, size_t threads, char** csv) {
    return guarded([&] {
        require(graph, "graph");
        emit(csv, vif::format_altpath_csv(vif::altpath_study(graph->graph, pairs, seed, threads)));
    });
}

}  // extern "C"
