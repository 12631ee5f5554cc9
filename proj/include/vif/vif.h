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

/*
 * C interface of libvif.
 *
 * Every fallible call returns a vif_status; on failure vif_last_error()
 * holds a message for the calling thread until its next failing call.
 * Objects are opaque handles released with their *_free function (NULL
 * is accepted). Strings returned through char** are heap allocated and
 * released with vif_string_free(). Exact quantities (bandwidths,
 * objectives) cross the boundary as decimal or "a/b" strings.
 */

#ifndef VIF_VIF_H
#define VIF_VIF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(VIF_BUILDING_LIBRARY)
#define VIF_API __declspec(dllexport)
#else
#define VIF_API __declspec(dllimport)
#endif
#else
#define VIF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vif_status {
    VIF_OK = 0,
    VIF_E_INVALID_ARGUMENT = 1,
    VIF_E_PARSE = 2,
    VIF_E_IO = 3,
    VIF_E_DOMAIN = 4,
    VIF_E_INCOMPARABLE = 5,
    VIF_E_INFEASIBLE = 6,
    VIF_E_OVERFLOW = 7,
    VIF_E_AUTH = 8,
    VIF_E_INTERNAL = 99
} vif_status;

VIF_API const char* vif_version(void);
VIF_API const char* vif_status_name(vif_status status);
VIF_API const char* vif_last_error(void);
VIF_API void vif_string_free(char* s);

/* ---- rules and traces --------------------------------------------------- */

typedef struct vif_ruleset vif_ruleset;
typedef struct vif_trace vif_trace;

VIF_API vif_status vif_ruleset_parse(const char* text, vif_ruleset** out);
VIF_API vif_status vif_ruleset_load(const char* path, vif_ruleset** out);
VIF_API size_t vif_ruleset_size(const vif_ruleset* rules);
VIF_API void vif_ruleset_free(vif_ruleset* rules);

VIF_API vif_status vif_trace_load(const char* path, vif_trace** out);
/* Traffic profile JSON: {flow_count, packets_per_flow, size, src_pool, dst_pool, protocols, seed}. */
VIF_API vif_status vif_trace_generate(const char* profile_json, vif_trace** out);
VIF_API vif_status vif_trace_save(const vif_trace* trace, const char* path);
VIF_API size_t vif_trace_size(const vif_trace* trace);
VIF_API void vif_trace_free(vif_trace* trace);

/* ---- single sealed filter ----------------------------------------------- */

typedef struct vif_filter vif_filter;

typedef struct vif_filter_options {
    uint64_t secret_seed;
    uint64_t update_period; /* packets between exact-match promotions, 0 = off */
    uint64_t sketch_seed;
    uint32_t sketch_width;
    uint8_t sketch_depth;
} vif_filter_options;

typedef struct vif_filter_stats {
    uint64_t packets;
    uint64_t lookups;
    uint64_t hashes;
    uint64_t cache_hits;
    uint64_t batch_insertions;
    uint64_t sketch_updates;
} vif_filter_stats;

typedef enum vif_sketch_role {
    VIF_SKETCH_NEIGHBOR_SENT = 0,
    VIF_SKETCH_FILTER_INCOMING = 1,
    VIF_SKETCH_FILTER_OUTGOING = 2,
    VIF_SKETCH_VICTIM_RECEIVED = 3
} vif_sketch_role;

VIF_API void vif_filter_options_default(vif_filter_options* opts);
VIF_API vif_status vif_filter_new(const vif_ruleset* rules, const vif_filter_options* opts, vif_filter** out);
/* Filters every packet; decisions CSV "arrival_index,payload_tag,verdict,rule". */
VIF_API vif_status vif_filter_run(vif_filter* filter, const vif_trace* trace, char** decisions_csv);
VIF_API vif_status vif_filter_stats_get(const vif_filter* filter, vif_filter_stats* out);
/* role: VIF_SKETCH_FILTER_INCOMING or VIF_SKETCH_FILTER_OUTGOING; CSV "row,bin,count". */
VIF_API vif_status vif_filter_sketch_csv(const vif_filter* filter, vif_sketch_role role, char** csv);
VIF_API void vif_filter_free(vif_filter* filter);

/* ---- adversarial scenarios ---------------------------------------------- */

typedef struct vif_report vif_report;

VIF_API vif_status vif_scenario_run_file(const char* path, vif_report** out);
VIF_API vif_status vif_scenario_run_json(const char* json, const char* base_dir, vif_report** out);
VIF_API vif_status vif_report_json(const vif_report* report, char** json);
VIF_API vif_status vif_report_sketch_csv(const vif_report* report, vif_sketch_role role, char** csv);
/* "payload_tag,verdict,rule" sorted by tag. */
VIF_API vif_status vif_report_decisions_csv(const vif_report* report, char** csv);
VIF_API const char* vif_report_victim_kind(const vif_report* report);
VIF_API const char* vif_report_neighbor_kind(const vif_report* report);
VIF_API size_t vif_report_misdispatch_count(const vif_report* report);
VIF_API void vif_report_free(vif_report* report);

/* ---- rule distribution -------------------------------------------------- */

typedef struct vif_instance vif_instance;
typedef struct vif_plan vif_plan;

typedef struct vif_capacity {
    uint64_t memory_limit;   /* bytes */
    const char* bandwidth_limit; /* Gb/s */
    uint64_t bytes_per_rule;
    uint64_t fixed_overhead;
    const char* lambda;
    const char* alpha;       /* NULL: G / M */
    const char* delta_g;     /* NULL: G / 20 */
    uint64_t delta_h;        /* 0: max(1, ceil(k / 10n)) */
} vif_capacity;

VIF_API void vif_capacity_default(vif_capacity* cap);

VIF_API vif_status vif_instance_load(const char* path, vif_instance** out);
VIF_API vif_status vif_instance_parse(const char* csv, vif_instance** out);
VIF_API vif_status vif_instance_synthetic(size_t k, const char* total_gbps, double sigma, uint64_t seed,
                                          vif_instance** out);
VIF_API size_t vif_instance_size(const vif_instance* inst);
VIF_API vif_status vif_instance_csv(const vif_instance* inst, char** csv);
VIF_API void vif_instance_free(vif_instance* inst);

VIF_API vif_status vif_enclave_count(const vif_instance* inst, const vif_capacity* cap, uint64_t* n_min, uint64_t* n);
/* n = 0 takes n from vif_enclave_count. VIF_E_INFEASIBLE leaves *out NULL. */
VIF_API vif_status vif_greedy_solve(const vif_instance* inst, const vif_capacity* cap, size_t n, vif_plan** out);
VIF_API vif_status vif_exact_solve(const vif_instance* inst, const vif_capacity* cap, size_t n, vif_plan** out);
VIF_API size_t vif_plan_enclaves(const vif_plan* plan);
VIF_API double vif_plan_objective(const vif_plan* plan);
VIF_API vif_status vif_plan_objective_exact(const vif_plan* plan, char** value);
VIF_API uint64_t vif_plan_work(const vif_plan* plan);
/* "rule_id,enclave,xshare_gbps" */
VIF_API vif_status vif_plan_csv(const vif_plan* plan, char** csv);
/* {n, z, max_C, max_I, feasible, work} */
VIF_API vif_status vif_plan_summary_json(const vif_plan* plan, char** json);
/* VIF_OK when feasible; otherwise VIF_E_INFEASIBLE with one violation per line in *violations. */
VIF_API vif_status vif_plan_validate(const vif_plan* plan, const vif_instance* inst, const vif_capacity* cap,
                                     char** violations);
VIF_API void vif_plan_free(vif_plan* plan);

/* ---- multi-enclave cluster ---------------------------------------------- */

/* cluster_json as the "cluster" object of a scenario file. Outputs the
 * JSON-lines round log and a JSON summary. */
VIF_API vif_status vif_cluster_simulate(const vif_ruleset* rules, const vif_trace* trace, const char* cluster_json,
                                        char** round_log, char** summary_json);

/* ---- AS-level routing --------------------------------------------------- */

typedef struct vif_graph vif_graph;

typedef struct vif_coverage_options {
    size_t victims;
    size_t sources;
    size_t top_k;
    uint64_t seed;
    size_t threads;
} vif_coverage_options;

VIF_API vif_status vif_graph_load_caida(const char* path, vif_graph** out);
VIF_API vif_status vif_graph_parse_caida(const char* text, vif_graph** out);
VIF_API vif_status vif_graph_synthetic(size_t nodes, size_t ixps, uint64_t seed, vif_graph** out);
VIF_API vif_status vif_graph_load_ixps(vif_graph* graph, const char* path);
VIF_API vif_status vif_graph_parse_ixps(vif_graph* graph, const char* text);
VIF_API size_t vif_graph_node_count(const vif_graph* graph);
VIF_API size_t vif_graph_ixp_count(const vif_graph* graph);
/* Space-separated best path src..dst; empty string when there is none. */
VIF_API vif_status vif_graph_best_path(const vif_graph* graph, uint32_t src, uint32_t dst, char** path);
VIF_API void vif_graph_free(vif_graph* graph);

VIF_API void vif_coverage_options_default(vif_coverage_options* opts);
/* rows: "victim,ixp_set_size,region_policy,coverage";
 * summary: "region_policy,ixp_set_size,victims,p5,q1,median,q3,p95". */
VIF_API vif_status vif_coverage_study(const vif_graph* graph, const vif_coverage_options* opts, char** rows_csv,
                                      char** summary_csv);
/* "src,dst,path_count" */
VIF_API vif_status vif_altpath_study(const vif_graph* graph, size_t pairs, uint64_t seed, size_t threads, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* VIF_VIF_H */
