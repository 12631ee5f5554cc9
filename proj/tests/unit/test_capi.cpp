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

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "vif/vif.h"

namespace {

std::string data(const std::string& name) {
    const char* d = std::getenv("VIF_TEST_DATA");
    REQUIRE(d != nullptr);
    return std::string(d) + "/" + name;
}

std::string take(char* s) {
    REQUIRE(s != nullptr);
    std::string out(s);
    vif_string_free(s);
    return out;
}

}  // namespace

TEST_CASE("status names and errors") {
    CHECK(std::string(vif_status_name(VIF_OK)) == "OK");
    CHECK(std::string(vif_version()).size() > 0);
    vif_ruleset* rs = nullptr;
    CHECK(vif_ruleset_parse("not a rule\n", &rs) == VIF_E_PARSE);
    CHECK(rs == nullptr);
    CHECK(std::string(vif_last_error()).find("line 1") != std::string::npos);
    CHECK(vif_ruleset_parse(nullptr, &rs) == VIF_E_INVALID_ARGUMENT);
    CHECK(vif_ruleset_load("/nonexistent/rules.txt", &rs) == VIF_E_IO);
}

TEST_CASE("filter over the fixture trace is reproducible") {
    vif_ruleset* rs = nullptr;
    REQUIRE(vif_ruleset_load(data("rules.txt").c_str(), &rs) == VIF_OK);
    CHECK(vif_ruleset_size(rs) == 5);
    vif_trace* tr = nullptr;
    REQUIRE(vif_trace_load(data("trace.csv").c_str(), &tr) == VIF_OK);
    CHECK(vif_trace_size(tr) == 300);

    vif_filter_options opts;
    vif_filter_options_default(&opts);
    opts.secret_seed = 42;
    opts.update_period = 50;
    std::string first, second;
    for (auto* out : {&first, &second}) {
        vif_filter* f = nullptr;
        REQUIRE(vif_filter_new(rs, &opts, &f) == VIF_OK);
        char* csv = nullptr;
        REQUIRE(vif_filter_run(f, tr, &csv) == VIF_OK);
        *out = take(csv);
        vif_filter_stats st;
        REQUIRE(vif_filter_stats_get(f, &st) == VIF_OK);
        CHECK(st.packets == 300);
        CHECK(st.lookups <= 300);
        CHECK(st.sketch_updates <= 600);
        char* sk = nullptr;
        REQUIRE(vif_filter_sketch_csv(f, VIF_SKETCH_FILTER_INCOMING, &sk) == VIF_OK);
        CHECK(take(sk).rfind("row,bin,count", 0) == 0);
        CHECK(vif_filter_sketch_csv(f, VIF_SKETCH_VICTIM_RECEIVED, &sk) == VIF_E_INVALID_ARGUMENT);
        vif_filter_free(f);
    }
    CHECK(first == second);
    vif_trace_free(tr);
    vif_ruleset_free(rs);
}

TEST_CASE("scenario reports through the C API") {
    std::string dir = data("../../scenarios");
    vif_report* clean = nullptr;
    REQUIRE(vif_scenario_run_file((dir + "/clean.json").c_str(), &clean) == VIF_OK);
    CHECK(std::string(vif_report_victim_kind(clean)) == "CLEAN");
    CHECK(std::string(vif_report_neighbor_kind(clean)) == "CLEAN");
    CHECK(vif_report_misdispatch_count(clean) == 0);
    vif_report* inject = nullptr;
    REQUIRE(vif_scenario_run_file((dir + "/inject_after.json").c_str(), &inject) == VIF_OK);
    CHECK(std::string(vif_report_victim_kind(inject)) == "INJECTION_AFTER");
    char* json = nullptr;
    REQUIRE(vif_report_json(inject, &json) == VIF_OK);
    CHECK(take(json).find("\"events\"") != std::string::npos);
    char* dec = nullptr;
    REQUIRE(vif_report_decisions_csv(clean, &dec) == VIF_OK);
    CHECK_FALSE(take(dec).empty());
    vif_report_free(clean);
    vif_report_free(inject);

    vif_report* bad = nullptr;
    CHECK(vif_scenario_run_json("{\"profile\": {}}", ".", &bad) == VIF_E_PARSE);
    CHECK(bad == nullptr);
}

TEST_CASE("distribution through the C API") {
    vif_instance* inst = nullptr;
    REQUIRE(vif_instance_load(data("instance_small.csv").c_str(), &inst) == VIF_OK);
    CHECK(vif_instance_size(inst) == 10);
    vif_capacity cap;
    vif_capacity_default(&cap);
    std::uint64_t n_min = 0, n = 0;
    REQUIRE(vif_enclave_count(inst, &cap, &n_min, &n) == VIF_OK);
    CHECK(n >= n_min);
    vif_plan* g = nullptr;
    vif_plan* x = nullptr;
    REQUIRE(vif_greedy_solve(inst, &cap, 0, &g) == VIF_OK);
    REQUIRE(vif_exact_solve(inst, &cap, n, &x) == VIF_OK);
    CHECK(vif_plan_objective(x) <= vif_plan_objective(g) + 1e-12);
    char* viol = nullptr;
    CHECK(vif_plan_validate(g, inst, &cap, &viol) == VIF_OK);
    if (viol) vif_string_free(viol);
    char* csv = nullptr;
    REQUIRE(vif_plan_csv(g, &csv) == VIF_OK);
    CHECK(take(csv).rfind("rule_id,enclave,xshare_gbps", 0) == 0);
    char* z = nullptr;
    REQUIRE(vif_plan_objective_exact(x, &z) == VIF_OK);
    CHECK_FALSE(take(z).empty());
    vif_plan_free(g);
    vif_plan_free(x);

    vif_plan* none = nullptr;
    cap.bandwidth_limit = "0.001";
    CHECK(vif_greedy_solve(inst, &cap, 1, &none) == VIF_E_INFEASIBLE);
    CHECK(none == nullptr);
    cap.bandwidth_limit = "zero";
    CHECK(vif_greedy_solve(inst, &cap, 1, &none) == VIF_E_PARSE);
    vif_instance_free(inst);

    vif_instance* syn = nullptr;
    REQUIRE(vif_instance_synthetic(100, "50", 1.0, 3, &syn) == VIF_OK);
    CHECK(vif_instance_size(syn) == 100);
    vif_instance_free(syn);
}

TEST_CASE("cluster simulation through the C API") {
    vif_ruleset* rs = nullptr;
    REQUIRE(vif_ruleset_load(data("rules.txt").c_str(), &rs) == VIF_OK);
    vif_trace* tr = nullptr;
    REQUIRE(vif_trace_load(data("trace.csv").c_str(), &tr) == VIF_OK);
    char* log = nullptr;
    char* summary = nullptr;
    REQUIRE(vif_cluster_simulate(rs, tr, "{\"round_packets\": 100, \"threaded\": false}", &log, &summary) == VIF_OK);
    auto l = take(log);
    auto s = take(summary);
    CHECK(std::count(l.begin(), l.end(), '\n') == 3);
    CHECK(s.find("\"rounds\": 3") != std::string::npos);
    CHECK(vif_cluster_simulate(rs, tr, "{", &log, &summary) == VIF_E_PARSE);
    vif_trace_free(tr);
    vif_ruleset_free(rs);
}

TEST_CASE("routing through the C API") {
    vif_graph* g = nullptr;
    REQUIRE(vif_graph_parse_caida("1|2|-1\n1|3|-1\n2|4|-1\n", &g) == VIF_OK);
    CHECK(vif_graph_node_count(g) == 4);
    char* path = nullptr;
    REQUIRE(vif_graph_best_path(g, 4, 3, &path) == VIF_OK);
    CHECK(take(path) == "4 2 1 3");
    REQUIRE(vif_graph_parse_ixps(g, "7|1\n7|2\n") == VIF_OK);
    CHECK(vif_graph_ixp_count(g) == 1);
    vif_graph_free(g);

    REQUIRE(vif_graph_load_caida(data("caida_small.txt").c_str(), &g) == VIF_OK);
    REQUIRE(vif_graph_load_ixps(g, data("ixps_small.txt").c_str()) == VIF_OK);
    vif_coverage_options opts;
    vif_coverage_options_default(&opts);
    opts.victims = 4;
    opts.sources = 30;
    opts.top_k = 2;
    char* rows = nullptr;
    char* sum = nullptr;
    REQUIRE(vif_coverage_study(g, &opts, &rows, &sum) == VIF_OK);
    CHECK(take(rows).rfind("victim,ixp_set_size,region_policy,coverage", 0) == 0);
    CHECK(take(sum).rfind("region_policy,ixp_set_size,victims,p5,q1,median,q3,p95", 0) == 0);
    char* alt = nullptr;
    REQUIRE(vif_altpath_study(g, 5, 1, 1, &alt) == VIF_OK);
    CHECK(take(alt).rfind("src,dst,path_count", 0) == 0);
    vif_graph_free(g);

    CHECK(vif_graph_parse_caida("1|2|9\n", &g) == VIF_E_PARSE);
}
