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
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <mutex>
#include <thread>

#include "vif/error.hpp"
#include "vif/route_sim.hpp"

namespace vif {

namespace {

// Runs body(i) for i in [0, count) on up to `threads` workers; each index
// writes only its own output slot.
template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string format_fixed(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::vector<CoverageRow> coverage_study(const AsGraph& graph, const CoverageStudyConfig& cfg) {
    if (graph.node_count() < 2) throw Error(ErrorCode::InvalidArgument, "topology needs at least two ASes");
    std::mt19937_64 rng(cfg.seed);
    auto nodes = graph.nodes();
    auto candidates = stub_ases(graph);
    if (candidates.empty()) candidates = nodes;
    std::vector<AsId> victims;
    std::sample(candidates.begin(), candidates.end(), std::back_inserter(victims),
                std::min(cfg.victims, candidates.size()), rng);
    std::vector<AsId> sources(cfg.sources);
    for (auto& s : sources) s = nodes[rng() % nodes.size()];

    // (policy, ranked IXPs) with "global" first, then regions by name.
    std::vector<std::pair<std::string, std::vector<IxpId>>> policies;
    auto ranked = ixps_by_size(graph);
    policies.emplace_back("global", ranked);
    std::map<std::string, std::vector<IxpId>> by_region;
    for (auto ixp : ranked) {
        auto it = graph.ixp_regions().find(ixp);
        if (it != graph.ixp_regions().end() && !it->second.empty()) by_region[it->second].push_back(ixp);
    }
    for (auto& [region, list] : by_region) policies.emplace_back(region, list);

    std::vector<std::vector<CoverageRow>> per_victim(victims.size());
    parallel_for(victims.size(), cfg.threads, [&](std::size_t v) {
        const AsId victim = victims[v];
        auto routes = compute_routes(graph, victim);
        std::vector<AsId> srcs;
        for (auto s : sources)
            if (s != victim) srcs.push_back(s);
        for (const auto& [policy, list] : policies) {
            std::set<IxpId> chosen;
            for (std::size_t k = 1; k <= cfg.top_k; ++k) {
                if (k <= list.size()) chosen.insert(list[k - 1]);
                per_victim[v].push_back({victim, k, policy, ixp_coverage(graph, routes, srcs, chosen)});
            }
        }
    });
    std::vector<CoverageRow> rows;
    for (auto& r : per_victim) rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "percentile of empty sample");
    if (!(q >= 0 && q <= 1)) throw DomainError("quantile must be in [0, 1]");
    std::sort(values.begin(), values.end());
    double pos = q * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

std::vector<CoverageSummary> summarize_coverage(std::span<const CoverageRow> rows) {
    std::vector<std::pair<std::string, std::size_t>> order;
    std::map<std::pair<std::string, std::size_t>, std::vector<double>> groups;
    for (const auto& r : rows) {
        auto key = std::make_pair(r.region_policy, r.ixp_set_size);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) order.push_back(key);
        it->second.push_back(r.coverage);
    }
    std::vector<CoverageSummary> out;
    for (const auto& key : order) {
        const auto& v = groups.at(key);
        out.push_back({key.first, key.second, v.size(), percentile(v, 0.05), percentile(v, 0.25), percentile(v, 0.5),
                       percentile(v, 0.75), percentile(v, 0.95)});
    }
    return out;
}

std::string format_coverage_csv(std::span<const CoverageRow> rows) {
    std::ostringstream os;
    os << "victim,ixp_set_size,region_policy,coverage\n";
    for (const auto& r : rows)
        os << r.victim << ',' << r.ixp_set_size << ',' << r.region_policy << ',' << format_fixed(r.coverage) << '\n';
    return os.str();
}

std::string format_coverage_summary_csv(std::span<const CoverageSummary> rows) {
    std::ostringstream os;
    os << "region_policy,ixp_set_size,victims,p5,q1,median,q3,p95\n";
    for (const auto& r : rows)
        os << r.region_policy << ',' << r.ixp_set_size << ',' << r.victims << ',' << format_fixed(r.p5) << ','
           << format_fixed(r.q1) << ',' << format_fixed(r.median) << ',' << format_fixed(r.q3) << ','
           << format_fixed(r.p95) << '\n';
    return os.str();
}

std::vector<AltPathRow> altpath_study(const AsGraph& graph, std::size_t pairs, std::uint64_t seed,
                                      std::size_t threads) {
    if (graph.node_count() < 2) throw Error(ErrorCode::InvalidArgument, "topology needs at least two ASes");
    std::mt19937_64 rng(seed);
    auto nodes = graph.nodes();
    auto dsts = stub_ases(graph);
    if (dsts.empty()) dsts = nodes;
    std::vector<AltPathRow> rows(pairs);
    for (auto& r : rows) {
        r.dst = dsts[rng() % dsts.size()];
        do r.src = nodes[rng() % nodes.size()];
        while (r.src == r.dst);
    }
    parallel_for(rows.size(), threads,
                 [&](std::size_t i) { rows[i].count = alternative_path_count(graph, rows[i].src, rows[i].dst); });
    return rows;
}

std::string format_altpath_csv(std::span<const AltPathRow> rows) {
    std::ostringstream os;
    os << "src,dst,path_count\n";
    for (const auto& r : rows) os << r.src << ',' << r.dst << ',' << r.count << '\n';
    return os.str();
}

}  // namespace vif
