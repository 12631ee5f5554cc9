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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vif {

using AsId = std::uint32_t;
using IxpId = std::uint32_t;
using AsPath = std::vector<AsId>;

enum class Relation : std::int8_t { CustomerToProvider = -1, Peer = 0 };

/// How a route was learned, in decreasing preference.
enum class RouteClass : std::uint8_t { Origin = 0, Customer = 1, Peer = 2, Provider = 3 };

/**
 * AS-level topology with business relationships and IXP membership.
 * Immutable after construction apart from the builder calls.
 */
class AsGraph {
public:
    void add_node(AsId as);
    /// `customer` buys transit from `provider`.
    void add_customer_provider(AsId customer, AsId provider);
    void add_peering(AsId a, AsId b);
    void add_ixp_member(IxpId ixp, AsId as, const std::string& region = {});

    bool contains(AsId as) const { return adj_.count(as) != 0; }
    std::vector<AsId> nodes() const;
    std::size_t node_count() const noexcept { return adj_.size(); }
    std::size_t edge_count() const noexcept { return edges_; }

    const std::vector<AsId>& providers(AsId as) const;
    const std::vector<AsId>& customers(AsId as) const;
    const std::vector<AsId>& peers(AsId as) const;
    /// Relation of the link a -> b seen from a, if the link exists.
    std::optional<RouteClass> link_class(AsId a, AsId b) const;

    const std::map<IxpId, std::set<AsId>>& ixps() const noexcept { return ixps_; }
    const std::map<IxpId, std::string>& ixp_regions() const noexcept { return regions_; }

    /// CAIDA serial-1/2 lines "a|b|rel[|source]"; rel -1: a is provider of b, 0: peers.
    static AsGraph parse_caida(std::string_view text);
    static AsGraph load_caida(const std::string& path);
    /// "ixp|as[|region]" lines; '#' comments.
    void parse_ixp_membership(std::string_view text);
    void load_ixp_membership(const std::string& path);

    /// Preferential-attachment topology: node i >= 2 buys transit from
    /// 1..providers_per_node earlier ASes chosen by degree; extra peer
    /// links join ASes of similar degree; IXPs gather a degree-biased
    /// member sample. AS numbers are 1..nodes.
    static AsGraph synthetic(std::size_t nodes, std::size_t ixp_count, std::uint64_t seed,
                             std::size_t providers_per_node = 2, double peer_ratio = 0.2);

private:
    struct Adj {
        std::vector<AsId> providers, customers, peers;
    };
    Adj& node(AsId as);
    void check_new_link(AsId a, AsId b) const;

    std::map<AsId, Adj> adj_;
    std::map<IxpId, std::set<AsId>> ixps_;
    std::map<IxpId, std::string> regions_;
    std::size_t edges_ = 0;
};

struct RouteEntry {
    AsId next_hop = 0;
    std::uint32_t length = 0;  // AS hops to dest
    RouteClass cls = RouteClass::Origin;
};

/// Best routes of every AS towards one destination.
class RoutingOutcome {
public:
    RoutingOutcome() = default;
    RoutingOutcome(AsId dest, std::unordered_map<AsId, RouteEntry> routes)
        : dest_(dest), routes_(std::move(routes)) {}

    AsId dest() const noexcept { return dest_; }
    bool has_route(AsId from) const { return routes_.count(from) != 0; }
    const RouteEntry* route(AsId from) const;
    /// Path from `from` to dest inclusive of both ends; nullopt if absent.
    std::optional<AsPath> best_path(AsId from) const;
    const std::unordered_map<AsId, RouteEntry>& routes() const noexcept { return routes_; }

private:
    AsId dest_ = 0;
    std::unordered_map<AsId, RouteEntry> routes_;
};

/**
 * Gao-Rexford route selection towards `dest`: customer routes beat peer
 * routes beat provider routes, then shorter AS path, then lower next-hop
 * AS number. Routes learned from peers or providers are exported to
 * customers only. ASes in `excluded` neither hold nor forward routes.
 */
RoutingOutcome compute_routes(const AsGraph& graph, AsId dest, const std::set<AsId>& excluded = {});

/// True iff every step obeys up* (peer)? down*.
bool is_valley_free(const AsGraph& graph, const AsPath& path);

/// Two consecutive path ASes both in one of `ixps`.
bool crosses_ixp(const AsGraph& graph, const AsPath& path, const std::set<IxpId>& ixps);

/// Fraction of `sources` (with multiplicity) whose best path to `victim`
/// crosses one of `ixps`. Sources without a route count as uncovered.
double ixp_coverage(const AsGraph& graph, AsId victim, std::span<const AsId> sources, const std::set<IxpId>& ixps);
double ixp_coverage(const AsGraph& graph, const RoutingOutcome& to_victim, std::span<const AsId> sources,
                    const std::set<IxpId>& ixps);

/// Default path plus best paths found by excluding each intermediate AS of
/// the default path one at a time (ascending AS id), deduplicated.
std::vector<AsPath> alternative_paths(const AsGraph& graph, AsId src, AsId dst);
std::size_t alternative_path_count(const AsGraph& graph, AsId src, AsId dst);

/// IXPs ordered by member count (desc), ties by id.
std::vector<IxpId> ixps_by_size(const AsGraph& graph);

/// ASes with providers but no customers.
std::vector<AsId> stub_ases(const AsGraph& graph);

struct CoverageStudyConfig {
    std::size_t victims = 100;
    std::size_t sources = 1000;  // sampled with replacement over all ASes
    std::size_t top_k = 5;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

struct CoverageRow {
    AsId victim = 0;
    std::size_t ixp_set_size = 0;
    std::string region_policy;  // "global" or a region name
    double coverage = 0;
};

/**
 * Victims are sampled from stub ASes (all ASes if there are none). For
 * each victim and k = 1..top_k the top-k IXPs by membership are selected
 * globally and, when the membership file carries regions, per region.
 * Rows are ordered by victim sample, policy, k.
 */
std::vector<CoverageRow> coverage_study(const AsGraph& graph, const CoverageStudyConfig& cfg);

struct CoverageSummary {
    std::string region_policy;
    std::size_t ixp_set_size = 0;
    std::size_t victims = 0;
    double p5 = 0, q1 = 0, median = 0, q3 = 0, p95 = 0;
};

/// Box-plot statistics per (policy, k), linear-interpolated percentiles.
std::vector<CoverageSummary> summarize_coverage(std::span<const CoverageRow> rows);
double percentile(std::vector<double> values, double q);

/// "victim,ixp_set_size,region_policy,coverage"
std::string format_coverage_csv(std::span<const CoverageRow> rows);
/// "region_policy,ixp_set_size,victims,p5,q1,median,q3,p95"
std::string format_coverage_summary_csv(std::span<const CoverageSummary> rows);

struct AltPathRow {
    AsId src = 0;
    AsId dst = 0;
    std::size_t count = 0;
};

/// `pairs` random (source, stub destination) pairs, each with its
/// alternative path count (0 when no route exists).
std::vector<AltPathRow> altpath_study(const AsGraph& graph, std::size_t pairs, std::uint64_t seed,
                                      std::size_t threads = 1);
/// "src,dst,path_count"
std::string format_altpath_csv(std::span<const AltPathRow> rows);

}  // namespace vif
