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

#include "vif/route_sim.hpp"

#include <algorithm>
#include <random>

#include "io.hpp"
#include "vif/error.hpp"

namespace vif {

namespace {

const std::vector<AsId> kEmpty;

void insert_sorted(std::vector<AsId>& v, AsId x) { v.insert(std::upper_bound(v.begin(), v.end(), x), x); }

bool has(const std::vector<AsId>& v, AsId x) { return std::binary_search(v.begin(), v.end(), x); }

}  // namespace

AsGraph::Adj& AsGraph::node(AsId as) { return adj_[as]; }

void AsGraph::add_node(AsId as) { adj_.try_emplace(as); }

void AsGraph::check_new_link(AsId a, AsId b) const {
    if (a == b) throw Error(ErrorCode::InvalidArgument, "self-edge on AS" + std::to_string(a));
    auto it = adj_.find(a);
    if (it == adj_.end()) return;
    const auto& n = it->second;
    if (has(n.providers, b) || has(n.customers, b) || has(n.peers, b))
        throw Error(ErrorCode::InvalidArgument,
                    "duplicate relation between AS" + std::to_string(a) + " and AS" + std::to_string(b));
}

void AsGraph::add_customer_provider(AsId customer, AsId provider) {
    check_new_link(customer, provider);
    insert_sorted(node(customer).providers, provider);
    insert_sorted(node(provider).customers, customer);
    ++edges_;
}

void AsGraph::add_peering(AsId a, AsId b) {
    check_new_link(a, b);
    insert_sorted(node(a).peers, b);
    insert_sorted(node(b).peers, a);
    ++edges_;
}

void AsGraph::add_ixp_member(IxpId ixp, AsId as, const std::string& region) {
    add_node(as);
    ixps_[ixp].insert(as);
    if (!region.empty()) regions_[ixp] = region;
}

std::vector<AsId> AsGraph::nodes() const {
    std::vector<AsId> out;
    out.reserve(adj_.size());
    for (const auto& [as, _] : adj_) out.push_back(as);
    return out;
}

const std::vector<AsId>& AsGraph::providers(AsId as) const {
    auto it = adj_.find(as);
    return it == adj_.end() ? kEmpty : it->second.providers;
}
const std::vector<AsId>& AsGraph::customers(AsId as) const {
    auto it = adj_.find(as);
    return it == adj_.end() ? kEmpty : it->second.customers;
}
const std::vector<AsId>& AsGraph::peers(AsId as) const {
    auto it = adj_.find(as);
    return it == adj_.end() ? kEmpty : it->second.peers;
}

std::optional<RouteClass> AsGraph::link_class(AsId a, AsId b) const {
    if (has(customers(a), b)) return RouteClass::Customer;
    if (has(peers(a), b)) return RouteClass::Peer;
    if (has(providers(a), b)) return RouteClass::Provider;
    return std::nullopt;
}

AsGraph AsGraph::parse_caida(std::string_view text) {
    AsGraph g;
    std::size_t line_no = 0;
    for (auto line : detail::split(text, '\n')) {
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        try {
            auto f = detail::split(line, '|');
            if (f.size() < 3) throw ParseError("expected as1|as2|rel");
            auto a = detail::parse_uint<AsId>(f[0], "AS number");
            auto b = detail::parse_uint<AsId>(f[1], "AS number");
            auto rel = detail::trim(f[2]);
            if (rel == "-1")
                g.add_customer_provider(b, a);
            else if (rel == "0")
                g.add_peering(a, b);
            else
                throw ParseError("unknown relation '" + std::string(rel) + "'");
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return g;
}

AsGraph AsGraph::load_caida(const std::string& path) { return parse_caida(detail::read_file(path)); }

void AsGraph::parse_ixp_membership(std::string_view text) {
    std::size_t line_no = 0;
    for (auto line : detail::split(text, '\n')) {
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        try {
            auto f = detail::split(line, '|');
            if (f.size() < 2 || f.size() > 3) throw ParseError("expected ixp|as[|region]");
            auto ixp = detail::parse_uint<IxpId>(f[0], "IXP id");
            auto as = detail::parse_uint<AsId>(f[1], "AS number");
            add_ixp_member(ixp, as, f.size() == 3 ? std::string(detail::trim(f[2])) : std::string{});
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void AsGraph::load_ixp_membership(const std::string& path) { parse_ixp_membership(detail::read_file(path)); }

AsGraph AsGraph::synthetic(std::size_t nodes, std::size_t ixp_count, std::uint64_t seed,
                           std::size_t providers_per_node, double peer_ratio) {
    if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "synthetic topology needs at least 2 ASes");
    std::mt19937_64 rng(seed);
    auto uniform = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    AsGraph g;
    std::vector<std::size_t> degree(nodes + 1, 0);
    std::vector<AsId> ticket;  // AS ids repeated by degree + 1
    g.add_node(1);
    ticket.push_back(1);
    for (AsId as = 2; as <= nodes; ++as) {
        g.add_node(as);
        std::size_t want = 1 + uniform(std::max<std::size_t>(providers_per_node, 1));
        std::set<AsId> chosen;
        for (std::size_t tries = 0; chosen.size() < want && tries < 8 * want; ++tries)
            chosen.insert(ticket[uniform(ticket.size())]);
        for (auto p : chosen) {
            g.add_customer_provider(as, p);
            ++degree[p];
            ++degree[as];
            ticket.push_back(p);
        }
        ticket.push_back(as);
    }
    // Peer links between ASes of similar degree.
    std::vector<AsId> by_degree(nodes);
    for (std::size_t i = 0; i < nodes; ++i) by_degree[i] = static_cast<AsId>(i + 1);
    std::stable_sort(by_degree.begin(), by_degree.end(),
                     [&](AsId a, AsId b) { return degree[a] > degree[b]; });
    auto peer_links = static_cast<std::size_t>(peer_ratio * static_cast<double>(nodes));
    for (std::size_t made = 0, tries = 0; made < peer_links && tries < 20 * peer_links + 20; ++tries) {
        auto i = uniform(nodes);
        auto j = std::min(nodes - 1, i + 1 + uniform(4));
        AsId a = by_degree[i], b = by_degree[j];
        if (a == b || g.link_class(a, b)) continue;
        g.add_peering(a, b);
        ++made;
    }
    for (IxpId ixp = 1; ixp <= ixp_count; ++ixp) {
        std::size_t size = std::max<std::size_t>(2, nodes / 20 + uniform(std::max<std::size_t>(nodes / 5, 1)));
        for (std::size_t k = 0; k < size; ++k) g.add_ixp_member(ixp, ticket[uniform(ticket.size())]);
    }
    return g;
}

const RouteEntry* RoutingOutcome::route(AsId from) const {
    auto it = routes_.find(from);
    return it == routes_.end() ? nullptr : &it->second;
}

std::optional<AsPath> RoutingOutcome::best_path(AsId from) const {
    auto* r = route(from);
    if (!r) return std::nullopt;
    AsPath path{from};
    while (from != dest_) {
        from = r->next_hop;
        r = route(from);
        path.push_back(from);
    }
    return path;
}

RoutingOutcome compute_routes(const AsGraph& graph, AsId dest, const std::set<AsId>& excluded) {
    if (!graph.contains(dest)) throw Error(ErrorCode::InvalidArgument, "destination AS" + std::to_string(dest) + " not in graph");
    if (excluded.count(dest)) throw Error(ErrorCode::InvalidArgument, "destination is excluded");
    std::unordered_map<AsId, RouteEntry> routes;
    auto usable = [&](AsId as) { return !excluded.count(as) && !routes.count(as); };
    routes[dest] = RouteEntry{dest, 0, RouteClass::Origin};

    // Customer routes: breadth-first up the provider hierarchy.
    std::vector<AsId> frontier{dest};
    for (std::uint32_t len = 1; !frontier.empty(); ++len) {
        std::map<AsId, AsId> offers;  // AS -> lowest next hop
        for (auto u : frontier)
            for (auto p : graph.providers(u)) {
                if (!usable(p)) continue;
                auto [it, fresh] = offers.emplace(p, u);
                if (!fresh) it->second = std::min(it->second, u);
            }
        frontier.clear();
        for (auto [as, hop] : offers) {
            routes[as] = RouteEntry{hop, len, RouteClass::Customer};
            frontier.push_back(as);
        }
    }

    // Peer routes: one hop across a peering link onto a customer route.
    std::map<AsId, RouteEntry> peer_routes;
    for (const auto& [as, entry] : routes) {
        for (auto q : graph.peers(as)) {
            if (!usable(q)) continue;
            RouteEntry cand{as, entry.length + 1, RouteClass::Peer};
            auto [it, fresh] = peer_routes.emplace(q, cand);
            if (!fresh && (cand.length < it->second.length ||
                           (cand.length == it->second.length && cand.next_hop < it->second.next_hop)))
                it->second = cand;
        }
    }
    for (const auto& [as, entry] : peer_routes) routes[as] = entry;

    // Provider routes: any route flows down to customers, shortest first.
    std::vector<std::vector<AsId>> buckets;
    for (const auto& [as, entry] : routes) {
        if (buckets.size() <= entry.length) buckets.resize(entry.length + 1);
        buckets[entry.length].push_back(as);
    }
    for (std::uint32_t len = 0; len < buckets.size(); ++len) {
        std::map<AsId, AsId> offers;
        for (auto u : buckets[len])
            for (auto c : graph.customers(u)) {
                if (!usable(c)) continue;
                auto [it, fresh] = offers.emplace(c, u);
                if (!fresh) it->second = std::min(it->second, u);
            }
        if (offers.empty()) continue;
        if (buckets.size() <= len + 1) buckets.resize(len + 2);
        for (auto [as, hop] : offers) {
            routes[as] = RouteEntry{hop, len + 1, RouteClass::Provider};
            buckets[len + 1].push_back(as);
        }
    }
    return RoutingOutcome{dest, std::move(routes)};
}

bool is_valley_free(const AsGraph& graph, const AsPath& path) {
    // 0: climbing, 1: after the peak (peer or first downhill step)
    int phase = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto cls = graph.link_class(path[i], path[i + 1]);
        if (!cls) return false;
        switch (*cls) {
            case RouteClass::Provider:
                if (phase != 0) return false;
                break;
            case RouteClass::Peer:
                if (phase != 0) return false;
                phase = 1;
                break;
            case RouteClass::Customer:
                phase = 1;
                break;
            default:
                return false;
        }
    }
    std::set<AsId> seen(path.begin(), path.end());
    return seen.size() == path.size();
}

bool crosses_ixp(const AsGraph& graph, const AsPath& path, const std::set<IxpId>& ixps) {
    const auto& all = graph.ixps();
    for (auto id : ixps) {
        auto it = all.find(id);
        if (it == all.end()) continue;
        const auto& members = it->second;
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            if (members.count(path[i]) && members.count(path[i + 1])) return true;
    }
    return false;
}

double ixp_coverage(const AsGraph& graph, const RoutingOutcome& to_victim, std::span<const AsId> sources,
                    const std::set<IxpId>& ixps) {
    if (sources.empty() || ixps.empty()) return 0.0;
    std::size_t covered = 0;
    for (auto s : sources) {
        auto path = to_victim.best_path(s);
        if (path && crosses_ixp(graph, *path, ixps)) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(sources.size());
}

double ixp_coverage(const AsGraph& graph, AsId victim, std::span<const AsId> sources, const std::set<IxpId>& ixps) {
    return ixp_coverage(graph, compute_routes(graph, victim), sources, ixps);
}

std::vector<AsPath> alternative_paths(const AsGraph& graph, AsId src, AsId dst) {
    if (src == dst) throw Error(ErrorCode::InvalidArgument, "source equals destination");
    auto base = compute_routes(graph, dst).best_path(src);
    if (!base) return {};
    std::vector<AsPath> out{*base};
    std::vector<AsId> intermediates(base->begin() + 1, base->end() - 1);
    std::sort(intermediates.begin(), intermediates.end());
    for (auto x : intermediates) {
        auto alt = compute_routes(graph, dst, {x}).best_path(src);
        if (alt && std::find(out.begin(), out.end(), *alt) == out.end()) out.push_back(*alt);
    }
    return out;
}

std::size_t alternative_path_count(const AsGraph& graph, AsId src, AsId dst) {
    return alternative_paths(graph, src, dst).size();
}

std::vector<IxpId> ixps_by_size(const AsGraph& graph) {
    std::vector<IxpId> ids;
    for (const auto& [id, _] : graph.ixps()) ids.push_back(id);
    std::stable_sort(ids.begin(), ids.end(), [&](IxpId a, IxpId b) {
        return graph.ixps().at(a).size() > graph.ixps().at(b).size();
    });
    return ids;
}

std::vector<AsId> stub_ases(const AsGraph& graph) {
    std::vector<AsId> out;
    for (auto as : graph.nodes())
        if (graph.customers(as).empty() && !graph.providers(as).empty()) out.push_back(as);
    return out;
}

}  // namespace vif
