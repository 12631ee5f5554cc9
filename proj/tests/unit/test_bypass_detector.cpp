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

#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "oracles.hpp"
#include "vif/bypass_detector.hpp"

using namespace vif;

namespace {

SketchParams mode(KeyMode m) {
    SketchParams p;
    p.key_mode = m;
    return p;
}

struct Logs {
    CountMinSketch filter_out{mode(KeyMode::PerFiveTuple)};
    CountMinSketch victim{mode(KeyMode::PerFiveTuple)};
    CountMinSketch filter_in{mode(KeyMode::PerSourceIp)};
    CountMinSketch neighbor{mode(KeyMode::PerSourceIp)};
};

Logs honest(const std::vector<Packet>& t) {
    Logs l;
    for (const auto& p : t) {
        l.filter_out.update(p);
        l.victim.update(p);
        l.filter_in.update(p);
        l.neighbor.update(p);
    }
    return l;
}

// 1 buys transit from 2 and 3; 2 sells to 4 and 7, 3 to 5; the victim 6
// buys from 4, 5 and 7.
AsGraph toy() {
    AsGraph g;
    g.add_customer_provider(1, 2);
    g.add_customer_provider(1, 3);
    g.add_customer_provider(4, 2);
    g.add_customer_provider(7, 2);
    g.add_customer_provider(5, 3);
    g.add_customer_provider(6, 4);
    g.add_customer_provider(6, 5);
    g.add_customer_provider(6, 7);
    return g;
}

bool contains(const AsPath& p, AsId a) { return std::find(p.begin(), p.end(), a) != p.end(); }

}  // namespace

TEST_CASE("honest relay is clean on both checks") {
    std::mt19937_64 rng(1);
    auto l = honest(gen::trace(rng, 200, 3));
    auto v = victim_check(l.filter_out, l.victim);
    auto n = neighbor_check(l.filter_in, l.neighbor);
    CHECK(v.kind == BypassKind::Clean);
    CHECK(v.evidence.empty());
    CHECK(n.kind == BypassKind::Clean);
    CHECK(v.suspected_mass_bytes == 0);
}

TEST_CASE("one packet injected after filtering") {
    std::mt19937_64 rng(2);
    auto l = honest(gen::trace(rng, 100, 2));
    l.victim.update(Packet{gen::key(rng), 777, 0, 0});
    auto v = victim_check(l.filter_out, l.victim);
    CHECK(v.kind == BypassKind::InjectionAfter);
    CHECK(v.suspected_mass_bytes == 777);
    CHECK_FALSE(v.evidence.empty());
}

TEST_CASE("one allowed packet dropped after filtering") {
    std::mt19937_64 rng(3);
    auto t = gen::trace(rng, 100, 2);
    Logs l;
    for (std::size_t i = 0; i < t.size(); ++i) {
        l.filter_out.update(t[i]);
        if (i != 17) l.victim.update(t[i]);
    }
    auto v = victim_check(l.filter_out, l.victim);
    CHECK(v.kind == BypassKind::DropAfter);
    CHECK(v.suspected_mass_bytes == t[17].size_bytes);
}

TEST_CASE("injection and drop together are mixed") {
    std::mt19937_64 rng(4);
    auto t = gen::trace(rng, 50, 1);
    Logs l;
    for (std::size_t i = 0; i < t.size(); ++i) {
        l.filter_out.update(t[i]);
        if (i != 0) l.victim.update(t[i]);
    }
    l.victim.update(Packet{gen::key(rng), 50, 0, 0});
    CHECK(victim_check(l.filter_out, l.victim).kind == BypassKind::Mixed);
}

TEST_CASE("ten packets diverted away from the filter are a drop before filtering") {
    std::mt19937_64 rng(5);
    auto t = gen::trace(rng, 100, 3);
    Logs l;
    std::uint64_t diverted = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        l.neighbor.update(t[i]);
        if (i < 10)
            diverted += t[i].size_bytes;
        else
            l.filter_in.update(t[i]);
    }
    auto n = neighbor_check(l.filter_in, l.neighbor);
    CHECK(n.kind == BypassKind::DropBefore);
    CHECK(n.suspected_mass_bytes == diverted);
    CHECK(n.unattributed_mass_bytes == 0);
}

TEST_CASE("injection before filtering is not reported as a drop") {
    std::mt19937_64 rng(6);
    auto l = honest(gen::trace(rng, 100, 1));
    l.filter_in.update(Packet{gen::key(rng), 400, 0, 0});
    auto n = neighbor_check(l.filter_in, l.neighbor);
    CHECK(n.kind == BypassKind::Mixed);
    CHECK(n.suspected_mass_bytes == 0);
    CHECK(n.unattributed_mass_bytes == 400);
}

TEST_CASE("batches of same-sign events are always detected") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        auto l = honest(gen::trace(rng, 50, 2));
        std::size_t events = 1 + rng() % 20;
        for (std::size_t e = 0; e < events; ++e) l.victim.update(Packet{gen::key(rng), 1 + static_cast<std::uint32_t>(rng() % 1500), 0, 0});
        CHECK(victim_check(l.filter_out, l.victim).kind == BypassKind::InjectionAfter);
    }
}

TEST_CASE("checks refuse incomparable or wrongly keyed sketches") {
    Logs l;
    CHECK_THROWS_AS(victim_check(l.filter_in, l.victim), IncomparableError);
    CHECK_THROWS_AS(neighbor_check(l.filter_out, l.neighbor), IncomparableError);
    SketchParams other = mode(KeyMode::PerFiveTuple);
    other.session_seed = 42;
    CHECK_THROWS_AS(victim_check(l.filter_out, CountMinSketch(other)), IncomparableError);
}

TEST_CASE("route exclusion isolates the dropping AS") {
    auto g = toy();
    auto r = route_exclusion_test(g, 6, 1, [](const AsPath& p) { return contains(p, 4); });
    CHECK(r.suspects == std::set<AsId>{4});
    REQUIRE(r.tested_paths.size() >= 2);
    for (std::size_t i = 0; i < r.tested_paths.size(); ++i) {
        CHECK(oracle::valley_free(g, r.tested_paths[i]));
        CHECK(r.drops[i] == contains(r.tested_paths[i], 4));
    }
    CHECK(r.tested_paths[0] == oracle::stable_routes(g, 6)[1]);
}

TEST_CASE("route exclusion without drops suspects nobody") {
    auto r = route_exclusion_test(toy(), 6, 1, [](const AsPath&) { return false; });
    CHECK(r.suspects.empty());
    CHECK(r.tested_paths.size() == 1);
}

TEST_CASE("drops on every path blame the filtering network") {
    auto r = route_exclusion_test(toy(), 6, 1, [](const AsPath&) { return true; });
    CHECK(r.suspects == std::set<AsId>{1});
}

TEST_CASE("route exclusion needs a path") {
    AsGraph g = toy();
    g.add_node(99);
    CHECK_THROWS_AS(route_exclusion_test(g, 99, 1, [](const AsPath&) { return true; }), Error);
}
