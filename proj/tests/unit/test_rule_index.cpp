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
#include "vif/rule_index.hpp"

using namespace vif;

TEST_CASE("empty index never matches") {
    RuleIndex idx{RuleSet{}};
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) CHECK_FALSE(idx.lookup(gen::key(rng)).has_value());
}

TEST_CASE("earlier rule wins even when a later one is more specific") {
    auto rs = parse_ruleset(
        "10.0.0.0/8 0.0.0.0/0 * * * DROP\n"
        "10.1.0.0/16 192.0.2.0/24 * 80 6 ALLOW\n");
    RuleIndex idx(rs);
    FlowKey k{parse_ipv4("10.1.0.1"), parse_ipv4("192.0.2.1"), 5, 80, 6};
    CHECK(idx.lookup(k) == std::optional<std::size_t>(0));
}

TEST_CASE("more specific later rule is reached when the earlier misses on a field") {
    auto rs = parse_ruleset(
        "10.0.0.0/8 0.0.0.0/0 * 53 17 DROP\n"
        "10.1.0.0/16 192.0.2.0/24 * 80 6 ALLOW\n"
        "0.0.0.0/0 192.0.2.0/24 * * * P=0.5\n");
    RuleIndex idx(rs);
    FlowKey k{parse_ipv4("10.1.0.1"), parse_ipv4("192.0.2.1"), 5, 80, 6};
    CHECK(idx.lookup(k) == std::optional<std::size_t>(1));
    k.dst_port = 443;
    CHECK(idx.lookup(k) == std::optional<std::size_t>(2));
    k.dst_ip = parse_ipv4("198.51.100.1");
    CHECK_FALSE(idx.lookup(k).has_value());
}

TEST_CASE("host routes and the zero-length prefix on both dimensions") {
    auto rs = parse_ruleset(
        "10.0.0.7/32 192.0.2.7/32 1 2 6 DROP\n"
        "0.0.0.0/0 0.0.0.0/0 * * * ALLOW\n");
    RuleIndex idx(rs);
    FlowKey hit{parse_ipv4("10.0.0.7"), parse_ipv4("192.0.2.7"), 1, 2, 6};
    CHECK(idx.lookup(hit) == std::optional<std::size_t>(0));
    hit.src_port = 3;
    CHECK(idx.lookup(hit) == std::optional<std::size_t>(1));
}

TEST_CASE("index agrees with a linear scan on large random rule sets") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        auto rs = gen::ruleset(rng, 400);
        RuleIndex idx(rs);
        for (int q = 0; q < 2000; ++q) {
            auto k = gen::key(rng);
            CHECK(idx.lookup(k) == oracle::linear_first_match(rs, k));
        }
    }
}
