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

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "gen.hpp"
#include "oracles.hpp"
#include "vif/crypto.hpp"
#include "vif/filter_engine.hpp"

using namespace vif;

namespace {

RuleSet single(const std::string& action) { return parse_ruleset("0.0.0.0/0 0.0.0.0/0 * * * " + action + "\n"); }

}  // namespace

TEST_CASE("hash_decide agrees with an independent SHA-256 threshold oracle") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 3000; ++t) {
        auto secret = FilterSecret::from_seed(rng());
        auto k = gen::key(rng);
        Probability p(rng() % 1001, 1000);
        bool allow = hash_decide(secret, k, p) == Verdict::Allow;
        CHECK(allow == oracle::hash_allows(secret.bytes(), k, p.num, p.den));
    }
}

TEST_CASE("hash_decide edge probabilities") {
    std::mt19937_64 rng(2);
    auto secret = FilterSecret::from_seed(7);
    for (int t = 0; t < 2000; ++t) {
        auto k = gen::key(rng);
        CHECK(hash_decide(secret, k, Probability(0, 1)) == Verdict::Drop);
        CHECK(hash_decide(secret, k, Probability(1, 1)) == Verdict::Allow);
    }
    auto ones = hash_threshold(Probability(1, 1));
    CHECK(std::all_of(ones.begin(), ones.end(), [](auto b) { return b == 0xff; }));
    auto half = hash_threshold(Probability(1, 2));
    CHECK(half[0] == 0x7f);
    CHECK(half[31] == 0xff);
    auto zero = hash_threshold(Probability(0, 1));
    CHECK(std::all_of(zero.begin(), zero.end(), [](auto b) { return b == 0; }));
}

TEST_CASE("hash_decide allow fraction at p = 0.5 over 100000 keys") {
    std::mt19937_64 rng(3);
    auto secret = FilterSecret::from_seed(11);
    std::set<FlowKey> keys;
    while (keys.size() < 100000) {
        FlowKey k;
        k.src_ip = static_cast<Ipv4>(rng());
        k.dst_ip = static_cast<Ipv4>(rng());
        k.src_port = static_cast<std::uint16_t>(rng());
        k.dst_port = static_cast<std::uint16_t>(rng());
        k.protocol = 6;
        keys.insert(k);
    }
    std::size_t allowed = 0;
    for (const auto& k : keys) allowed += hash_decide(secret, k, Probability(1, 2)) == Verdict::Allow;
    double frac = static_cast<double>(allowed) / 100000.0;
    CHECK(frac >= 0.49);
    CHECK(frac <= 0.51);
}

TEST_CASE("hash_decide is monotone in p_allow") {
    std::mt19937_64 rng(4);
    auto secret = FilterSecret::from_seed(5);
    for (int t = 0; t < 500; ++t) {
        auto k = gen::key(rng);
        bool allowed_before = false;
        for (std::uint64_t n = 0; n <= 20; ++n) {
            bool now = hash_decide(secret, k, Probability(n, 20)) == Verdict::Allow;
            if (allowed_before) CHECK(now);
            allowed_before = now;
        }
    }
}

TEST_CASE("deterministic rules ignore arrival order") {
    FilterInstance f(single("DROP"), FilterSecret::from_seed(1));
    std::mt19937_64 rng(5);
    auto t = gen::trace(rng, 20, 5);
    for (const auto& p : t) CHECK(f.filter_packet(p).verdict == Verdict::Drop);
    FilterInstance a(single("P=1"), FilterSecret::from_seed(1));
    for (const auto& p : t) CHECK(a.filter_packet(p).verdict == Verdict::Allow);
}

TEST_CASE("a flow submitted 1000 times among other flows keeps one decision") {
    std::mt19937_64 rng(6);
    FilterInstance f(single("P=0.5"), FilterSecret::from_seed(2), FilterConfig{37});
    auto target = gen::key(rng);
    std::vector<Decision> seen;
    for (int i = 0; i < 1000; ++i) {
        for (int j = 0; j < 3; ++j) f.filter_packet(Packet{gen::key(rng), 100, 0, 0});
        seen.push_back(f.filter_packet(Packet{target, 100, static_cast<std::uint64_t>(i), 0}));
    }
    for (const auto& d : seen) CHECK(d == seen.front());
}

TEST_CASE("batch_insert promotes pending flows without changing verdicts") {
    std::mt19937_64 rng(7);
    FilterInstance f(single("P=0.5"), FilterSecret::from_seed(3));
    CHECK(f.batch_insert() == 0);
    CHECK(f.exact_cache().empty());
    std::vector<FlowKey> keys{gen::key(rng), gen::key(rng), gen::key(rng)};
    std::vector<Verdict> before;
    for (const auto& k : keys) before.push_back(f.filter_packet(Packet{k, 10, 0, 0}).verdict);
    CHECK(f.pending_flows().size() == 3);
    CHECK(f.batch_insert() == 3);
    CHECK(f.pending_flows().empty());
    CHECK(f.exact_cache().size() == 3);
    auto hashes = f.stats().hashes;
    for (std::size_t i = 0; i < keys.size(); ++i) CHECK(f.filter_packet(Packet{keys[i], 10, 0, 0}).verdict == before[i]);
    CHECK(f.stats().hashes == hashes);
    CHECK(f.stats().cache_hits == 3);
    CHECK(f.batch_insert() == 0);
    CHECK(f.exact_cache().size() == 3);
}

TEST_CASE("pending flows and the cache stay disjoint") {
    std::mt19937_64 rng(8);
    FilterInstance f(single("P=0.3"), FilterSecret::from_seed(4), FilterConfig{13});
    auto t = gen::trace(rng, 200, 4);
    for (const auto& p : t) {
        f.filter_packet(p);
        for (const auto& k : f.pending_flows()) CHECK(f.exact_cache().count(k) == 0);
    }
}

TEST_CASE("decisions are independent of arrival order and of injected packets") {
    std::mt19937_64 rng(9);
    for (int round = 0; round < 20; ++round) {
        auto rules = gen::ruleset(rng, 10);
        auto secret = FilterSecret::from_seed(rng());
        auto period = std::vector<std::uint64_t>{0, 1, 7, 100}[round % 4];
        auto t = gen::trace(rng, 60, 3);
        FilterInstance base(rules, secret, FilterConfig{period});
        std::map<std::uint64_t, Decision> want;
        for (const auto& p : t) want[p.payload_tag] = base.filter_packet(p);

        auto shuffled = t;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        std::vector<Packet> mixed;
        for (auto p : shuffled) {
            p.arrival_index = rng();
            p.size_bytes = 1 + static_cast<std::uint32_t>(rng() % 9000);
            mixed.push_back(p);
            if (rng() % 3 == 0) mixed.push_back(Packet{gen::key(rng), 500, rng(), 1ull << 62});
        }
        FilterInstance other(rules, secret, FilterConfig{period});
        for (const auto& p : mixed) {
            auto d = other.filter_packet(p);
            if (p.payload_tag < (1ull << 62)) CHECK(d == want[p.payload_tag]);
        }
    }
}

TEST_CASE("decisions match the first matching rule and the hash oracle") {
    std::mt19937_64 rng(10);
    for (int round = 0; round < 50; ++round) {
        auto rules = gen::ruleset(rng, 15);
        auto secret = FilterSecret::from_seed(rng());
        FilterInstance f(rules, secret, FilterConfig{5});
        for (int q = 0; q < 100; ++q) {
            auto k = gen::key(rng);
            auto d = f.filter_packet(Packet{k, 100, 0, 0});
            auto idx = oracle::linear_first_match(rules, k);
            CHECK(d.matched_rule == idx);
            Verdict want = Verdict::Allow;
            if (idx) {
                if (auto* v = std::get_if<Verdict>(&rules[*idx].action))
                    want = *v;
                else {
                    auto p = std::get<Probability>(rules[*idx].action);
                    want = oracle::hash_allows(secret.bytes(), k, p.num, p.den) ? Verdict::Allow : Verdict::Drop;
                }
            }
            CHECK(d.verdict == want);
        }
    }
}

TEST_CASE("lookup table size model") {
    CHECK(lookup_table_size(0, 0) == 2'000'000);
    CHECK(lookup_table_size(3000, 0) == 92'000'000);
    TableCostModel m{100, 7};
    CHECK(lookup_table_size(10, 0, m) - 7 == 2 * (lookup_table_size(5, 0, m) - 7));
    CHECK(lookup_table_size(2, 3, m) == 507);
    CHECK_THROWS_AS(lookup_table_size(1, 0, TableCostModel{0, 1}), DomainError);
}

TEST_CASE("sealed state export is deterministic and excludes the secret") {
    std::mt19937_64 rng(11);
    auto rules = single("P=0.5");
    auto secret = FilterSecret::from_seed(99);
    FilterInstance a(rules, secret, FilterConfig{4}), b(rules, secret, FilterConfig{4});
    auto t = gen::trace(rng, 30, 2);
    for (const auto& p : t) {
        a.filter_packet(p);
        b.filter_packet(p);
    }
    auto text = a.export_sealed_state();
    CHECK(text == b.export_sealed_state());
    CHECK(text.find(crypto::to_hex(secret.bytes())) == std::string::npos);
    CHECK(text.find("cache_entries " + std::to_string(a.exact_cache().size())) != std::string::npos);
}

TEST_CASE("sealed filter does one lookup, at most one hash and at most two sketch updates per packet") {
    std::mt19937_64 rng(12);
    auto rules = gen::ruleset(rng, 20);
    SealedFilter f(rules, FilterSecret::from_seed(1), FilterConfig{50}, SketchParams{});
    auto t = gen::trace(rng, 300, 3);
    FilterStats prev = f.stats();
    std::uint64_t bytes = 0;
    for (const auto& p : t) {
        auto d = f.process(digest(p, p.arrival_index));
        auto s = f.stats();
        CHECK(s.lookups - prev.lookups == 1);
        CHECK(s.hashes - prev.hashes <= 1);
        CHECK(s.sketch_updates - prev.sketch_updates == (d.verdict == Verdict::Allow ? 2u : 1u));
        prev = s;
        bytes += p.size_bytes;
    }
    std::uint64_t per_rule = f.default_bytes();
    for (auto b : f.rule_bytes()) per_rule += b;
    CHECK(per_rule == bytes);
    CHECK(f.round_bytes() == bytes);
    f.reset_round();
    CHECK(f.round_bytes() == 0);
    CHECK(f.incoming().total_updates() == 0);
}
