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

#include <map>
#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "oracles.hpp"
#include "vif/crypto.hpp"
#include "vif/packet_log.hpp"

using namespace vif;

namespace {

SketchParams five_tuple(std::uint32_t width = 65536, std::uint64_t seed = 0) {
    SketchParams p;
    p.key_mode = KeyMode::PerFiveTuple;
    p.width = width;
    p.session_seed = seed;
    return p;
}

std::vector<std::uint8_t> item_of(const FlowKey& k) {
    auto b = oracle::key_bytes(k);
    return {b.begin(), b.end()};
}

}  // namespace

TEST_CASE("default sketch is 2 x 65536 64-bit counters, about 1 MB") {
    CountMinSketch s;
    CHECK(s.depth() == 2);
    CHECK(s.width() == 65536);
    CHECK(s.memory_bytes() == 1'048'576);
    CHECK(s.row_seeds().size() == 2);
    CHECK(s.row_seeds()[0] != s.row_seeds()[1]);
    CHECK(std::all_of(s.counters().begin(), s.counters().end(), [](auto c) { return c == 0; }));
}

TEST_CASE("single packet and empty sketch queries") {
    CountMinSketch s(five_tuple());
    std::mt19937_64 rng(1);
    auto k = gen::key(rng);
    CHECK(s.point_query(item_of(k)) == 0);
    s.update(Packet{k, 100, 0, 0});
    CHECK(s.point_query(item_of(k)) == 100);
    CHECK(s.query(k) == 100);

    CountMinSketch src;
    src.update(Packet{k, 100, 0, 0});
    std::vector<std::uint8_t> ip{static_cast<std::uint8_t>(k.src_ip >> 24), static_cast<std::uint8_t>(k.src_ip >> 16),
                                 static_cast<std::uint8_t>(k.src_ip >> 8), static_cast<std::uint8_t>(k.src_ip)};
    CHECK(src.point_query(ip) == 100);
    CHECK_THROWS_AS(src.point_query(item_of(k)), Error);
}

TEST_CASE("estimates never undercount, against an exact map") {
    for (auto mode : {KeyMode::PerFiveTuple, KeyMode::PerSourceIp}) {
        SketchParams p = five_tuple(4096, 3);
        p.key_mode = mode;
        CountMinSketch s(p);
        std::map<std::vector<std::uint8_t>, std::uint64_t> truth;
        std::mt19937_64 rng(2);
        for (int i = 0; i < 10000; ++i) {
            Packet pk{gen::key(rng), static_cast<std::uint32_t>(1 + rng() % 1500), 0, 0};
            s.update(pk);
            std::vector<std::uint8_t> item;
            if (mode == KeyMode::PerFiveTuple)
                item = item_of(pk.key);
            else
                for (int b = 3; b >= 0; --b) item.push_back(static_cast<std::uint8_t>(pk.key.src_ip >> (8 * b)));
            truth[item] += pk.size_bytes;
        }
        for (const auto& [item, count] : truth) CHECK(s.point_query(item) >= count);
    }
}

TEST_CASE("packet count mode counts one per update") {
    SketchParams p = five_tuple();
    p.count_mode = CountMode::Packets;
    CountMinSketch s(p);
    std::mt19937_64 rng(3);
    auto k = gen::key(rng);
    for (int i = 0; i < 5; ++i) s.update(Packet{k, 999, 0, 0});
    CHECK(s.query(k) == 5);
    CHECK_FALSE(s.comparable(CountMinSketch(five_tuple())));
}

TEST_CASE("merge equals the sketch of the concatenated stream") {
    std::mt19937_64 rng(4);
    CountMinSketch a(five_tuple(1024)), b(five_tuple(1024)), whole(five_tuple(1024));
    for (int i = 0; i < 3000; ++i) {
        Packet p{gen::key(rng), static_cast<std::uint32_t>(1 + rng() % 1500), 0, 0};
        (i % 3 ? a : b).update(p);
        whole.update(p);
    }
    auto m = merge(a, b);
    CHECK(m == whole);
    CHECK(m.total_updates() == 3000);
    CHECK_THROWS_AS(merge(a, CountMinSketch(five_tuple(1024, 9))), IncomparableError);
    CHECK_THROWS_AS(merge(a, CountMinSketch(five_tuple(2048))), IncomparableError);
}

TEST_CASE("comparability depends on shape, seeds and key mode") {
    CHECK(CountMinSketch(five_tuple()).comparable(CountMinSketch(five_tuple())));
    CHECK_FALSE(CountMinSketch(five_tuple()).comparable(CountMinSketch(five_tuple(65536, 1))));
    CHECK_FALSE(CountMinSketch(five_tuple()).comparable(CountMinSketch(SketchParams{})));
}

TEST_CASE("diff_report lists exactly the differing bins with signed deltas") {
    std::mt19937_64 rng(5);
    CountMinSketch mine(five_tuple(512)), theirs(five_tuple(512));
    std::vector<Packet> ps;
    for (int i = 0; i < 200; ++i) ps.push_back({gen::key(rng), 100, 0, 0});
    for (const auto& p : ps) {
        mine.update(p);
        theirs.update(p);
    }
    CHECK(diff_report(mine, theirs).empty());
    Packet extra{gen::key(rng), 321, 0, 0};
    theirs.update(extra);
    auto d = diff_report(mine, theirs);
    REQUIRE(d.size() == 2);
    for (const auto& bd : d) {
        CHECK(bd.delta == 321);
        CHECK(bd.bin == theirs.bin_of(bd.row, extra.key));
    }
    CHECK_THROWS_AS(diff_report(mine, CountMinSketch(five_tuple(256))), IncomparableError);
}

TEST_CASE("serialization round-trip and wire header") {
    std::mt19937_64 rng(6);
    CountMinSketch s(five_tuple(300, 77));
    for (int i = 0; i < 500; ++i) s.update(Packet{gen::key(rng), 77, 0, 0});
    auto bytes = s.serialize();
    CHECK(bytes.size() == kSketchHeaderSize + 8 + 2 * 8 + 2 * 300 * 8);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "VIFS");
    CHECK(bytes[4] == kSketchWireVersion);
    CHECK(CountMinSketch::deserialize(bytes) == s);
    bytes[4] = 9;
    CHECK_THROWS_AS(CountMinSketch::deserialize(bytes), ParseError);
    CHECK_THROWS_AS(CountMinSketch::deserialize(std::span(bytes).first(10)), ParseError);
}

TEST_CASE("sealed sketches authenticate") {
    std::mt19937_64 rng(7);
    CountMinSketch s(five_tuple(128));
    for (int i = 0; i < 50; ++i) s.update(Packet{gen::key(rng), 10, 0, 0});
    auto key = crypto::derive(1, "session");
    auto sealed = s.seal(key);
    CHECK(CountMinSketch::open(sealed, key) == s);
    auto tampered = sealed;
    tampered[kSketchHeaderSize + 30] ^= 1;
    try {
        CountMinSketch::open(tampered, key);
        FAIL("tampering went unnoticed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Auth);
    }
    auto other = crypto::derive(2, "session");
    CHECK_THROWS_AS(CountMinSketch::open(sealed, other), Error);
}

TEST_CASE("counter overflow is a hard error") {
    CountMinSketch s(five_tuple(16));
    FlowKey k;
    s.add(k, std::numeric_limits<std::uint64_t>::max() - 5);
    s.add(k, 5);
    try {
        s.add(k, 1);
        FAIL("expected overflow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Overflow);
    }
}

TEST_CASE("csv dump lists non-zero counters") {
    CountMinSketch s(five_tuple(64));
    FlowKey k;
    s.add(k, 9);
    auto csv = s.dump_csv();
    CHECK(csv.rfind("row,bin,count\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("sketch parameters are validated") {
    SketchParams p;
    p.width = 0;
    CHECK_THROWS_AS(CountMinSketch{p}, DomainError);
    p = {};
    p.depth = 0;
    CHECK_THROWS_AS(CountMinSketch{p}, DomainError);
}
