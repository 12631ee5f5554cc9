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

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "vif/adversary_sim.hpp"

using namespace vif;

namespace {

const char* kRules =
    "10.0.0.0/10 0.0.0.0/0 * * 6 DROP\n"
    "10.64.0.0/10 0.0.0.0/0 * * * P=0.5\n"
    "10.128.0.0/9 0.0.0.0/0 * * 17 ALLOW\n";

TrafficProfile profile(std::uint64_t seed, std::uint64_t flows = 300) {
    TrafficProfile p;
    p.flow_count = flows;
    p.packets_per_flow.kind = PacketsPerFlow::Kind::Geometric;
    p.packets_per_flow.p = 0.3;
    p.size.kind = SizeDistribution::Kind::Uniform;
    p.size.low = 64;
    p.size.high = 1500;
    p.seed = seed;
    return p;
}

ClusterConfig cluster_cfg(std::uint64_t round_packets = 250) {
    ClusterConfig c;
    c.seed = 17;
    c.round_packets = round_packets;
    c.threaded = false;
    c.filter.update_period = 100;
    return c;
}

AdversaryScript one(AdversaryAction a, std::uint64_t seed = 1) {
    AdversaryScript s;
    s.seed = seed;
    s.actions.push_back(std::move(a));
    return s;
}

std::string scenario_dir() {
    const char* d = std::getenv("VIF_TEST_DATA");
    REQUIRE(d != nullptr);
    return std::string(d) + "/../../scenarios";
}

}  // namespace

TEST_CASE("generated traces: distinct flows, dense arrival, unique tags, seeded") {
    auto p = profile(3);
    auto t = generate(p);
    std::set<FlowKey> flows;
    std::set<std::uint64_t> tags;
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(t[i].arrival_index == i);
        flows.insert(t[i].key);
        tags.insert(t[i].payload_tag);
        CHECK(t[i].size_bytes >= 64);
        CHECK(t[i].size_bytes <= 1500);
        CHECK(Prefix::parse("10.0.0.0/8").contains(t[i].key.src_ip));
    }
    CHECK(flows.size() == 300);
    CHECK(tags.size() == t.size());
    CHECK(generate(p) == t);
    CHECK(generate(profile(4)) != t);

    p.packets_per_flow.kind = PacketsPerFlow::Kind::Constant;
    p.packets_per_flow.constant = 3;
    CHECK(generate(p).size() == 900);
    p.packets_per_flow.constant = 0;
    CHECK_THROWS_AS(generate(p), DomainError);
}

TEST_CASE("selector predicates") {
    Packet p{FlowKey{0x0A000001u, 0xC0000201u, 1000, 80, 6}, 100, 10, 7};
    Selector s;
    CHECK(s.matches(p));
    s.src = Prefix::parse("10.0.0.0/8");
    s.dst_port = 80;
    CHECK(s.matches(p));
    s.protocol = 17;
    CHECK_FALSE(s.matches(p));
    s = {};
    s.every = 5;
    CHECK(s.matches(p));
    p.arrival_index = 11;
    CHECK_FALSE(s.matches(p));
    s = {};
    s.tags = {1, 7};
    CHECK(s.matches(p));
    s.verdict = Verdict::Drop;
    CHECK_FALSE(s.matches(p));
    CHECK(s.matches(p, Verdict::Drop));
    CHECK_FALSE(s.matches(p, Verdict::Allow));
}

TEST_CASE("clean scenario is clean and decisions follow the filter") {
    auto rules = parse_ruleset(kRules);
    auto trace = generate(profile(5));
    auto cfg = cluster_cfg();
    auto rep = run_scenario(trace, rules, AdversaryScript{}, cfg);
    CHECK(rep.all_clean());
    CHECK(rep.events.empty());
    CHECK(rep.decisions.size() == trace.size());
    CHECK(rep.packets_filtered == trace.size());
    CHECK(rep.rounds.size() == (trace.size() + 249) / 250);
    FilterInstance single(rules, FilterSecret::from_seed(cfg.seed));
    for (const auto& p : trace) CHECK(rep.decisions.at(p.payload_tag) == single.filter_packet(p));
    CHECK(rep.victim_received == rep.filter_outgoing);
    CHECK(rep.neighbor_sent == rep.filter_incoming);
}

TEST_CASE("reordering and delay leave decisions and audits unchanged") {
    auto rules = parse_ruleset(kRules);
    auto trace = generate(profile(6));
    auto cfg = cluster_cfg();
    auto clean = run_scenario(trace, rules, AdversaryScript{}, cfg);
    AdversaryScript s;
    s.seed = 9;
    AdversaryAction reorder;
    reorder.kind = ActionKind::ReorderWindow;
    reorder.window = 1000;
    AdversaryAction delay;
    delay.kind = ActionKind::Delay;
    delay.amount = 40;
    delay.select.every = 3;
    s.actions = {reorder, delay};
    auto rep = run_scenario(trace, rules, s, cfg);
    CHECK(rep.all_clean());
    CHECK(rep.decisions == clean.decisions);
    bool delayed = false;
    for (const auto& e : rep.events) delayed |= e.action == ActionKind::Delay;
    CHECK(delayed);
}

TEST_CASE("re-injecting one dropped packet is INJECTION_AFTER") {
    auto rules = parse_ruleset(kRules);
    auto trace = generate(profile(7));
    AdversaryAction a;
    a.kind = ActionKind::InjectAfter;
    a.select.limit = 1;
    auto rep = run_scenario(trace, rules, one(a), cluster_cfg());
    REQUIRE(rep.events.size() == 1);
    CHECK(rep.events[0].action == ActionKind::InjectAfter);
    CHECK(rep.decisions.at(rep.events[0].payload_tag).verdict == Verdict::Drop);
    CHECK(rep.victim.kind == BypassKind::InjectionAfter);
    CHECK(rep.victim.suspected_mass_bytes >= rep.events[0].size_bytes);
    CHECK(rep.neighbor.kind == BypassKind::Clean);
    std::size_t flagged = 0;
    for (const auto& r : rep.rounds) flagged += r.victim.kind != BypassKind::Clean ? 1 : 0;
    CHECK(flagged == 1);
}

TEST_CASE("explicit post-filter injection is INJECTION_AFTER") {
    auto rules = parse_ruleset(kRules);
    auto trace = generate(profile(8));
    AdversaryAction a;
    a.kind = ActionKind::InjectAfter;
    a.packets.push_back(Packet{FlowKey{0x0A000001u, 0xC0000201u, 4000, 80, 6}, 700, 0, 0});
    auto rep = run_scenario(trace, rules, one(a), cluster_cfg());
    CHECK(rep.victim.kind == BypassKind::InjectionAfter);
    REQUIRE_FALSE(rep.events.empty());
    CHECK(rep.events[0].payload_tag >= (std::uint64_t{1} << 62));
}

TEST_CASE("dropping allowed packets after the filter is DROP_AFTER") {
    auto rules = parse_ruleset(kRules);
    auto trace = generate(profile(9));
    AdversaryAction a;
    a.kind = ActionKind::DropAfter;
    a.select.every = 4;
    a.select.limit = 10;
    auto rep = run_scenario(trace, rules, one(a), cluster_cfg());
    CHECK(rep.events.size() == 10);
    for (const auto& e : rep.events) CHECK(rep.decisions.at(e.payload_tag).verdict == Verdict::Allow);
    CHECK(rep.victim.kind == BypassKind::DropAfter);
    CHECK(rep.neighbor.kind == BypassKind::Clean);
}

TEST_CASE("post-filter drops only take packets the filter emitted") {
    auto rules = parse_ruleset(kRules);
    auto trace = generate(profile(9));
    AdversaryScript s;
    s.seed = 1;
    AdversaryAction inject;
    inject.kind = ActionKind::InjectAfter;
    inject.select.limit = 1;
    AdversaryAction drop;
    drop.kind = ActionKind::DropAfter;
    drop.select.limit = 5;
    s.actions = {inject, drop};
    inject.packets.push_back(Packet{FlowKey{0x0A000001u, 0xC0000201u, 4000, 80, 6}, 700, 0, 0});
    s.actions.push_back(inject);
    auto rep = run_scenario(trace, rules, s, cluster_cfg());
    std::size_t drops = 0;
    for (const auto& e : rep.events) {
        if (e.action != ActionKind::DropAfter) continue;
        ++drops;
        CHECK(e.payload_tag < (std::uint64_t{1} << 62));
        CHECK(rep.decisions.at(e.payload_tag).verdict == Verdict::Allow);
    }
    CHECK(drops > 0);
    CHECK(rep.victim.kind == BypassKind::Mixed);
}

TEST_CASE("dropping before the filter is DROP_BEFORE at the neighbor") {
    auto rules = parse_ruleset(kRules);
    auto trace = generate(profile(10));
    AdversaryAction a;
    a.kind = ActionKind::DropBefore;
    a.select.src = Prefix::parse("10.128.0.0/9");
    a.select.limit = 5;
    auto rep = run_scenario(trace, rules, one(a), cluster_cfg());
    CHECK(rep.events.size() == 5);
    CHECK(rep.neighbor.kind == BypassKind::DropBefore);
    CHECK(rep.victim.kind == BypassKind::Clean);
    for (const auto& e : rep.events) CHECK(rep.decisions.count(e.payload_tag) == 0);
}

TEST_CASE("injection before the filter is filtered and surfaces as unattributed mass") {
    auto rules = parse_ruleset(kRules);
    auto trace = generate(profile(11));
    AdversaryAction a;
    a.kind = ActionKind::InjectBefore;
    a.packets.push_back(Packet{FlowKey{0x0A000001u, 0xC0000201u, 4000, 80, 6}, 900, 0, 0});
    auto rep = run_scenario(trace, rules, one(a), cluster_cfg());
    CHECK(rep.victim.kind == BypassKind::Clean);
    CHECK(rep.neighbor.unattributed_mass_bytes >= 900);
    for (const auto& e : rep.events) CHECK(rep.decisions.at(e.payload_tag).verdict == Verdict::Drop);
}

TEST_CASE("misdispatching is reported by the receiving enclave") {
    auto s = load_scenario(scenario_dir() + "/misdispatch.json");
    auto rep = run_scenario(s);
    REQUIRE_FALSE(rep.events.empty());
    std::set<std::uint64_t> moved, reported;
    std::map<std::uint64_t, std::uint64_t> tag_to_arrival;
    auto trace = generate(s.profile);
    for (const auto& p : trace) tag_to_arrival[p.payload_tag] = p.arrival_index;
    for (const auto& e : rep.events) moved.insert(tag_to_arrival.at(e.payload_tag));
    for (const auto& m : rep.misdispatches) reported.insert(m.arrival_index);
    // Packets already bound for the target enclave are not misdispatches.
    CHECK(std::includes(moved.begin(), moved.end(), reported.begin(), reported.end()));
    CHECK_FALSE(reported.empty());
    CHECK_FALSE(rep.all_clean());
}

TEST_CASE("pre-filter actions cannot select on verdict") {
    auto rules = parse_ruleset(kRules);
    auto trace = generate(profile(12, 20));
    for (auto k : {ActionKind::Delay, ActionKind::DropBefore, ActionKind::MisdispatchTo}) {
        AdversaryAction a;
        a.kind = k;
        a.select.verdict = Verdict::Drop;
        CHECK_THROWS_AS(run_scenario(trace, rules, one(a), cluster_cfg()), Error);
    }
    AdversaryAction r;
    r.kind = ActionKind::ReorderWindow;
    CHECK_THROWS_AS(run_scenario(trace, rules, one(r), cluster_cfg()), Error);
}

TEST_CASE("combine_verdicts") {
    BypassVerdict clean, inj, drop;
    inj.kind = BypassKind::InjectionAfter;
    inj.suspected_mass_bytes = 10;
    drop.kind = BypassKind::DropAfter;
    drop.suspected_mass_bytes = 5;
    std::vector<BypassVerdict> v{clean, clean};
    CHECK(combine_verdicts(v).kind == BypassKind::Clean);
    v = {clean, inj, inj};
    auto c = combine_verdicts(v);
    CHECK(c.kind == BypassKind::InjectionAfter);
    CHECK(c.suspected_mass_bytes == 20);
    v = {inj, clean, drop};
    c = combine_verdicts(v);
    CHECK(c.kind == BypassKind::Mixed);
    CHECK(c.suspected_mass_bytes == 15);
}

TEST_CASE("script and scenario parsing") {
    auto s = parse_script(R"({"seed": 4, "actions": [
        {"type": "delay", "amount": 3, "select": {"src": "10.0.0.0/8", "every": 2}},
        {"type": "inject_after", "packets": [{"src": "1.2.3.4", "dst": "5.6.7.8", "protocol": "tcp", "size": 60, "count": 3}]},
        {"type": "drop_after", "select": {"verdict": "ALLOW", "limit": 2}}]})");
    CHECK(s.seed == 4);
    REQUIRE(s.actions.size() == 3);
    CHECK(s.actions[0].kind == ActionKind::Delay);
    CHECK(s.actions[0].amount == 3);
    CHECK(s.actions[1].packets.size() == 3);
    CHECK(s.actions[1].packets[0].key.protocol == 6);
    CHECK(s.actions[2].select.verdict == Verdict::Allow);
    CHECK_THROWS_AS(parse_script(R"({"actions": [{"type": "teleport"}]})"), ParseError);
    CHECK_THROWS_AS(parse_script(R"({"actions": [{"type": "inject_before"}]})"), ParseError);
    CHECK_THROWS_AS(parse_script("{"), ParseError);
    CHECK_THROWS_AS(parse_script(R"({"actions": [{"type": "drop_after", "select": {"verdict": "MAYBE"}}]})"), ParseError);

    auto p = parse_profile(R"({"flow_count": 5, "packets_per_flow": {"constant": 2}, "size": {"uniform": [10, 20]},
                                "protocols": ["udp", 1], "src_pool": ["172.16.0.0/12"]})");
    CHECK(p.flow_count == 5);
    CHECK(p.packets_per_flow.constant == 2);
    CHECK(p.size.kind == SizeDistribution::Kind::Uniform);
    CHECK(p.protocols == std::vector<std::uint8_t>{17, 1});
    CHECK_THROWS_AS(parse_profile(R"({"protocols": ["sctp"]})"), ParseError);

    auto c = parse_cluster_config(R"({"round_packets": 7, "trigger": "1/2", "capacity": {"bandwidth_limit": 2.5},
                                      "sketch": {"width": 1024, "count_mode": "packets"}})");
    CHECK(c.round_packets == 7);
    CHECK(c.redistribution.trigger == Rational(1, 2));
    CHECK(c.redistribution.capacity.bandwidth_limit == Rational(5, 2));
    CHECK(c.sketch.width == 1024);
    CHECK(c.sketch.count_mode == CountMode::Packets);
    CHECK_THROWS_AS(parse_cluster_config(R"({"sketch": {"count_mode": "flows"}})"), ParseError);

    CHECK_THROWS_AS(parse_scenario(R"({"profile": {}})"), ParseError);
    auto sc = parse_scenario(R"({"rules": ["10.0.0.0/8 0.0.0.0/0 * * * DROP"], "profile": {"flow_count": 100,
                                 "packets_per_flow": {"constant": 4}}, "rounds": 3})");
    CHECK(sc.rules.size() == 1);
    CHECK(sc.cluster.round_packets == 134);
    CHECK_THROWS_AS(parse_scenario(R"({"rules": [], "rounds": 0})"), ParseError);
}

TEST_CASE("shipped scenarios produce their expected verdicts") {
    auto dir = scenario_dir();
    auto clean = run_scenario(load_scenario(dir + "/clean.json"));
    CHECK(clean.all_clean());
    auto inject = run_scenario(load_scenario(dir + "/inject_after.json"));
    CHECK(inject.victim.kind == BypassKind::InjectionAfter);
    auto reorder = run_scenario(load_scenario(dir + "/reorder.json"));
    CHECK(reorder.all_clean());
    CHECK(reorder.decisions == clean.decisions);
    auto before = run_scenario(load_scenario(dir + "/drop_before.json"));
    CHECK(before.neighbor.kind == BypassKind::DropBefore);
}

TEST_CASE("report json is deterministic") {
    auto s = load_scenario(scenario_dir() + "/inject_after.json");
    auto a = run_scenario(s).to_json();
    auto b = run_scenario(s).to_json();
    CHECK(a == b);
    CHECK(a.find("\"INJECTION_AFTER\"") != std::string::npos);
    CHECK(a.find("\"sha256\"") != std::string::npos);
}
