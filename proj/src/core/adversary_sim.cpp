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

#include "vif/adversary_sim.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "io.hpp"
#include "json.hpp"
#include "vif/crypto.hpp"
#include "vif/error.hpp"

namespace vif {

using nlohmann::json;

namespace {

constexpr std::uint64_t kInjectedTagBase = std::uint64_t{1} << 62;

Ipv4 draw_address(const std::vector<Prefix>& pool, std::mt19937_64& rng) {
    const auto& p = pool[rng() % pool.size()];
    return p.addr | (static_cast<Ipv4>(rng()) & ~p.mask());
}

}  // namespace

std::vector<Packet> generate(const TrafficProfile& profile) {
    if (profile.src_pool.empty() || profile.dst_pool.empty() || profile.protocols.empty())
        throw Error(ErrorCode::InvalidArgument, "address pools and protocol list must be non-empty");
    if (profile.packets_per_flow.kind == PacketsPerFlow::Kind::Geometric &&
        !(profile.packets_per_flow.p > 0 && profile.packets_per_flow.p <= 1))
        throw DomainError("geometric p must be in (0, 1]");
    if (profile.packets_per_flow.kind == PacketsPerFlow::Kind::Constant && profile.packets_per_flow.constant == 0)
        throw DomainError("packets per flow must be at least 1");
    if (profile.size.low == 0 || profile.size.high < profile.size.low) throw DomainError("bad packet size range");

    std::mt19937_64 rng(profile.seed);
    std::geometric_distribution<std::uint64_t> geometric(profile.packets_per_flow.p);
    std::uniform_int_distribution<std::uint32_t> size(profile.size.low, profile.size.high);

    std::set<FlowKey> seen;
    std::vector<Packet> trace;
    const std::uint64_t max_attempts = profile.flow_count * 64 + 1024;
    std::uint64_t attempts = 0;
    while (seen.size() < profile.flow_count) {
        if (++attempts > max_attempts) throw Error(ErrorCode::InvalidArgument, "key space too small for flow_count");
        FlowKey k;
        k.src_ip = draw_address(profile.src_pool, rng);
        k.dst_ip = draw_address(profile.dst_pool, rng);
        k.protocol = profile.protocols[rng() % profile.protocols.size()];
        if (k.protocol == 6 || k.protocol == 17) {
            k.src_port = static_cast<std::uint16_t>(1024 + rng() % (65536 - 1024));
            k.dst_port = static_cast<std::uint16_t>(1 + rng() % 65535);
        }
        if (!seen.insert(k).second) continue;
        std::uint64_t count = profile.packets_per_flow.kind == PacketsPerFlow::Kind::Constant
                                  ? profile.packets_per_flow.constant
                                  : geometric(rng) + 1;
        for (std::uint64_t c = 0; c < count; ++c) {
            Packet p;
            p.key = k;
            p.size_bytes = profile.size.kind == SizeDistribution::Kind::Constant ? profile.size.low : size(rng);
            p.payload_tag = trace.size();
            trace.push_back(p);
        }
    }
    std::shuffle(trace.begin(), trace.end(), rng);
    for (std::size_t i = 0; i < trace.size(); ++i) trace[i].arrival_index = i;
    return trace;
}

bool Selector::matches(const Packet& p, std::optional<Verdict> decided) const {
    if (src && !src->contains(p.key.src_ip)) return false;
    if (dst && !dst->contains(p.key.dst_ip)) return false;
    if (src_port && *src_port != p.key.src_port) return false;
    if (dst_port && *dst_port != p.key.dst_port) return false;
    if (protocol && *protocol != p.key.protocol) return false;
    if (verdict && (!decided || *decided != *verdict)) return false;
    if (!tags.empty() && std::find(tags.begin(), tags.end(), p.payload_tag) == tags.end()) return false;
    if (every && (*every == 0 || p.arrival_index % *every != 0)) return false;
    return true;
}

std::string_view to_string(ActionKind k) noexcept {
    switch (k) {
        case ActionKind::ReorderWindow: return "reorder_window";
        case ActionKind::Delay: return "delay";
        case ActionKind::InjectBefore: return "inject_before";
        case ActionKind::DropBefore: return "drop_before";
        case ActionKind::InjectAfter: return "inject_after";
        case ActionKind::DropAfter: return "drop_after";
        case ActionKind::MisdispatchTo: return "misdispatch_to";
    }
    return "?";
}

BypassVerdict combine_verdicts(std::span<const BypassVerdict> per_round) {
    BypassVerdict out;
    for (const auto& v : per_round) {
        if (v.kind == BypassKind::Clean) continue;
        if (out.kind == BypassKind::Clean)
            out.kind = v.kind;
        else if (out.kind != v.kind)
            out.kind = BypassKind::Mixed;
        out.evidence.insert(out.evidence.end(), v.evidence.begin(), v.evidence.end());
        out.suspected_mass_bytes += v.suspected_mass_bytes;
        out.unattributed_mass_bytes += v.unattributed_mass_bytes;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenario execution

namespace {

class ScenarioRunner {
public:
    ScenarioRunner(const RuleSet& rules, const AdversaryScript& script, const ClusterConfig& cfg)
        : script_(script), cfg_(cfg), cluster_(rules, cfg), rng_(script.seed), used_(script.actions.size(), 0) {
        for (const auto& a : script.actions) {
            bool pre = a.kind == ActionKind::Delay || a.kind == ActionKind::DropBefore ||
                       a.kind == ActionKind::MisdispatchTo;
            if (pre && a.select.verdict)
                throw Error(ErrorCode::InvalidArgument,
                            std::string(to_string(a.kind)) + " runs before filtering and cannot select on verdict");
            if (a.kind == ActionKind::ReorderWindow && a.window == 0)
                throw Error(ErrorCode::InvalidArgument, "reorder window must be positive");
        }
        auto params = cfg.sketch;
        params.key_mode = KeyMode::PerSourceIp;
        report_.neighbor_sent = CountMinSketch(params);
        report_.filter_incoming = CountMinSketch(params);
        params.key_mode = KeyMode::PerFiveTuple;
        report_.filter_outgoing = CountMinSketch(params);
        report_.victim_received = CountMinSketch(params);
    }

    ScenarioReport run(std::span<const Packet> trace) {
        std::vector<BypassVerdict> victim, neighbor;
        for (std::size_t off = 0; off < trace.size(); off += cfg_.round_packets) {
            auto window = trace.subspan(off, std::min<std::size_t>(cfg_.round_packets, trace.size() - off));
            auto v = round(window);
            victim.push_back(v.victim);
            neighbor.push_back(v.neighbor);
            report_.rounds.push_back(std::move(v));
        }
        report_.victim = combine_verdicts(victim);
        report_.neighbor = combine_verdicts(neighbor);
        report_.round_log = cluster_.round_log();
        report_.stats = cluster_.stats();
        return std::move(report_);
    }

private:
    bool take(std::size_t action) {
        const auto& limit = script_.actions[action].select.limit;
        if (limit && used_[action] >= *limit) return false;
        ++used_[action];
        return true;
    }

    void event(ActionKind kind, std::uint64_t round, const Packet& p) {
        report_.events.push_back({kind, round, p.payload_tag, p.size_bytes});
    }

    Packet injected(const Packet& templ) {
        Packet p = templ;
        p.payload_tag = kInjectedTagBase + next_tag_++;
        p.arrival_index = p.payload_tag;
        return p;
    }

    RoundVerdicts round(std::span<const Packet> window) {
        const std::uint64_t r = round_id_++;
        auto params = cfg_.sketch;
        params.key_mode = KeyMode::PerSourceIp;
        CountMinSketch neighbor(params);
        params.key_mode = KeyMode::PerFiveTuple;
        CountMinSketch victim(params);

        for (const auto& p : window) neighbor.update(p);

        std::vector<Packet> stream(window.begin(), window.end());
        for (std::size_t a = 0; a < script_.actions.size(); ++a) {
            const auto& act = script_.actions[a];
            switch (act.kind) {
                case ActionKind::DropBefore: {
                    std::vector<Packet> kept;
                    for (const auto& p : stream) {
                        if (act.select.matches(p) && take(a))
                            event(act.kind, r, p);
                        else
                            kept.push_back(p);
                    }
                    stream.swap(kept);
                    break;
                }
                case ActionKind::InjectBefore:
                    for (const auto& t : act.packets) {
                        stream.push_back(injected(t));
                        event(act.kind, r, stream.back());
                    }
                    break;
                case ActionKind::ReorderWindow:
                    for (std::size_t b = 0; b < stream.size(); b += act.window) {
                        auto end = std::min<std::size_t>(stream.size(), b + act.window);
                        std::shuffle(stream.begin() + static_cast<long>(b), stream.begin() + static_cast<long>(end), rng_);
                    }
                    break;
                case ActionKind::Delay: {
                    std::vector<std::pair<std::uint64_t, std::size_t>> order;
                    for (std::size_t i = 0; i < stream.size(); ++i) {
                        std::uint64_t pos = i;
                        if (act.select.matches(stream[i]) && take(a)) {
                            pos = std::min<std::uint64_t>(i + act.amount, stream.size() - 1);
                            event(act.kind, r, stream[i]);
                        }
                        order.emplace_back(pos, i);
                    }
                    std::stable_sort(order.begin(), order.end(),
                                     [](const auto& x, const auto& y) { return x.first < y.first; });
                    std::vector<Packet> moved;
                    for (const auto& [pos, i] : order) moved.push_back(stream[i]);
                    stream.swap(moved);
                    break;
                }
                default: break;
            }
        }

        DispatchOverride override;
        bool any_misdispatch = std::any_of(script_.actions.begin(), script_.actions.end(),
                                           [](const auto& a) { return a.kind == ActionKind::MisdispatchTo; });
        if (any_misdispatch) {
            override = [&, r](const Packet& p, std::size_t) -> std::optional<std::size_t> {
                for (std::size_t a = 0; a < script_.actions.size(); ++a) {
                    const auto& act = script_.actions[a];
                    if (act.kind != ActionKind::MisdispatchTo || !act.select.matches(p)) continue;
                    if (act.enclave >= cluster_.size() || !take(a)) continue;
                    event(act.kind, r, p);
                    return act.enclave;
                }
                return std::nullopt;
            };
        }
        auto res = cluster_.process_round(stream, override);
        report_.packets_filtered += stream.size();
        for (std::size_t t = 0; t < stream.size(); ++t) report_.decisions[stream[t].payload_tag] = res.decisions[t];
        report_.misdispatches.insert(report_.misdispatches.end(), res.misdispatches.begin(), res.misdispatches.end());

        std::vector<Packet> delivered, dropped;
        std::set<std::uint64_t> emitted;  // tags the filter allowed
        for (std::size_t t = 0; t < stream.size(); ++t) {
            bool allow = res.decisions[t].verdict == Verdict::Allow;
            (allow ? delivered : dropped).push_back(stream[t]);
            if (allow) emitted.insert(stream[t].payload_tag);
        }
        for (std::size_t a = 0; a < script_.actions.size(); ++a) {
            const auto& act = script_.actions[a];
            if (act.kind == ActionKind::DropAfter) {
                std::vector<Packet> kept;
                for (const auto& p : delivered) {
                    if (emitted.count(p.payload_tag) && act.select.matches(p, Verdict::Allow) && take(a))
                        event(act.kind, r, p);
                    else
                        kept.push_back(p);
                }
                delivered.swap(kept);
            } else if (act.kind == ActionKind::InjectAfter) {
                if (!act.packets.empty()) {
                    for (const auto& t : act.packets) {
                        delivered.push_back(injected(t));
                        event(act.kind, r, delivered.back());
                    }
                } else {
                    for (const auto& p : dropped) {
                        if (act.select.matches(p, Verdict::Drop) && take(a)) {
                            delivered.push_back(p);
                            event(act.kind, r, p);
                        }
                    }
                }
            }
        }
        for (const auto& p : delivered) victim.update(p);

        RoundVerdicts v;
        v.round = r;
        v.victim = victim_check(res.outgoing, victim);
        v.neighbor = neighbor_check(res.incoming, neighbor);

        report_.neighbor_sent = merge(report_.neighbor_sent, neighbor);
        report_.victim_received = merge(report_.victim_received, victim);
        report_.filter_incoming = merge(report_.filter_incoming, res.incoming);
        report_.filter_outgoing = merge(report_.filter_outgoing, res.outgoing);
        return v;
    }

    const AdversaryScript& script_;
    const ClusterConfig& cfg_;
    Cluster cluster_;
    std::mt19937_64 rng_;
    std::vector<std::uint64_t> used_;
    std::uint64_t next_tag_ = 0;
    std::uint64_t round_id_ = 0;
    ScenarioReport report_;
};

// ---------------------------------------------------------------------------
// JSON

json verdict_json(const BypassVerdict& v) {
    return json{{"kind", std::string(to_string(v.kind))},
                {"suspected_mass_bytes", v.suspected_mass_bytes},
                {"unattributed_mass_bytes", v.unattributed_mass_bytes},
                {"evidence_bins", v.evidence.size()}};
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Rational json_rational(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_unsigned() || j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return parse_rational(j.dump());
    throw ParseError("expected a number");
}

std::uint8_t json_protocol(const json& j) {
    if (j.is_number()) return j.get<std::uint8_t>();
    auto s = j.get<std::string>();
    if (s == "tcp") return 6;
    if (s == "udp") return 17;
    if (s == "icmp") return 1;
    throw ParseError("unknown protocol '" + s + "'");
}

Selector parse_selector(const json& j) {
    Selector s;
    if (j.contains("src")) s.src = Prefix::parse(j.at("src").get<std::string>());
    if (j.contains("dst")) s.dst = Prefix::parse(j.at("dst").get<std::string>());
    if (j.contains("src_port")) s.src_port = j.at("src_port").get<std::uint16_t>();
    if (j.contains("dst_port")) s.dst_port = j.at("dst_port").get<std::uint16_t>();
    if (j.contains("protocol")) s.protocol = json_protocol(j.at("protocol"));
    if (j.contains("verdict")) {
        auto v = j.at("verdict").get<std::string>();
        if (v == "ALLOW")
            s.verdict = Verdict::Allow;
        else if (v == "DROP")
            s.verdict = Verdict::Drop;
        else
            throw ParseError("verdict must be ALLOW or DROP");
    }
    if (j.contains("tags")) s.tags = j.at("tags").get<std::vector<std::uint64_t>>();
    if (j.contains("every")) s.every = j.at("every").get<std::uint64_t>();
    if (j.contains("limit")) s.limit = j.at("limit").get<std::uint64_t>();
    return s;
}

std::vector<Packet> parse_packets(const json& arr) {
    std::vector<Packet> out;
    for (const auto& j : arr) {
        Packet p;
        p.key.src_ip = parse_ipv4(j.at("src").get<std::string>());
        p.key.dst_ip = parse_ipv4(j.at("dst").get<std::string>());
        p.key.src_port = get_or<std::uint16_t>(j, "src_port", 0);
        p.key.dst_port = get_or<std::uint16_t>(j, "dst_port", 0);
        p.key.protocol = j.contains("protocol") ? json_protocol(j.at("protocol")) : 17;
        p.size_bytes = get_or<std::uint32_t>(j, "size", 512);
        if (p.size_bytes == 0) throw DomainError("packet size must be positive");
        auto count = get_or<std::uint64_t>(j, "count", 1);
        for (std::uint64_t c = 0; c < count; ++c) out.push_back(p);
    }
    return out;
}

AdversaryScript script_from_json(const json& j) {
    AdversaryScript s;
    s.seed = get_or<std::uint64_t>(j, "seed", 0);
    if (!j.contains("actions")) return s;
    for (const auto& a : j.at("actions")) {
        AdversaryAction act;
        auto type = a.at("type").get<std::string>();
        bool known = false;
        for (auto k : {ActionKind::ReorderWindow, ActionKind::Delay, ActionKind::InjectBefore, ActionKind::DropBefore,
                       ActionKind::InjectAfter, ActionKind::DropAfter, ActionKind::MisdispatchTo})
            if (type == to_string(k)) {
                act.kind = k;
                known = true;
            }
        if (!known) throw ParseError("unknown action type '" + type + "'");
        act.window = get_or<std::uint64_t>(a, "window", 0);
        act.amount = get_or<std::uint64_t>(a, "amount", 0);
        act.enclave = get_or<std::size_t>(a, "enclave", 0);
        if (a.contains("select")) act.select = parse_selector(a.at("select"));
        if (a.contains("packets")) act.packets = parse_packets(a.at("packets"));
        if (act.kind == ActionKind::InjectBefore && act.packets.empty())
            throw ParseError("inject_before needs explicit packets");
        s.actions.push_back(std::move(act));
    }
    return s;
}

TrafficProfile profile_from_json(const json& j) {
    TrafficProfile p;
    p.flow_count = get_or<std::uint64_t>(j, "flow_count", p.flow_count);
    p.seed = get_or<std::uint64_t>(j, "seed", p.seed);
    if (j.contains("packets_per_flow")) {
        const auto& d = j.at("packets_per_flow");
        if (d.contains("geometric")) {
            p.packets_per_flow.kind = PacketsPerFlow::Kind::Geometric;
            p.packets_per_flow.p = d.at("geometric").get<double>();
        } else {
            p.packets_per_flow.constant = d.at("constant").get<std::uint64_t>();
        }
    }
    if (j.contains("size")) {
        const auto& d = j.at("size");
        if (d.contains("uniform")) {
            p.size.kind = SizeDistribution::Kind::Uniform;
            p.size.low = d.at("uniform").at(0).get<std::uint32_t>();
            p.size.high = d.at("uniform").at(1).get<std::uint32_t>();
        } else {
            p.size.low = p.size.high = d.at("constant").get<std::uint32_t>();
        }
    }
    auto pool = [&](const char* key, std::vector<Prefix>& out) {
        if (!j.contains(key)) return;
        out.clear();
        for (const auto& s : j.at(key)) out.push_back(Prefix::parse(s.get<std::string>()));
    };
    pool("src_pool", p.src_pool);
    pool("dst_pool", p.dst_pool);
    if (j.contains("protocols")) {
        p.protocols.clear();
        for (const auto& v : j.at("protocols")) p.protocols.push_back(json_protocol(v));
    }
    return p;
}

ClusterConfig cluster_from_json(const json& j) {
    ClusterConfig c;
    c.round_packets = get_or<std::uint64_t>(j, "round_packets", c.round_packets);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.filter.update_period = get_or<std::uint64_t>(j, "update_period", 0);
    c.threaded = get_or<bool>(j, "threaded", c.threaded);
    c.auto_redistribute = get_or<bool>(j, "auto_redistribute", c.auto_redistribute);
    c.attestation_latency_s = get_or<double>(j, "attestation_latency_s", c.attestation_latency_s);
    auto& r = c.redistribution;
    r.max_enclaves = get_or<std::size_t>(j, "max_enclaves", r.max_enclaves);
    if (j.contains("trigger")) r.trigger = json_rational(j.at("trigger"));
    if (j.contains("round_seconds")) r.round_seconds = json_rational(j.at("round_seconds"));
    if (j.contains("capacity")) {
        const auto& k = j.at("capacity");
        r.capacity.memory_limit = get_or<std::uint64_t>(k, "memory_limit", r.capacity.memory_limit);
        r.capacity.bytes_per_rule = get_or<std::uint64_t>(k, "bytes_per_rule", r.capacity.bytes_per_rule);
        r.capacity.fixed_overhead = get_or<std::uint64_t>(k, "fixed_overhead", r.capacity.fixed_overhead);
        if (k.contains("bandwidth_limit")) r.capacity.bandwidth_limit = json_rational(k.at("bandwidth_limit"));
    }
    if (j.contains("sketch")) {
        const auto& k = j.at("sketch");
        c.sketch.depth = get_or<std::uint8_t>(k, "depth", c.sketch.depth);
        c.sketch.width = get_or<std::uint32_t>(k, "width", c.sketch.width);
        c.sketch.session_seed = get_or<std::uint64_t>(k, "session_seed", c.sketch.session_seed);
        auto mode = get_or<std::string>(k, "count_mode", "bytes");
        if (mode != "bytes" && mode != "packets") throw ParseError("count_mode must be bytes or packets");
        c.sketch.count_mode = mode == "bytes" ? CountMode::Bytes : CountMode::Packets;
    }
    return c;
}

}  // namespace

ScenarioReport run_scenario(std::span<const Packet> trace, const RuleSet& rules, const AdversaryScript& script,
                            const ClusterConfig& cluster) {
    return ScenarioRunner(rules, script, cluster).run(trace);
}

ScenarioReport run_scenario(const Scenario& s) {
    auto trace = generate(s.profile);
    return run_scenario(trace, s.rules, s.script, s.cluster);
}

AdversaryScript parse_script(std::string_view text) {
    try {
        return script_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(std::string("script: ") + e.what());
    }
}

TrafficProfile parse_profile(std::string_view text) {
    try {
        return profile_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(std::string("profile: ") + e.what());
    }
}

ClusterConfig parse_cluster_config(std::string_view text) {
    try {
        return cluster_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(std::string("cluster: ") + e.what());
    }
}

Scenario parse_scenario(std::string_view text, const std::string& base_dir) {
    try {
        auto j = json::parse(text);
        Scenario s;
        if (j.contains("profile")) s.profile = profile_from_json(j.at("profile"));
        if (j.contains("rules")) {
            std::string joined;
            for (const auto& line : j.at("rules")) joined += line.get<std::string>() + "\n";
            s.rules = parse_ruleset(joined);
        } else if (j.contains("rules_path")) {
            std::filesystem::path p = j.at("rules_path").get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            s.rules = load_ruleset(p.string());
        } else {
            throw ParseError("scenario needs rules or rules_path");
        }
        if (j.contains("script")) s.script = script_from_json(j.at("script"));
        if (j.contains("cluster")) s.cluster = cluster_from_json(j.at("cluster"));
        if (j.contains("rounds")) {
            auto rounds = j.at("rounds").get<std::uint64_t>();
            if (rounds == 0) throw ParseError("rounds must be positive");
            // Expected trace length is only known after generation; fix the
            // window from the mean flow size.
            double per_flow = s.profile.packets_per_flow.kind == PacketsPerFlow::Kind::Constant
                                  ? static_cast<double>(s.profile.packets_per_flow.constant)
                                  : 1.0 / s.profile.packets_per_flow.p;
            auto expected = static_cast<std::uint64_t>(static_cast<double>(s.profile.flow_count) * per_flow);
            s.cluster.round_packets = std::max<std::uint64_t>(1, (expected + rounds - 1) / rounds);
        }
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    auto base = std::filesystem::path(path).parent_path().string();
    return parse_scenario(detail::read_file(path), base.empty() ? "." : base);
}

std::string ScenarioReport::to_json() const {
    json j;
    j["victim"] = verdict_json(victim);
    j["neighbor"] = verdict_json(neighbor);
    j["rounds"] = json::array();
    for (const auto& r : rounds)
        j["rounds"].push_back({{"round", r.round}, {"victim", verdict_json(r.victim)}, {"neighbor", verdict_json(r.neighbor)}});
    j["misdispatch_count"] = misdispatches.size();
    j["misdispatches"] = json::array();
    for (const auto& m : misdispatches) {
        std::ostringstream flow;
        flow << m.flow;
        j["misdispatches"].push_back(
            {{"enclave", m.enclave}, {"flow", flow.str()}, {"round", m.round}, {"arrival_index", m.arrival_index}});
    }
    j["events"] = json::array();
    for (const auto& e : events)
        j["events"].push_back({{"action", std::string(to_string(e.action))},
                               {"round", e.round},
                               {"payload_tag", e.payload_tag},
                               {"size_bytes", e.size_bytes}});
    j["round_log"] = json::array();
    for (const auto& l : round_log) j["round_log"].push_back(json::parse(l.to_json()));
    j["packets_filtered"] = packets_filtered;
    std::size_t allowed = 0;
    std::string canon;
    for (const auto& [tag, d] : decisions) {
        allowed += d.verdict == Verdict::Allow ? 1 : 0;
        canon += std::to_string(tag) + ':' + std::string(vif::to_string(d.verdict)) + ':' +
                 (d.matched_rule ? std::to_string(*d.matched_rule) : "-") + '\n';
    }
    j["decisions"] = {{"count", decisions.size()},
                      {"allowed", allowed},
                      {"sha256", crypto::to_hex(crypto::sha256(std::span(
                                     reinterpret_cast<const std::uint8_t*>(canon.data()), canon.size())))}};
    j["stats"] = {{"packets", stats.packets},
                  {"lookups", stats.lookups},
                  {"hashes", stats.hashes},
                  {"cache_hits", stats.cache_hits},
                  {"batch_insertions", stats.batch_insertions},
                  {"sketch_updates", stats.sketch_updates}};
    return j.dump(2);
}

}  // namespace vif
