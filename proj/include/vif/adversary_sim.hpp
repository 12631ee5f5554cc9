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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vif/bypass_detector.hpp"
#include "vif/cluster.hpp"
#include "vif/flow_model.hpp"

namespace vif {

struct PacketsPerFlow {
    enum class Kind : std::uint8_t { Constant, Geometric };
    Kind kind = Kind::Constant;
    std::uint64_t constant = 1;
    double p = 0.5;  // geometric: support 1, 2, ..., mean 1/p
};

struct SizeDistribution {
    enum class Kind : std::uint8_t { Constant, Uniform };
    Kind kind = Kind::Constant;
    std::uint32_t low = 512;
    std::uint32_t high = 512;
};

struct TrafficProfile {
    std::uint64_t flow_count = 100;
    PacketsPerFlow packets_per_flow;
    SizeDistribution size;
    std::vector<Prefix> src_pool{Prefix::parse("10.0.0.0/8")};
    std::vector<Prefix> dst_pool{Prefix::parse("192.0.2.0/24")};
    std::vector<std::uint8_t> protocols{6, 17};
    std::uint64_t seed = 1;
};

/// Distinct flows, packets interleaved by a seeded shuffle; arrival_index
/// is dense from 0 and payload_tag is unique per packet.
std::vector<Packet> generate(const TrafficProfile& profile);

/// Pure predicate over ground-truth packet records. Unset fields match
/// anything; `verdict` is only usable after filtering.
struct Selector {
    std::optional<Prefix> src;
    std::optional<Prefix> dst;
    std::optional<std::uint16_t> src_port;
    std::optional<std::uint16_t> dst_port;
    std::optional<std::uint8_t> protocol;
    std::optional<Verdict> verdict;
    std::vector<std::uint64_t> tags;
    std::optional<std::uint64_t> every;  // arrival_index % every == 0
    std::optional<std::uint64_t> limit;  // at most this many packets per action

    bool matches(const Packet& p, std::optional<Verdict> decided = std::nullopt) const;
};

enum class ActionKind : std::uint8_t {
    ReorderWindow,
    Delay,
    InjectBefore,
    DropBefore,
    InjectAfter,
    DropAfter,
    MisdispatchTo
};

std::string_view to_string(ActionKind k) noexcept;

struct AdversaryAction {
    ActionKind kind = ActionKind::ReorderWindow;
    std::uint64_t window = 0;     // ReorderWindow
    std::uint64_t amount = 0;     // Delay, in packet positions
    std::size_t enclave = 0;      // MisdispatchTo
    Selector select;              // Delay, Drop*, MisdispatchTo, InjectAfter (re-injects filtered packets)
    std::vector<Packet> packets;  // Inject*: explicit packets
};

/// Ordered adversary behaviours, applied independently inside each audit
/// round so no action moves traffic across a round boundary.
struct AdversaryScript {
    std::vector<AdversaryAction> actions;
    std::uint64_t seed = 0;

    bool empty() const noexcept { return actions.empty(); }
};

struct RoundVerdicts {
    std::uint64_t round = 0;
    BypassVerdict victim;
    BypassVerdict neighbor;
};

/// What the adversary actually did; recorded outside the sealed boundary
/// and never read by the detectors.
struct GroundTruthEvent {
    ActionKind action = ActionKind::ReorderWindow;
    std::uint64_t round = 0;
    std::uint64_t payload_tag = 0;
    std::uint32_t size_bytes = 0;
};

struct ScenarioReport {
    std::vector<RoundVerdicts> rounds;
    BypassVerdict victim;    // combined over rounds
    BypassVerdict neighbor;  // combined over rounds
    std::vector<MisdispatchReport> misdispatches;
    std::map<std::uint64_t, Decision> decisions;  // payload_tag -> decision
    std::vector<GroundTruthEvent> events;
    std::vector<RoundLog> round_log;
    CountMinSketch neighbor_sent{SketchParams{.key_mode = KeyMode::PerSourceIp}};
    CountMinSketch filter_incoming{SketchParams{.key_mode = KeyMode::PerSourceIp}};
    CountMinSketch filter_outgoing{SketchParams{.key_mode = KeyMode::PerFiveTuple}};
    CountMinSketch victim_received{SketchParams{.key_mode = KeyMode::PerFiveTuple}};
    FilterStats stats;
    std::uint64_t packets_filtered = 0;

    bool all_clean() const noexcept {
        return victim.kind == BypassKind::Clean && neighbor.kind == BypassKind::Clean && misdispatches.empty();
    }
    std::string to_json() const;
};

/**
 * One end-to-end run: neighbor log, pre-filter adversary, cluster of
 * sealed filters, post-filter adversary, victim log, then the audits.
 * The trace is cut into cluster.round_packets windows.
 */
ScenarioReport run_scenario(std::span<const Packet> trace, const RuleSet& rules, const AdversaryScript& script,
                            const ClusterConfig& cluster);

struct Scenario {
    TrafficProfile profile;
    RuleSet rules;
    AdversaryScript script;
    ClusterConfig cluster;
};

/// JSON document {profile, rules_path | rules, script, cluster, rounds};
/// relative rules_path resolves against `base_dir`.
Scenario parse_scenario(std::string_view json, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);
AdversaryScript parse_script(std::string_view json);
TrafficProfile parse_profile(std::string_view json);
/// The "cluster" object of a scenario document.
ClusterConfig parse_cluster_config(std::string_view json);

/// Runs the scenario on its generated trace.
ScenarioReport run_scenario(const Scenario& s);

/// Combines per-round verdicts: CLEAN unless some round flagged; one kind
/// if every flagged round agrees, MIXED otherwise; masses add up.
BypassVerdict combine_verdicts(std::span<const BypassVerdict> per_round);

}  // namespace vif
