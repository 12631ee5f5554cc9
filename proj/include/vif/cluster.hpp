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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vif/filter_engine.hpp"
#include "vif/flow_model.hpp"
#include "vif/packet_log.hpp"
#include "vif/rule_distribution.hpp"
#include "vif/rule_index.hpp"

namespace vif {

/// Rule ids in plans built by the cluster are 1-based positions in the
/// cluster's global rule set.
inline std::uint32_t rule_id_of(std::size_t global_index) { return static_cast<std::uint32_t>(global_index + 1); }

/**
 * Untrusted load balancer. A packet matching global rule i goes to one
 * of the enclaves holding i, chosen by a keyed hash of its five-tuple
 * with weights x[i][j] / b_i (uniform over installations when b_i = 0),
 * so every packet of a flow lands on the same enclave. Unmatched packets
 * go to the default enclave.
 */
class Dispatcher {
public:
    Dispatcher(const RuleSet& rules, DistributionPlan plan, std::uint64_t seed);

    std::size_t dispatch(const Packet& p) const;
    std::optional<std::size_t> matched_rule(const FlowKey& key) const { return index_.lookup(key); }

    const DistributionPlan& plan() const noexcept { return plan_; }
    std::size_t enclave_count() const noexcept { return plan_.n; }
    static constexpr std::size_t default_enclave() noexcept { return 0; }

private:
    RuleIndex index_;
    DistributionPlan plan_;
    std::uint64_t seed_;
    // Per rule: (enclave, cumulative weight in [0, 1]) pairs.
    std::vector<std::vector<std::pair<std::size_t, double>>> choices_;
};

struct MisdispatchReport {
    std::size_t enclave = 0;
    FlowKey flow;
    std::uint64_t round = 0;
    std::uint64_t arrival_index = 0;
};

/// Reports iff no rule in `assigned_rules` matches the packet.
std::optional<MisdispatchReport> detect_misdispatch(std::size_t enclave_id, const RuleSet& assigned_rules,
                                                    const Packet& p, std::uint64_t round = 0);

struct FilterReport {
    std::size_t enclave_id = 0;
    std::vector<std::uint32_t> rule_ids;         // R_i
    std::vector<std::uint64_t> measured_bytes;  // B_i, one entry per rule
};

struct RedistributionRound {
    std::uint64_t round_id = 0;
    std::size_t master = 0;
    std::vector<FilterReport> reports;
    DistributionPlan new_plan;
    Rational objective;
};

struct RedistributionConfig {
    CapacityConfig capacity;
    /// Fraction of each capacity that fires a round and that new plans
    /// are packed to.
    Rational trigger{9, 10};
    Rational round_seconds = 1;
    std::size_t max_enclaves = 256;
};

/**
 * Master-side re-planning: measured bytes become Gb/s loads over the
 * round, greedy_solve packs them into trigger * capacity, growing n
 * until a plan fits. `fired` lists enclaves whose trigger held; the
 * lowest becomes master. Throws InfeasibleError past max_enclaves.
 */
RedistributionRound redistribute(std::uint64_t round_id, const std::vector<FilterReport>& reports,
                                 const std::vector<std::size_t>& fired, const RedistributionConfig& cfg);

struct ClusterConfig {
    RedistributionConfig redistribution;
    bool auto_redistribute = true;
    std::uint64_t round_packets = 10'000;
    std::uint64_t seed = 0;
    FilterConfig filter;
    SketchParams sketch;
    /// Run enclaves on worker threads within a round.
    bool threaded = true;
    /// Simulated cost of attesting newly spawned enclaves.
    double attestation_latency_s = 3.04;
    /// Expected per-rule loads (Gb/s) for the first plan; defaults to zero.
    std::vector<Rational> initial_loads;
};

struct RoundLog {
    std::uint64_t round_id = 0;
    std::optional<std::size_t> master;
    std::size_t n_before = 0;
    std::size_t n_after = 0;
    std::optional<Rational> z;
    std::vector<std::size_t> triggers;
    std::size_t misdispatch_count = 0;

    std::string to_json() const;
};

/// Adversarial dispatcher hook: receives the honest choice, may return
/// another enclave.
using DispatchOverride = std::function<std::optional<std::size_t>(const Packet& p, std::size_t honest)>;

struct RoundResult {
    std::uint64_t round_id = 0;
    std::vector<Decision> decisions;     // aligned with the round's packets
    std::vector<std::size_t> enclave_of;  // where each packet went
    std::vector<MisdispatchReport> misdispatches;
    CountMinSketch incoming;  // merged over enclaves, per source IP
    CountMinSketch outgoing;  // merged over enclaves, per five-tuple
    std::vector<FilterReport> reports;
    RoundLog log;
    std::optional<RedistributionRound> redistribution;
};

/**
 * A set of sealed filters behind one dispatcher. Each round is a barrier:
 * the dispatcher fills per-enclave queues, enclave workers drain them,
 * and only then may a redistribution swap rule sets and dispatcher.
 */
class Cluster {
public:
    Cluster(RuleSet rules, ClusterConfig cfg);
    ~Cluster();
    Cluster(Cluster&&) noexcept;
    Cluster& operator=(Cluster&&) noexcept;

    RoundResult process_round(std::span<const Packet> packets, const DispatchOverride& override = {});
    /// Splits `trace` into round_packets windows.
    std::vector<RoundResult> run(std::span<const Packet> trace, const DispatchOverride& override = {});

    std::size_t size() const noexcept;
    const RuleSet& rules() const noexcept;
    const Dispatcher& dispatcher() const noexcept;
    const RuleSet& enclave_rules(std::size_t enclave) const;
    const FilterSecret& secret() const noexcept;
    const std::vector<RoundLog>& round_log() const noexcept;
    double simulated_seconds() const noexcept;
    /// Summed over every enclave that ever ran.
    FilterStats stats() const;
    /// Bytes the dispatcher sent per global rule in the last round.
    const std::vector<std::uint64_t>& dispatched_rule_bytes() const noexcept;

    /// Installs `plan` at the next round boundary (used by redistribution).
    void install_plan(DistributionPlan plan);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace vif
