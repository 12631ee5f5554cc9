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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "vif/crypto.hpp"
#include "vif/flow_model.hpp"
#include "vif/packet_log.hpp"
#include "vif/rule_index.hpp"

namespace vif {

/// 32-byte per-filter secret mixed into the probabilistic hash.
class FilterSecret {
public:
    using Bytes = std::array<std::uint8_t, 32>;

    static FilterSecret generate();
    static FilterSecret from_seed(std::uint64_t seed);
    static FilterSecret from_bytes(const Bytes& b) { return FilterSecret{b}; }

    const Bytes& bytes() const noexcept { return bytes_; }

private:
    explicit FilterSecret(const Bytes& b) : bytes_(b) {}
    Bytes bytes_{};
};

struct Decision {
    Verdict verdict = Verdict::Allow;
    std::optional<std::size_t> matched_rule;  // nullopt: default action

    bool operator==(const Decision&) const = default;
};

/// 256-bit big-endian threshold floor((2^256 - 1) * p).
using HashThreshold = std::array<std::uint8_t, 32>;
HashThreshold hash_threshold(const Probability& p_allow);

/// ALLOW iff SHA-256(key bytes || secret) < floor((2^256 - 1) * p_allow).
Verdict hash_decide(const FilterSecret& secret, const FlowKey& key, const Probability& p_allow);
Verdict hash_decide(const FilterSecret& secret, const FlowKey& key, const HashThreshold& threshold);

/// Affine lookup-table memory model: u * (rules + cache_entries) + v.
struct TableCostModel {
    std::uint64_t bytes_per_entry = 30'000;    // u
    std::uint64_t fixed_overhead = 2'000'000;  // v
};
std::uint64_t lookup_table_size(std::size_t rule_count, std::size_t cache_entries, const TableCostModel& model = {});

struct FilterConfig {
    /// Packets between exact-match batch insertions; 0 disables promotion.
    std::uint64_t update_period = 0;
};

/// Per-packet work counters; used to bound the data-plane cost.
struct FilterStats {
    std::uint64_t packets = 0;
    std::uint64_t lookups = 0;
    std::uint64_t hashes = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t batch_insertions = 0;
    std::uint64_t sketch_updates = 0;
};

/**
 * Stateless filter f(p). The verdict depends only on the rule set, the
 * secret and the packet's five-tuple; arrival order, size and other
 * packets never enter the decision. Flows hitting a probabilistic rule
 * are queued and later promoted to exact-match entries carrying the same
 * hash verdict.
 */
class FilterInstance {
public:
    FilterInstance(RuleSet rules, FilterSecret secret, FilterConfig cfg = {});

    Decision filter_packet(const Packet& p);
    Decision filter_packet(const PacketDigest& d);

    /// Moves every pending flow into the exact-match cache.
    std::size_t batch_insert();

    const RuleSet& rules() const noexcept { return rules_; }
    const FilterStats& stats() const noexcept { return stats_; }
    const std::map<FlowKey, Decision>& exact_cache() const noexcept { return exact_cache_; }
    const std::set<FlowKey>& pending_flows() const noexcept { return pending_; }
    std::uint64_t table_bytes(const TableCostModel& model = {}) const {
        return lookup_table_size(rules_.size(), exact_cache_.size(), model);
    }

    /// Deterministic text export of (rule set hash, cache entries); never
    /// includes the secret.
    std::string export_sealed_state() const;

private:
    Decision decide(const FlowKey& key);

    RuleSet rules_;
    FilterSecret secret_;
    FilterConfig cfg_;
    RuleIndex index_;
    std::vector<std::optional<HashThreshold>> thresholds_;
    std::map<FlowKey, Decision> exact_cache_;
    std::set<FlowKey> pending_;
    FilterStats stats_;
};

/**
 * A filter inside its simulated trust boundary: logs every incoming
 * digest per source IP, filters it, and logs allowed digests per
 * five-tuple. Per-rule byte counts feed rule redistribution.
 */
class SealedFilter {
public:
    SealedFilter(RuleSet rules, FilterSecret secret, FilterConfig cfg, SketchParams sketch);

    Decision process(const PacketDigest& d);

    const FilterInstance& filter() const noexcept { return filter_; }
    FilterInstance& filter() noexcept { return filter_; }
    const CountMinSketch& incoming() const noexcept { return incoming_; }
    const CountMinSketch& outgoing() const noexcept { return outgoing_; }
    /// Bytes per local rule index since the last reset_round().
    const std::vector<std::uint64_t>& rule_bytes() const noexcept { return rule_bytes_; }
    std::uint64_t round_bytes() const noexcept { return round_bytes_; }
    std::uint64_t default_bytes() const noexcept { return default_bytes_; }
    FilterStats stats() const noexcept;

    /// Clears sketches and per-rule counters for a new audit round.
    void reset_round();

private:
    FilterInstance filter_;
    CountMinSketch incoming_;
    CountMinSketch outgoing_;
    std::vector<std::uint64_t> rule_bytes_;
    std::uint64_t round_bytes_ = 0;
    std::uint64_t default_bytes_ = 0;
    std::uint64_t sketch_updates_ = 0;
};

}  // namespace vif
