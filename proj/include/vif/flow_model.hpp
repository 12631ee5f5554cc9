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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vif/error.hpp"

namespace vif {

using Ipv4 = std::uint32_t;

/// Parses dotted-quad notation; throws ParseError on malformed input.
Ipv4 parse_ipv4(std::string_view text);
std::string format_ipv4(Ipv4 addr);

/**
 * Five-tuple flow identity.
 *
 * Ordering and equality are defined over the 104-bit concatenation
 * src_ip | dst_ip | src_port | dst_port | protocol, which is also the
 * canonical 13-byte big-endian serialization.
 */
struct FlowKey {
    Ipv4 src_ip = 0;
    Ipv4 dst_ip = 0;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t protocol = 0;

    static constexpr std::size_t kWireSize = 13;
    using Bytes = std::array<std::uint8_t, kWireSize>;

    Bytes serialize() const noexcept;
    static FlowKey deserialize(std::span<const std::uint8_t> bytes);

    auto operator<=>(const FlowKey&) const = default;
};

struct FlowKeyHash {
    std::size_t operator()(const FlowKey& k) const noexcept;
};

std::ostream& operator<<(std::ostream& os, const FlowKey& k);

/**
 * One packet as seen by the simulator. arrival_index stands in for the
 * arrival time; the filter never reads it.
 */
struct Packet {
    FlowKey key;
    std::uint32_t size_bytes = 1;
    std::uint64_t arrival_index = 0;
    std::uint64_t payload_tag = 0;

    bool operator==(const Packet&) const = default;
};

/// The header fields copied across the sealed boundary, plus a reference
/// back to the untrusted packet buffer.
struct PacketDigest {
    FlowKey key;
    std::uint32_t size_bytes = 1;
    std::uint64_t ref = 0;
};

inline PacketDigest digest(const Packet& p, std::uint64_t ref) noexcept {
    return PacketDigest{p.key, p.size_bytes, ref};
}

struct Prefix {
    Ipv4 addr = 0;
    std::uint8_t length = 0;

    Prefix() = default;
    /// Host bits are cleared; length must be 0..32.
    Prefix(Ipv4 a, std::uint8_t len);

    Ipv4 mask() const noexcept {
        return length == 0 ? 0u : ~Ipv4{0} << (32 - length);
    }
    bool contains(Ipv4 ip) const noexcept { return (ip & mask()) == addr; }

    static Prefix parse(std::string_view cidr);
    std::string to_string() const;

    auto operator<=>(const Prefix&) const = default;
};

/// Coarse flow specification; empty optionals are wildcards.
struct FlowSpec {
    Prefix src;
    Prefix dst;
    std::optional<std::uint16_t> src_port;
    std::optional<std::uint16_t> dst_port;
    std::optional<std::uint8_t> protocol;

    static FlowSpec exact(const FlowKey& k);
    static FlowSpec any() { return {}; }

    bool operator==(const FlowSpec&) const = default;
};

bool matches(const FlowSpec& spec, const FlowKey& key) noexcept;

enum class Verdict : std::uint8_t { Allow, Drop };

std::string_view to_string(Verdict v) noexcept;

/// Exact rational probability num/den with 0 <= num <= den.
struct Probability {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    Probability() = default;
    Probability(std::uint64_t n, std::uint64_t d);

    /// Accepts "0.25", "1", "0" or "1/3".
    static Probability parse(std::string_view text);
    std::string to_string() const;
    double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    bool operator==(const Probability& o) const noexcept {
        return static_cast<unsigned __int128>(num) * o.den ==
               static_cast<unsigned __int128>(o.num) * den;
    }
};

using RuleAction = std::variant<Verdict, Probability>;

struct FilterRule {
    FlowSpec spec;
    RuleAction action = Verdict::Allow;

    bool is_probabilistic() const noexcept { return std::holds_alternative<Probability>(action); }
    bool operator==(const FilterRule&) const = default;
};

/**
 * Ordered rule list with first-match-wins semantics and an implicit
 * trailing ALLOW. Construction rejects duplicate specs.
 */
class RuleSet {
public:
    RuleSet() = default;
    explicit RuleSet(std::vector<FilterRule> rules);

    const std::vector<FilterRule>& rules() const noexcept { return rules_; }
    std::size_t size() const noexcept { return rules_.size(); }
    bool empty() const noexcept { return rules_.empty(); }
    const FilterRule& operator[](std::size_t i) const { return rules_.at(i); }

    static constexpr Verdict default_action = Verdict::Allow;

    /// Rules at the given indices, original order preserved.
    RuleSet subset(std::span<const std::size_t> indices) const;

    bool operator==(const RuleSet&) const = default;

private:
    std::vector<FilterRule> rules_;
};

/// Index of the earliest matching rule by linear scan, or nullopt.
std::optional<std::size_t> first_match_index(const RuleSet& rs, const FlowKey& key) noexcept;

/// Earliest matching rule; a synthetic ALLOW /0 rule when nothing matches.
FilterRule first_match(const RuleSet& rs, const FlowKey& key);

// Rule file text format.
std::string format_rule(const FilterRule& rule);
FilterRule parse_rule(std::string_view line);
std::string format_ruleset(const RuleSet& rs);
/// Parse a whole rule file; ParseError messages carry "line N".
RuleSet parse_ruleset(std::string_view text);
RuleSet load_ruleset(const std::string& path);

// Trace CSV.
inline constexpr std::string_view kTraceHeader =
    "arrival_index,src_ip,dst_ip,src_port,dst_port,protocol,size_bytes,payload_tag";

std::string format_trace(std::span<const Packet> trace);
std::vector<Packet> parse_trace(std::string_view csv);
std::vector<Packet> load_trace(const std::string& path);
void save_trace(const std::string& path, std::span<const Packet> trace);

}  // namespace vif
