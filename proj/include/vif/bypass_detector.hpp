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
#include <set>
#include <string>
#include <vector>

#include "vif/packet_log.hpp"
#include "vif/route_sim.hpp"

namespace vif {

enum class BypassKind : std::uint8_t { Clean, InjectionAfter, DropAfter, DropBefore, Mixed };

std::string_view to_string(BypassKind k) noexcept;

struct BypassVerdict {
    BypassKind kind = BypassKind::Clean;
    std::vector<BinDelta> evidence;
    std::uint64_t suspected_mass_bytes = 0;
    /// Neighbor check only: bins where the filter saw more than the neighbor
    /// sent (injection before filtering, not an attack).
    std::uint64_t unattributed_mass_bytes = 0;
};

/// Victim side: filter's outgoing per-five-tuple log vs what arrived.
BypassVerdict victim_check(const CountMinSketch& filter_outgoing, const CountMinSketch& victim_received);

/// Neighbor side: filter's incoming per-source-IP log vs what was sent.
BypassVerdict neighbor_check(const CountMinSketch& filter_incoming, const CountMinSketch& neighbor_sent);

/// Whether the victim observed drops while traffic followed `path`
/// (filter AS first, victim last).
using DropOracle = std::function<bool(const AsPath& path)>;

struct ExclusionTestResult {
    std::set<AsId> suspects;
    std::vector<AsPath> tested_paths;
    std::vector<bool> drops;
};

/**
 * Reroutes inbound traffic around each intermediate AS of the default
 * filter->victim path and blames the ASes that only appear on dropping
 * paths. If every tested path drops, the filtering AS itself is blamed.
 */
ExclusionTestResult route_exclusion_test(const AsGraph& graph, AsId victim, AsId filter_as, const DropOracle& drops);

}  // namespace vif
