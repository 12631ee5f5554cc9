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

#include "vif/bypass_detector.hpp"

#include <algorithm>

#include "vif/error.hpp"

namespace vif {

std::string_view to_string(BypassKind k) noexcept {
    switch (k) {
        case BypassKind::Clean: return "CLEAN";
        case BypassKind::InjectionAfter: return "INJECTION_AFTER";
        case BypassKind::DropAfter: return "DROP_AFTER";
        case BypassKind::DropBefore: return "DROP_BEFORE";
        case BypassKind::Mixed: return "MIXED";
    }
    return "?";
}

namespace {

struct Masses {
    std::uint64_t positive = 0;
    std::uint64_t negative = 0;
};

Masses masses(const std::vector<BinDelta>& ev) {
    Masses m;
    for (const auto& d : ev) {
        if (d.delta > 0)
            m.positive += static_cast<std::uint64_t>(d.delta);
        else
            m.negative += static_cast<std::uint64_t>(-d.delta);
    }
    return m;
}

void require_mode(const CountMinSketch& s, KeyMode mode, const char* who) {
    if (s.key_mode() != mode)
        throw IncomparableError(std::string(who) + " sketch must be keyed " + std::string(to_string(mode)));
}

}  // namespace

BypassVerdict victim_check(const CountMinSketch& filter_outgoing, const CountMinSketch& victim_received) {
    require_mode(filter_outgoing, KeyMode::PerFiveTuple, "filter outgoing");
    require_mode(victim_received, KeyMode::PerFiveTuple, "victim");
    BypassVerdict v;
    v.evidence = diff_report(filter_outgoing, victim_received);
    if (v.evidence.empty()) return v;
    auto m = masses(v.evidence);
    // Surplus at the victim: injected after filtering. Deficit: dropped.
    if (m.positive && m.negative)
        v.kind = BypassKind::Mixed;
    else
        v.kind = m.positive ? BypassKind::InjectionAfter : BypassKind::DropAfter;
    v.suspected_mass_bytes = (m.positive + m.negative) / filter_outgoing.depth();
    return v;
}

BypassVerdict neighbor_check(const CountMinSketch& filter_incoming, const CountMinSketch& neighbor_sent) {
    require_mode(filter_incoming, KeyMode::PerSourceIp, "filter incoming");
    require_mode(neighbor_sent, KeyMode::PerSourceIp, "neighbor");
    BypassVerdict v;
    v.evidence = diff_report(filter_incoming, neighbor_sent);
    if (v.evidence.empty()) return v;
    auto m = masses(v.evidence);
    v.unattributed_mass_bytes = m.negative / filter_incoming.depth();
    if (m.positive && !m.negative) {
        v.kind = BypassKind::DropBefore;
        v.suspected_mass_bytes = m.positive / filter_incoming.depth();
    } else {
        v.kind = BypassKind::Mixed;
        v.suspected_mass_bytes = m.positive / filter_incoming.depth();
    }
    return v;
}

ExclusionTestResult route_exclusion_test(const AsGraph& graph, AsId victim, AsId filter_as, const DropOracle& drops) {
    auto base = compute_routes(graph, victim).best_path(filter_as);
    if (!base) throw Error(ErrorCode::InvalidArgument, "no policy-compliant path from filter AS to victim");
    ExclusionTestResult out;
    out.tested_paths.push_back(*base);
    out.drops.push_back(drops(*base));
    if (!out.drops.back()) return out;

    std::vector<AsId> candidates(base->begin() + 1, base->end() - 1);
    std::sort(candidates.begin(), candidates.end());
    for (auto x : candidates) {
        auto alt = compute_routes(graph, victim, {x}).best_path(filter_as);
        if (!alt || std::find(out.tested_paths.begin(), out.tested_paths.end(), *alt) != out.tested_paths.end())
            continue;
        out.tested_paths.push_back(*alt);
        out.drops.push_back(drops(*alt));
    }

    bool any_clean = std::find(out.drops.begin(), out.drops.end(), false) != out.drops.end();
    if (!any_clean) {
        out.suspects = {filter_as};
        return out;
    }
    for (auto x : candidates) {
        bool all_containing_drop = true;
        bool clean_avoiding = false;
        for (std::size_t i = 0; i < out.tested_paths.size(); ++i) {
            const auto& p = out.tested_paths[i];
            bool contains = std::find(p.begin(), p.end(), x) != p.end();
            if (contains && !out.drops[i]) all_containing_drop = false;
            if (!contains && !out.drops[i]) clean_avoiding = true;
        }
        if (all_containing_drop && clean_avoiding) out.suspects.insert(x);
    }
    return out;
}

}  // namespace vif
