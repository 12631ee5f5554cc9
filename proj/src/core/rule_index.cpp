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

#include "vif/rule_index.hpp"

namespace vif {

namespace {
inline unsigned bit_at(Ipv4 addr, unsigned depth) { return (addr >> (31 - depth)) & 1u; }
}  // namespace

RuleIndex::RuleIndex(const RuleSet& rules) {
    nodes_.emplace_back();  // dst root
    tails_.reserve(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const auto& spec = rules[i].spec;
        tails_.push_back({spec.src_port, spec.dst_port, spec.protocol});
        auto dst = descend(0, spec.dst.addr, spec.dst.length);
        if (nodes_[dst].src_root < 0) {
            nodes_.emplace_back();
            nodes_[dst].src_root = static_cast<std::int32_t>(nodes_.size() - 1);
        }
        auto src = descend(nodes_[dst].src_root, spec.src.addr, spec.src.length);
        nodes_[src].rules.push_back(static_cast<std::uint32_t>(i));
    }
}

std::int32_t RuleIndex::descend(std::int32_t node, Ipv4 addr, std::uint8_t length) {
    for (unsigned d = 0; d < length; ++d) {
        auto b = bit_at(addr, d);
        if (nodes_[node].child[b] < 0) {
            nodes_.emplace_back();
            nodes_[node].child[b] = static_cast<std::int32_t>(nodes_.size() - 1);
        }
        node = nodes_[node].child[b];
    }
    return node;
}

std::optional<std::size_t> RuleIndex::lookup(const FlowKey& key) const noexcept {
    if (nodes_.empty()) return std::nullopt;
    std::optional<std::size_t> best;
    std::int32_t dst = 0;
    for (unsigned dd = 0; dst >= 0; ++dd) {
        for (std::int32_t src = nodes_[dst].src_root, sd = 0; src >= 0; ++sd) {
            for (auto r : nodes_[src].rules) {
                if (best && r >= *best) break;
                const auto& spec = tails_[r];
                if ((!spec.src_port || *spec.src_port == key.src_port) &&
                    (!spec.dst_port || *spec.dst_port == key.dst_port) &&
                    (!spec.protocol || *spec.protocol == key.protocol)) {
                    best = r;
                    break;
                }
            }
            src = sd < 32 ? nodes_[src].child[bit_at(key.src_ip, static_cast<unsigned>(sd))] : -1;
        }
        dst = dd < 32 ? nodes_[dst].child[bit_at(key.dst_ip, dd)] : -1;
    }
    return best;
}

}  // namespace vif
