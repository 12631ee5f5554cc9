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
#include <optional>
#include <vector>

#include "vif/flow_model.hpp"

namespace vif {

/**
 * Two-level binary trie over (dst prefix, src prefix) returning the same
 * first match as first_match_index(). Each dst node owns an optional src
 * trie; each src node lists the rules with exactly that prefix pair.
 */
class RuleIndex {
public:
    RuleIndex() = default;
    explicit RuleIndex(const RuleSet& rules);

    std::optional<std::size_t> lookup(const FlowKey& key) const noexcept;

private:
    struct Node {
        std::int32_t child[2] = {-1, -1};
        std::int32_t src_root = -1;       // dst nodes only
        std::vector<std::uint32_t> rules;  // src nodes only, ascending
    };

    std::int32_t descend(std::int32_t node, Ipv4 addr, std::uint8_t length);

    struct Tail {
        std::optional<std::uint16_t> src_port;
        std::optional<std::uint16_t> dst_port;
        std::optional<std::uint8_t> protocol;
    };
    std::vector<Tail> tails_;
    std::vector<Node> nodes_;
};

}  // namespace vif
