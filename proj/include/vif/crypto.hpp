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
#include <span>
#include <string>

namespace vif::crypto {

using Digest256 = std::array<std::uint8_t, 32>;

Digest256 sha256(std::span<const std::uint8_t> data);
Digest256 sha256(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
Digest256 hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data);
void random_bytes(std::span<std::uint8_t> out);

/// Deterministic 32-byte value expanded from a 64-bit seed and a label.
Digest256 derive(std::uint64_t seed, const std::string& label);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// splitmix64 step; used for seed expansion everywhere in the simulator.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace vif::crypto
