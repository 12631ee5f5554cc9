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
#include <vector>

#include "vif/flow_model.hpp"

namespace vif {

enum class KeyMode : std::uint8_t { PerSourceIp = 0, PerFiveTuple = 1 };
enum class CountMode : std::uint8_t { Bytes = 0, Packets = 1 };

std::string_view to_string(KeyMode m) noexcept;

struct SketchParams {
    std::uint8_t depth = 2;
    std::uint32_t width = 65536;
    KeyMode key_mode = KeyMode::PerSourceIp;
    CountMode count_mode = CountMode::Bytes;
    /// Session seed; row seeds are expanded from it.
    std::uint64_t session_seed = 0;
};

struct BinDelta {
    std::uint32_t row = 0;
    std::uint32_t bin = 0;
    std::int64_t delta = 0;  // theirs - mine

    bool operator==(const BinDelta&) const = default;
};

/**
 * Count-min sketch over source IPs or five-tuples.
 *
 * Row r hashes an item split into 32-bit words w_0..w_3 with a
 * multiply-add scheme h_r = (sum a_{r,t} w_t + c_r) mod 2^64, takes the
 * high 32 bits and reduces them mod width. Counters accumulate bytes by
 * default.
 */
class CountMinSketch {
public:
    explicit CountMinSketch(const SketchParams& params = {});

    void update(const Packet& p);
    void update(const PacketDigest& d);
    /// Adds `amount` to the item's bins; throws Error(Overflow) past 2^64-1.
    void add(const FlowKey& key, std::uint64_t amount);

    /// Item is 4 bytes (big-endian source IP) or 13 bytes (FlowKey wire form)
    /// depending on key_mode.
    std::uint64_t point_query(std::span<const std::uint8_t> item) const;
    std::uint64_t query(const FlowKey& key) const noexcept;
    std::uint64_t query_source(Ipv4 ip) const;

    bool comparable(const CountMinSketch& other) const noexcept;

    std::uint8_t depth() const noexcept { return depth_; }
    std::uint32_t width() const noexcept { return width_; }
    KeyMode key_mode() const noexcept { return key_mode_; }
    CountMode count_mode() const noexcept { return count_mode_; }
    std::uint64_t total_updates() const noexcept { return total_updates_; }
    std::span<const std::uint64_t> row_seeds() const noexcept { return seeds_; }
    std::span<const std::uint64_t> counters() const noexcept { return counters_; }
    std::uint64_t counter(std::uint32_t row, std::uint32_t bin) const { return counters_.at(std::size_t{row} * width_ + bin); }
    std::size_t memory_bytes() const noexcept { return counters_.size() * sizeof(std::uint64_t); }

    /// Bin addressed by `key` in `row`.
    std::uint32_t bin_of(std::uint32_t row, const FlowKey& key) const noexcept;

    void clear() noexcept;

    /// Wire format: 16-byte header, total_updates, row seeds, counters.
    std::vector<std::uint8_t> serialize() const;
    static CountMinSketch deserialize(std::span<const std::uint8_t> bytes);

    /// Serialized form followed by HMAC-SHA-256 under the session key.
    std::vector<std::uint8_t> seal(std::span<const std::uint8_t> session_key) const;
    /// Verifies the trailing MAC; throws Error(Auth) on mismatch.
    static CountMinSketch open(std::span<const std::uint8_t> sealed, std::span<const std::uint8_t> session_key);

    /// "row,bin,count" lines for non-zero counters, with header.
    std::string dump_csv() const;

    bool operator==(const CountMinSketch&) const = default;

private:
    friend CountMinSketch merge(const CountMinSketch& a, const CountMinSketch& b);

    struct RowHash {
        std::array<std::uint64_t, 4> mul{};
        std::uint64_t add = 0;
        bool operator==(const RowHash&) const = default;
    };

    void derive_hashes();
    std::uint32_t bin_for_words(std::uint32_t row, const std::array<std::uint32_t, 4>& words) const noexcept;
    std::array<std::uint32_t, 4> words_of(const FlowKey& key) const noexcept;
    void add_words(const std::array<std::uint32_t, 4>& words, std::uint64_t amount);

    std::uint8_t depth_;
    std::uint32_t width_;
    KeyMode key_mode_;
    CountMode count_mode_;
    std::uint64_t total_updates_ = 0;
    std::vector<std::uint64_t> seeds_;
    std::vector<RowHash> hashes_;
    std::vector<std::uint64_t> counters_;
};

/// Element-wise sum; throws IncomparableError on parameter mismatch.
CountMinSketch merge(const CountMinSketch& a, const CountMinSketch& b);

/// Every (row, bin) where the sketches differ, delta = theirs - mine.
std::vector<BinDelta> diff_report(const CountMinSketch& mine, const CountMinSketch& theirs);

inline constexpr std::uint8_t kSketchWireVersion = 1;
inline constexpr std::size_t kSketchHeaderSize = 16;

}  // namespace vif
