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

#include "vif/packet_log.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "vif/crypto.hpp"

namespace vif {

std::string_view to_string(KeyMode m) noexcept {
    return m == KeyMode::PerSourceIp ? "per_source_ip" : "per_five_tuple";
}

namespace {

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{in[at + static_cast<std::size_t>(i)]} << (8 * i);
    return v;
}

constexpr std::array<std::uint8_t, 4> kMagic = {'V', 'I', 'F', 'S'};

}  // namespace

CountMinSketch::CountMinSketch(const SketchParams& params)
    : depth_(params.depth), width_(params.width), key_mode_(params.key_mode), count_mode_(params.count_mode) {
    if (depth_ == 0) throw DomainError("sketch depth must be >= 1");
    if (width_ == 0) throw DomainError("sketch width must be >= 1");
    std::uint64_t state = params.session_seed ^ (key_mode_ == KeyMode::PerSourceIp ? 0x5ULL : 0x55ULL);
    while (seeds_.size() < depth_) {
        auto s = crypto::splitmix64(state);
        if (std::find(seeds_.begin(), seeds_.end(), s) == seeds_.end()) seeds_.push_back(s);
    }
    derive_hashes();
    counters_.assign(std::size_t{depth_} * width_, 0);
}

void CountMinSketch::derive_hashes() {
    hashes_.clear();
    for (auto seed : seeds_) {
        std::uint64_t state = seed;
        RowHash h;
        for (auto& m : h.mul) m = crypto::splitmix64(state) | 1ULL;
        h.add = crypto::splitmix64(state);
        hashes_.push_back(h);
    }
}

std::array<std::uint32_t, 4> CountMinSketch::words_of(const FlowKey& key) const noexcept {
    if (key_mode_ == KeyMode::PerSourceIp) return {key.src_ip, 0, 0, 0};
    return {key.src_ip, key.dst_ip, (std::uint32_t{key.src_port} << 16) | key.dst_port, key.protocol};
}

std::uint32_t CountMinSketch::bin_for_words(std::uint32_t row, const std::array<std::uint32_t, 4>& w) const noexcept {
    const auto& h = hashes_[row];
    std::uint64_t acc = h.add;
    for (std::size_t t = 0; t < 4; ++t) acc += h.mul[t] * w[t];
    return static_cast<std::uint32_t>((acc >> 32) % width_);
}

std::uint32_t CountMinSketch::bin_of(std::uint32_t row, const FlowKey& key) const noexcept {
    return bin_for_words(row, words_of(key));
}

void CountMinSketch::add_words(const std::array<std::uint32_t, 4>& words, std::uint64_t amount) {
    std::array<std::uint32_t, 256> bins{};
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    for (std::uint32_t r = 0; r < depth_; ++r) {
        bins[r] = bin_for_words(r, words);
        if (counters_[std::size_t{r} * width_ + bins[r]] > kMax - amount)
            throw Error(ErrorCode::Overflow, "count-min counter overflow");
    }
    for (std::uint32_t r = 0; r < depth_; ++r) counters_[std::size_t{r} * width_ + bins[r]] += amount;
    ++total_updates_;
}

void CountMinSketch::add(const FlowKey& key, std::uint64_t amount) { add_words(words_of(key), amount); }

void CountMinSketch::update(const Packet& p) {
    add(p.key, count_mode_ == CountMode::Bytes ? p.size_bytes : 1);
}

void CountMinSketch::update(const PacketDigest& d) {
    add(d.key, count_mode_ == CountMode::Bytes ? d.size_bytes : 1);
}

std::uint64_t CountMinSketch::query(const FlowKey& key) const noexcept {
    auto w = words_of(key);
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::uint32_t r = 0; r < depth_; ++r)
        best = std::min(best, counters_[std::size_t{r} * width_ + bin_for_words(r, w)]);
    return best;
}

std::uint64_t CountMinSketch::query_source(Ipv4 ip) const {
    if (key_mode_ != KeyMode::PerSourceIp) throw Error(ErrorCode::InvalidArgument, "sketch is not keyed by source IP");
    FlowKey k;
    k.src_ip = ip;
    return query(k);
}

std::uint64_t CountMinSketch::point_query(std::span<const std::uint8_t> item) const {
    if (key_mode_ == KeyMode::PerSourceIp) {
        if (item.size() != 4) throw Error(ErrorCode::InvalidArgument, "per-source-IP item must be 4 bytes");
        return query_source((Ipv4{item[0]} << 24) | (Ipv4{item[1]} << 16) | (Ipv4{item[2]} << 8) | item[3]);
    }
    return query(FlowKey::deserialize(item));
}

bool CountMinSketch::comparable(const CountMinSketch& o) const noexcept {
    return depth_ == o.depth_ && width_ == o.width_ && seeds_ == o.seeds_ && key_mode_ == o.key_mode_ &&
           count_mode_ == o.count_mode_;
}

void CountMinSketch::clear() noexcept {
    std::fill(counters_.begin(), counters_.end(), 0);
    total_updates_ = 0;
}

std::vector<std::uint8_t> CountMinSketch::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(kSketchHeaderSize + 8 + seeds_.size() * 8 + counters_.size() * 8);
    for (auto b : kMagic) out.push_back(static_cast<std::uint8_t>(b));
    out.push_back(kSketchWireVersion);
    out.push_back(depth_);
    out.push_back(static_cast<std::uint8_t>(key_mode_));
    out.push_back(static_cast<std::uint8_t>(count_mode_));  // flags
    put_le(out, width_, 4);
    put_le(out, 0, 4);  // reserved
    put_le(out, total_updates_, 8);
    for (auto s : seeds_) put_le(out, s, 8);
    for (auto c : counters_) put_le(out, c, 8);
    return out;
}

CountMinSketch CountMinSketch::deserialize(std::span<const std::uint8_t> in) {
    if (in.size() < kSketchHeaderSize + 8 || !std::equal(kMagic.begin(), kMagic.end(), in.begin()))
        throw ParseError("not a sketch (bad magic)");
    if (in[4] != kSketchWireVersion) throw ParseError("unsupported sketch version " + std::to_string(in[4]));
    if (in[6] > 1 || in[7] > 1) throw ParseError("bad sketch mode byte");
    SketchParams p;
    p.depth = in[5];
    p.key_mode = static_cast<KeyMode>(in[6]);
    p.count_mode = static_cast<CountMode>(in[7]);
    p.width = static_cast<std::uint32_t>(get_le(in, 8, 4));
    if (p.depth == 0 || p.width == 0) throw ParseError("bad sketch dimensions");
    std::size_t expect = kSketchHeaderSize + 8 + std::size_t{p.depth} * 8 + std::size_t{p.depth} * p.width * 8;
    if (in.size() != expect) throw ParseError("sketch length mismatch");
    CountMinSketch sk(p);
    sk.total_updates_ = get_le(in, 16, 8);
    std::size_t at = kSketchHeaderSize + 8;
    for (auto& s : sk.seeds_) {
        s = get_le(in, at, 8);
        at += 8;
    }
    sk.derive_hashes();
    for (auto& c : sk.counters_) {
        c = get_le(in, at, 8);
        at += 8;
    }
    return sk;
}

std::vector<std::uint8_t> CountMinSketch::seal(std::span<const std::uint8_t> session_key) const {
    auto bytes = serialize();
    auto mac = crypto::hmac_sha256(session_key, bytes);
    bytes.insert(bytes.end(), mac.begin(), mac.end());
    return bytes;
}

CountMinSketch CountMinSketch::open(std::span<const std::uint8_t> sealed, std::span<const std::uint8_t> session_key) {
    if (sealed.size() < 32) throw ParseError("sealed sketch too short");
    auto body = sealed.first(sealed.size() - 32);
    auto mac = crypto::hmac_sha256(session_key, body);
    if (!std::equal(mac.begin(), mac.end(), sealed.end() - 32)) throw Error(ErrorCode::Auth, "sketch MAC mismatch");
    return deserialize(body);
}

std::string CountMinSketch::dump_csv() const {
    std::ostringstream os;
    os << "row,bin,count\n";
    for (std::uint32_t r = 0; r < depth_; ++r)
        for (std::uint32_t b = 0; b < width_; ++b)
            if (auto c = counters_[std::size_t{r} * width_ + b]) os << r << ',' << b << ',' << c << '\n';
    return os.str();
}

CountMinSketch merge(const CountMinSketch& a, const CountMinSketch& b) {
    if (!a.comparable(b)) throw IncomparableError("cannot merge sketches with different parameters");
    CountMinSketch out = a;
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i < out.counters_.size(); ++i) {
        if (out.counters_[i] > kMax - b.counters_[i]) throw Error(ErrorCode::Overflow, "count-min counter overflow");
        out.counters_[i] += b.counters_[i];
    }
    out.total_updates_ += b.total_updates_;
    return out;
}

std::vector<BinDelta> diff_report(const CountMinSketch& mine, const CountMinSketch& theirs) {
    if (!mine.comparable(theirs)) throw IncomparableError("cannot compare sketches with different parameters");
    std::vector<BinDelta> out;
    auto a = mine.counters();
    auto b = theirs.counters();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        auto diff = static_cast<__int128>(b[i]) - static_cast<__int128>(a[i]);
        if (diff > std::numeric_limits<std::int64_t>::max() || diff < std::numeric_limits<std::int64_t>::min())
            throw Error(ErrorCode::Overflow, "sketch delta exceeds 63 bits");
        out.push_back({static_cast<std::uint32_t>(i / mine.width()), static_cast<std::uint32_t>(i % mine.width()),
                       static_cast<std::int64_t>(diff)});
    }
    return out;
}

}  // namespace vif
