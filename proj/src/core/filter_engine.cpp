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

#include "vif/filter_engine.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <sstream>

namespace vif {

namespace mp = boost::multiprecision;

FilterSecret FilterSecret::generate() {
    Bytes b{};
    crypto::random_bytes(b);
    return FilterSecret{b};
}

FilterSecret FilterSecret::from_seed(std::uint64_t seed) { return FilterSecret{crypto::derive(seed, "filter-secret")}; }

HashThreshold hash_threshold(const Probability& p) {
    if (p.den == 0 || p.num > p.den) throw DomainError("p_allow must lie in [0,1]");
    mp::uint512_t max256 = (mp::uint512_t{1} << 256) - 1;
    mp::uint512_t t = max256 * p.num / p.den;
    HashThreshold out{};
    for (int i = 31; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(t & 0xff);
        t >>= 8;
    }
    return out;
}

Verdict hash_decide(const FilterSecret& secret, const FlowKey& key, const HashThreshold& threshold) {
    auto kb = key.serialize();
    auto h = crypto::sha256(kb, secret.bytes());
    // Lexicographic order on big-endian bytes is numeric order.
    return std::lexicographical_compare(h.begin(), h.end(), threshold.begin(), threshold.end()) ? Verdict::Allow
                                                                                                : Verdict::Drop;
}

Verdict hash_decide(const FilterSecret& secret, const FlowKey& key, const Probability& p_allow) {
    return hash_decide(secret, key, hash_threshold(p_allow));
}

std::uint64_t lookup_table_size(std::size_t rule_count, std::size_t cache_entries, const TableCostModel& model) {
    if (model.bytes_per_entry == 0) throw DomainError("bytes per entry must be positive");
    return model.bytes_per_entry * (rule_count + cache_entries) + model.fixed_overhead;
}

FilterInstance::FilterInstance(RuleSet rules, FilterSecret secret, FilterConfig cfg)
    : rules_(std::move(rules)), secret_(secret), cfg_(cfg), index_(rules_) {
    thresholds_.reserve(rules_.size());
    for (const auto& r : rules_.rules()) {
        if (auto* p = std::get_if<Probability>(&r.action))
            thresholds_.push_back(hash_threshold(*p));
        else
            thresholds_.push_back(std::nullopt);
    }
}

Decision FilterInstance::decide(const FlowKey& key) {
    ++stats_.lookups;
    if (auto it = exact_cache_.find(key); it != exact_cache_.end()) {
        ++stats_.cache_hits;
        return it->second;
    }
    auto idx = index_.lookup(key);
    if (!idx) return Decision{RuleSet::default_action, std::nullopt};
    const auto& rule = rules_[*idx];
    if (auto* v = std::get_if<Verdict>(&rule.action)) return Decision{*v, idx};
    ++stats_.hashes;
    pending_.insert(key);
    return Decision{hash_decide(secret_, key, *thresholds_[*idx]), idx};
}

Decision FilterInstance::filter_packet(const Packet& p) { return filter_packet(digest(p, 0)); }

Decision FilterInstance::filter_packet(const PacketDigest& d) {
    auto out = decide(d.key);
    ++stats_.packets;
    if (cfg_.update_period != 0 && stats_.packets % cfg_.update_period == 0) batch_insert();
    return out;
}

std::size_t FilterInstance::batch_insert() {
    std::size_t inserted = 0;
    for (const auto& key : pending_) {
        auto idx = index_.lookup(key);
        // Pending flows always matched a probabilistic rule.
        auto verdict = hash_decide(secret_, key, *thresholds_[*idx]);
        if (exact_cache_.emplace(key, Decision{verdict, idx}).second) ++inserted;
    }
    pending_.clear();
    ++stats_.batch_insertions;
    return inserted;
}

std::string FilterInstance::export_sealed_state() const {
    auto text = format_ruleset(rules_);
    auto h = crypto::sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    std::ostringstream os;
    os << "ruleset_sha256 " << crypto::to_hex(h) << '\n';
    os << "cache_entries " << exact_cache_.size() << '\n';
    for (const auto& [key, d] : exact_cache_) {
        auto kb = key.serialize();
        os << crypto::to_hex(kb) << ' ' << to_string(d.verdict) << ' ' << *d.matched_rule << '\n';
    }
    return os.str();
}

namespace {
SketchParams with_mode(SketchParams p, KeyMode m) {
    p.key_mode = m;
    return p;
}
}  // namespace

SealedFilter::SealedFilter(RuleSet rules, FilterSecret secret, FilterConfig cfg, SketchParams sketch)
    : filter_(std::move(rules), secret, cfg),
      incoming_(with_mode(sketch, KeyMode::PerSourceIp)),
      outgoing_(with_mode(sketch, KeyMode::PerFiveTuple)),
      rule_bytes_(filter_.rules().size(), 0) {}

Decision SealedFilter::process(const PacketDigest& d) {
    incoming_.update(d);
    ++sketch_updates_;
    auto decision = filter_.filter_packet(d);
    if (decision.matched_rule)
        rule_bytes_[*decision.matched_rule] += d.size_bytes;
    else
        default_bytes_ += d.size_bytes;
    round_bytes_ += d.size_bytes;
    if (decision.verdict == Verdict::Allow) {
        outgoing_.update(d);
        ++sketch_updates_;
    }
    return decision;
}

FilterStats SealedFilter::stats() const noexcept {
    auto s = filter_.stats();
    s.sketch_updates = sketch_updates_;
    return s;
}

void SealedFilter::reset_round() {
    incoming_.clear();
    outgoing_.clear();
    std::fill(rule_bytes_.begin(), rule_bytes_.end(), 0);
    round_bytes_ = 0;
    default_bytes_ = 0;
}

}  // namespace vif
