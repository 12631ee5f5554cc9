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

#include "vif/cluster.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <thread>

#include "json.hpp"

#include "vif/crypto.hpp"
#include "vif/error.hpp"

namespace vif {

namespace {

std::uint64_t flow_hash(const FlowKey& key, std::uint64_t seed) {
    auto bytes = key.serialize();
    std::uint64_t state = seed;
    std::uint64_t h = 0;
    for (std::size_t off = 0; off < bytes.size(); off += 8) {
        std::uint64_t chunk = 0;
        std::memcpy(&chunk, bytes.data() + off, std::min<std::size_t>(8, bytes.size() - off));
        state ^= chunk;
        h = crypto::splitmix64(state);
    }
    return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dispatcher

Dispatcher::Dispatcher(const RuleSet& rules, DistributionPlan plan, std::uint64_t seed)
    : index_(rules), plan_(std::move(plan)), seed_(seed) {
    if (plan_.n == 0) throw Error(ErrorCode::InvalidArgument, "plan has no enclaves");
    if (plan_.x.size() != rules.size()) throw Error(ErrorCode::InvalidArgument, "plan does not cover the rule set");
    choices_.resize(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        Rational total = 0;
        std::size_t installed = 0;
        for (std::size_t j = 0; j < plan_.n; ++j) {
            total += plan_.x[i][j];
            installed += plan_.y[i][j] ? 1 : 0;
        }
        if (installed == 0) throw Error(ErrorCode::InvalidArgument, "rule " + std::to_string(i + 1) + " not installed");
        Rational acc = 0;
        std::size_t seen = 0;
        for (std::size_t j = 0; j < plan_.n; ++j) {
            if (!plan_.y[i][j]) continue;
            ++seen;
            if (total > 0) {
                if (plan_.x[i][j] == 0) continue;
                acc += plan_.x[i][j];
                choices_[i].emplace_back(j, to_double(acc / total));
            } else {
                choices_[i].emplace_back(j, static_cast<double>(seen) / static_cast<double>(installed));
            }
        }
        choices_[i].back().second = 1.0;
    }
}

std::size_t Dispatcher::dispatch(const Packet& p) const {
    auto rule = index_.lookup(p.key);
    if (!rule) return default_enclave();
    const auto& c = choices_[*rule];
    if (c.size() == 1) return c.front().first;
    double u = static_cast<double>(flow_hash(p.key, seed_) >> 11) * 0x1.0p-53;
    for (const auto& [enclave, upto] : c)
        if (u < upto) return enclave;
    return c.back().first;
}

std::optional<MisdispatchReport> detect_misdispatch(std::size_t enclave_id, const RuleSet& assigned_rules,
                                                    const Packet& p, std::uint64_t round) {
    if (first_match_index(assigned_rules, p.key)) return std::nullopt;
    return MisdispatchReport{enclave_id, p.key, round, p.arrival_index};
}

// ---------------------------------------------------------------------------
// Redistribution

RedistributionRound redistribute(std::uint64_t round_id, const std::vector<FilterReport>& reports,
                                 const std::vector<std::size_t>& fired, const RedistributionConfig& cfg) {
    if (reports.empty()) throw Error(ErrorCode::InvalidArgument, "redistribution needs at least one report");
    if (fired.empty()) throw Error(ErrorCode::InvalidArgument, "redistribution without a fired trigger");
    if (cfg.trigger <= 0 || cfg.trigger > 1) throw DomainError("trigger must be in (0, 1]");
    if (cfg.round_seconds <= 0) throw DomainError("round duration must be positive");
    cfg.capacity.validate();

    std::map<std::uint32_t, std::uint64_t> bytes;
    for (const auto& r : reports) {
        if (r.rule_ids.size() != r.measured_bytes.size())
            throw Error(ErrorCode::InvalidArgument, "report for enclave " + std::to_string(r.enclave_id) +
                                                        " has mismatched rule and byte arrays");
        for (std::size_t i = 0; i < r.rule_ids.size(); ++i) bytes[r.rule_ids[i]] += r.measured_bytes[i];
    }
    std::vector<RuleLoad> loads;
    for (const auto& [id, b] : bytes)
        loads.push_back({id, Rational(boost::multiprecision::cpp_int(b) * 8, 1'000'000'000) / cfg.round_seconds});

    CapacityConfig headroom = cfg.capacity;
    headroom.bandwidth_limit = cfg.capacity.bandwidth_limit * cfg.trigger;
    auto usable = Rational(cfg.capacity.memory_limit - cfg.capacity.fixed_overhead) * cfg.trigger;
    headroom.memory_limit = cfg.capacity.fixed_overhead +
                            (boost::multiprecision::numerator(usable) / boost::multiprecision::denominator(usable))
                                .convert_to<std::uint64_t>();
    if (headroom.memory_limit < cfg.capacity.fixed_overhead + cfg.capacity.bytes_per_rule)
        throw InfeasibleError("trigger leaves no room for a single rule");
    if (!headroom.alpha) headroom.alpha = cfg.capacity.alpha_value();

    auto n = static_cast<std::size_t>(enclave_count(loads, headroom).n);
    for (; n <= cfg.max_enclaves; ++n) {
        auto res = greedy_solve(loads, headroom, n);
        if (!res.ok()) continue;
        if (auto bad = validate_plan(res.plan, loads, cfg.capacity); !bad.empty())
            throw Error(ErrorCode::Internal, "redistribution plan failed validation: " + bad.front());
        RedistributionRound round;
        round.round_id = round_id;
        round.master = *std::min_element(fired.begin(), fired.end());
        round.reports = reports;
        round.new_plan = std::move(res.plan);
        round.objective = plan_objective(round.new_plan, cfg.capacity);
        return round;
    }
    throw InfeasibleError("no feasible plan with up to " + std::to_string(cfg.max_enclaves) + " enclaves");
}

std::string RoundLog::to_json() const {
    nlohmann::json j;
    j["round_id"] = round_id;
    j["master"] = master ? nlohmann::json(*master) : nlohmann::json(nullptr);
    j["n_before"] = n_before;
    j["n_after"] = n_after;
    j["z"] = z ? nlohmann::json(format_decimal(*z, 9)) : nlohmann::json(nullptr);
    j["triggers"] = triggers;
    j["misdispatch_count"] = misdispatch_count;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Cluster

struct Cluster::Impl {
    struct Enclave {
        std::vector<std::size_t> global;  // local rule index -> global rule index
        RuleSet rules;
        std::unique_ptr<SealedFilter> filter;
    };

    RuleSet rules;
    ClusterConfig cfg;
    FilterSecret secret;
    std::unique_ptr<Dispatcher> dispatcher;
    std::vector<Enclave> enclaves;
    std::vector<RoundLog> log;
    std::vector<std::uint64_t> dispatched_bytes;
    FilterStats retired;
    std::uint64_t next_round = 0;
    double clock = 0;

    Impl(RuleSet r, ClusterConfig c)
        : rules(std::move(r)), cfg(std::move(c)), secret(FilterSecret::from_seed(cfg.seed)) {
        if (cfg.round_packets == 0) throw Error(ErrorCode::InvalidArgument, "round_packets must be positive");
        if (rules.empty()) throw Error(ErrorCode::InvalidArgument, "cluster needs at least one rule");
        if (!cfg.initial_loads.empty() && cfg.initial_loads.size() != rules.size())
            throw Error(ErrorCode::InvalidArgument, "initial_loads must have one entry per rule");
        std::vector<RuleLoad> loads;
        for (std::size_t i = 0; i < rules.size(); ++i)
            loads.push_back({rule_id_of(i), cfg.initial_loads.empty() ? Rational(0) : cfg.initial_loads[i]});
        auto res = greedy_solve(loads, cfg.redistribution.capacity);
        if (!res.ok()) throw InfeasibleError("no initial plan fits the rule set");
        install(std::move(res.plan));
    }

    void install(DistributionPlan plan) {
        for (const auto& e : enclaves) accumulate(e.filter->stats());
        enclaves.clear();
        for (std::size_t j = 0; j < plan.n; ++j) {
            Enclave e;
            for (std::size_t i = 0; i < rules.size(); ++i)
                if (plan.y[i][j]) e.global.push_back(i);
            e.rules = rules.subset(e.global);
            e.filter = std::make_unique<SealedFilter>(e.rules, secret, cfg.filter, cfg.sketch);
            enclaves.push_back(std::move(e));
        }
        dispatcher = std::make_unique<Dispatcher>(rules, std::move(plan), cfg.seed ^ 0x6469737061746368ULL);
        dispatched_bytes.assign(rules.size(), 0);
    }

    void accumulate(const FilterStats& s) {
        retired.packets += s.packets;
        retired.lookups += s.lookups;
        retired.hashes += s.hashes;
        retired.cache_hits += s.cache_hits;
        retired.batch_insertions += s.batch_insertions;
        retired.sketch_updates += s.sketch_updates;
    }

    Rational gbps(std::uint64_t bytes) const {
        return Rational(boost::multiprecision::cpp_int(bytes) * 8, 1'000'000'000) / cfg.redistribution.round_seconds;
    }

    RoundResult process_round(std::span<const Packet> packets, const DispatchOverride& override) {
        const auto n = enclaves.size();
        RoundResult out;
        out.round_id = next_round++;
        out.decisions.resize(packets.size());
        out.enclave_of.resize(packets.size());
        std::fill(dispatched_bytes.begin(), dispatched_bytes.end(), 0);
        for (auto& e : enclaves) e.filter->reset_round();

        std::vector<std::vector<std::size_t>> queues(n);
        std::vector<bool> unmatched_globally(packets.size(), false);
        for (std::size_t t = 0; t < packets.size(); ++t) {
            const auto& p = packets[t];
            auto rule = dispatcher->matched_rule(p.key);
            if (rule)
                dispatched_bytes[*rule] += p.size_bytes;
            else
                unmatched_globally[t] = true;
            std::size_t target = dispatcher->dispatch(p);
            if (override)
                if (auto forced = override(p, target)) target = *forced;
            if (target >= n) throw Error(ErrorCode::InvalidArgument, "dispatch to unknown enclave");
            out.enclave_of[t] = target;
            queues[target].push_back(t);
        }

        std::vector<std::vector<MisdispatchReport>> found(n);
        auto work = [&](std::size_t j) {
            auto& e = enclaves[j];
            for (auto t : queues[j]) {
                const auto& p = packets[t];
                auto d = e.filter->process(digest(p, t));
                out.decisions[t] = d;
                if (!d.matched_rule && !(j == Dispatcher::default_enclave() && unmatched_globally[t]))
                    found[j].push_back(MisdispatchReport{j, p.key, out.round_id, p.arrival_index});
            }
            // Local rule indices -> global in the recorded decisions.
            for (auto t : queues[j])
                if (out.decisions[t].matched_rule) out.decisions[t].matched_rule = e.global[*out.decisions[t].matched_rule];
        };
        if (cfg.threaded && n > 1) {
            std::vector<std::thread> workers;
            for (std::size_t j = 0; j < n; ++j)
                if (!queues[j].empty()) workers.emplace_back(work, j);
            for (auto& w : workers) w.join();  // round barrier
        } else {
            for (std::size_t j = 0; j < n; ++j) work(j);
        }

        for (auto& f : found) out.misdispatches.insert(out.misdispatches.end(), f.begin(), f.end());
        std::sort(out.misdispatches.begin(), out.misdispatches.end(),
                  [](const auto& a, const auto& b) { return a.arrival_index < b.arrival_index; });

        out.incoming = enclaves.front().filter->incoming();
        out.outgoing = enclaves.front().filter->outgoing();
        for (std::size_t j = 1; j < n; ++j) {
            out.incoming = merge(out.incoming, enclaves[j].filter->incoming());
            out.outgoing = merge(out.outgoing, enclaves[j].filter->outgoing());
        }

        const auto& cap = cfg.redistribution.capacity;
        const auto& trig = cfg.redistribution.trigger;
        Rational rule_trigger = trig * Rational(cap.memory_limit - cap.fixed_overhead) / Rational(cap.bytes_per_rule);
        std::vector<std::size_t> fired;
        for (std::size_t j = 0; j < n; ++j) {
            const auto& e = enclaves[j];
            FilterReport r;
            r.enclave_id = j;
            for (auto g : e.global) r.rule_ids.push_back(rule_id_of(g));
            r.measured_bytes = e.filter->rule_bytes();
            out.reports.push_back(std::move(r));
            if (gbps(e.filter->round_bytes()) > trig * cap.bandwidth_limit || Rational(e.global.size()) > rule_trigger)
                fired.push_back(j);
        }

        out.log.round_id = out.round_id;
        out.log.n_before = n;
        out.log.n_after = n;
        out.log.triggers = fired;
        out.log.misdispatch_count = out.misdispatches.size();
        clock += to_double(cfg.redistribution.round_seconds);
        if (cfg.auto_redistribute && !fired.empty()) {
            auto round = redistribute(out.round_id, out.reports, fired, cfg.redistribution);
            out.log.master = round.master;
            out.log.z = round.objective;
            out.log.n_after = round.new_plan.n;
            if (round.new_plan.n > n) clock += cfg.attestation_latency_s;
            install(round.new_plan);
            out.redistribution = std::move(round);
        }
        log.push_back(out.log);
        return out;
    }
};

Cluster::Cluster(RuleSet rules, ClusterConfig cfg) : impl_(std::make_unique<Impl>(std::move(rules), std::move(cfg))) {}
Cluster::~Cluster() = default;
Cluster::Cluster(Cluster&&) noexcept = default;
Cluster& Cluster::operator=(Cluster&&) noexcept = default;

RoundResult Cluster::process_round(std::span<const Packet> packets, const DispatchOverride& override) {
    return impl_->process_round(packets, override);
}

std::vector<RoundResult> Cluster::run(std::span<const Packet> trace, const DispatchOverride& override) {
    std::vector<RoundResult> rounds;
    for (std::size_t off = 0; off < trace.size(); off += impl_->cfg.round_packets)
        rounds.push_back(process_round(trace.subspan(off, std::min<std::size_t>(impl_->cfg.round_packets, trace.size() - off)),
                                       override));
    return rounds;
}

std::size_t Cluster::size() const noexcept { return impl_->enclaves.size(); }
const RuleSet& Cluster::rules() const noexcept { return impl_->rules; }
const Dispatcher& Cluster::dispatcher() const noexcept { return *impl_->dispatcher; }
const RuleSet& Cluster::enclave_rules(std::size_t enclave) const { return impl_->enclaves.at(enclave).rules; }
const FilterSecret& Cluster::secret() const noexcept { return impl_->secret; }
const std::vector<RoundLog>& Cluster::round_log() const noexcept { return impl_->log; }
double Cluster::simulated_seconds() const noexcept { return impl_->clock; }
const std::vector<std::uint64_t>& Cluster::dispatched_rule_bytes() const noexcept { return impl_->dispatched_bytes; }

FilterStats Cluster::stats() const {
    FilterStats s = impl_->retired;
    for (const auto& e : impl_->enclaves) {
        auto t = e.filter->stats();
        s.packets += t.packets;
        s.lookups += t.lookups;
        s.hashes += t.hashes;
        s.cache_hits += t.cache_hits;
        s.batch_insertions += t.batch_insertions;
        s.sketch_updates += t.sketch_updates;
    }
    return s;
}

void Cluster::install_plan(DistributionPlan plan) {
    std::vector<RuleLoad> loads;
    for (std::size_t i = 0; i < impl_->rules.size(); ++i) {
        Rational b = 0;
        for (const auto& v : plan.x.at(i)) b += v;
        loads.push_back({rule_id_of(i), b});
    }
    if (auto bad = validate_plan(plan, loads, impl_->cfg.redistribution.capacity); !bad.empty())
        throw InfeasibleError("plan rejected: " + bad.front());
    impl_->install(std::move(plan));
}

}  // namespace vif
