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

#include "vif/rule_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "io.hpp"
#include "vif/error.hpp"

namespace vif {

namespace mp = boost::multiprecision;
using BigInt = mp::cpp_int;

// ---------------------------------------------------------------------------
// Rational helpers

Rational parse_rational(std::string_view text) {
    text = detail::trim(text);
    if (text.empty()) throw ParseError("empty number");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto n = detail::parse_uint<std::uint64_t>(text.substr(0, slash), "numerator");
        auto d = detail::parse_uint<std::uint64_t>(text.substr(slash + 1), "denominator");
        if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        return Rational(BigInt(n), BigInt(d));
    }
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    BigInt num = 0, den = 1;
    if (whole.empty() && frac.empty()) throw ParseError("bad number '" + std::string(text) + "'");
    for (char c : whole) {
        if (c < '0' || c > '9') throw ParseError("bad number '" + std::string(text) + "'");
        num = num * 10 + (c - '0');
    }
    for (char c : frac) {
        if (c < '0' || c > '9') throw ParseError("bad number '" + std::string(text) + "'");
        num = num * 10 + (c - '0');
        den *= 10;
    }
    return Rational(num, den);
}

std::string format_decimal(const Rational& r, int digits) {
    BigInt pow10 = mp::pow(BigInt(10), static_cast<unsigned>(digits));
    bool neg = r < 0;
    Rational a = neg ? Rational(-r) : r;
    BigInt scaled = (mp::numerator(a) * pow10 * 2 + mp::denominator(a)) / (mp::denominator(a) * 2);
    std::string s = scaled.str();
    if (digits > 0) {
        if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
        s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    }
    return (neg && scaled != 0 ? "-" : "") + s;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

namespace {

BigInt ceil_div(const BigInt& a, const BigInt& b) { return (a + b - 1) / b; }

BigInt ceil_rational(const Rational& r) {
    if (r <= 0) return BigInt(0);
    return ceil_div(mp::numerator(r), mp::denominator(r));
}

}  // namespace

std::uint64_t ceil_to_u64(const Rational& r) {
    auto c = ceil_rational(r);
    if (c > std::numeric_limits<std::uint64_t>::max()) throw Error(ErrorCode::Overflow, "value exceeds 64 bits");
    return c.convert_to<std::uint64_t>();
}

// ---------------------------------------------------------------------------
// Configuration and plans

void CapacityConfig::validate() const {
    if (bytes_per_rule == 0) throw DomainError("bytes per rule (u) must be positive");
    if (memory_limit <= fixed_overhead) throw DomainError("memory limit M must exceed fixed overhead v");
    if (bandwidth_limit <= 0) throw DomainError("bandwidth limit G must be positive");
    if (lambda < 0) throw DomainError("lambda must be non-negative");
    if (alpha && *alpha <= 0) throw DomainError("alpha must be positive");
    if (delta_g && *delta_g <= 0) throw DomainError("delta_g must be positive");
    if (delta_h && *delta_h == 0) throw DomainError("delta_h must be positive");
}

std::uint64_t CapacityConfig::delta_h_value(std::size_t k, std::size_t n) const {
    if (delta_h) return *delta_h;
    return std::max<std::uint64_t>(1, (k + 10 * n - 1) / (10 * n));
}

DistributionPlan DistributionPlan::empty(std::span<const RuleLoad> loads, std::size_t n) {
    DistributionPlan p;
    p.n = n;
    for (const auto& l : loads) p.rule_ids.push_back(l.rule_id);
    p.x.assign(loads.size(), std::vector<Rational>(n, Rational(0)));
    p.y.assign(loads.size(), std::vector<bool>(n, false));
    return p;
}

std::size_t DistributionPlan::rules_on(std::size_t j) const {
    std::size_t c = 0;
    for (const auto& row : y) c += row.at(j) ? 1 : 0;
    return c;
}

Rational DistributionPlan::bandwidth_on(std::size_t j) const {
    Rational s = 0;
    for (const auto& row : x) s += row.at(j);
    return s;
}

std::uint64_t DistributionPlan::memory_on(std::size_t j, const CapacityConfig& cfg) const {
    return cfg.bytes_per_rule * rules_on(j) + cfg.fixed_overhead;
}

EnclaveCount enclave_count(std::span<const RuleLoad> loads, const CapacityConfig& cfg) {
    cfg.validate();
    if (loads.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one rule");
    Rational total = 0;
    for (const auto& l : loads) {
        if (l.bandwidth < 0) throw DomainError("negative rule bandwidth");
        total += l.bandwidth;
    }
    Rational by_bandwidth = total / cfg.bandwidth_limit;
    Rational by_memory = Rational(BigInt(loads.size()) * cfg.bytes_per_rule) /
                         Rational(BigInt(cfg.memory_limit - cfg.fixed_overhead));
    Rational m = std::max(by_bandwidth, by_memory);
    return EnclaveCount{ceil_to_u64(m), ceil_to_u64(m * (1 + cfg.lambda))};
}

std::vector<std::string> validate_plan(const DistributionPlan& plan, std::span<const RuleLoad> loads,
                                       const CapacityConfig& cfg) {
    std::vector<std::string> bad;
    auto k = loads.size();
    if (plan.x.size() != k || plan.y.size() != k || plan.rule_ids.size() != k) {
        bad.push_back("plan dimensions do not match the instance");
        return bad;
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (plan.x[i].size() != plan.n || plan.y[i].size() != plan.n) {
            bad.push_back("row " + std::to_string(i) + " has wrong width");
            return bad;
        }
        if (plan.rule_ids[i] != loads[i].rule_id) bad.push_back("rule id mismatch at row " + std::to_string(i));
        Rational sum = 0;
        bool installed = false;
        for (std::size_t j = 0; j < plan.n; ++j) {
            if (plan.x[i][j] < 0) bad.push_back("negative share x[" + std::to_string(i) + "][" + std::to_string(j) + "]");
            if (plan.x[i][j] > 0 && !plan.y[i][j])
                bad.push_back("share without installation at rule " + std::to_string(plan.rule_ids[i]) + ", enclave " +
                              std::to_string(j));
            installed = installed || plan.y[i][j];
            sum += plan.x[i][j];
        }
        if (sum != loads[i].bandwidth)
            bad.push_back("shares of rule " + std::to_string(plan.rule_ids[i]) + " sum to " + format_decimal(sum) +
                          ", expected " + format_decimal(loads[i].bandwidth));
        if (!installed) bad.push_back("rule " + std::to_string(plan.rule_ids[i]) + " is not installed anywhere");
    }
    for (std::size_t j = 0; j < plan.n; ++j) {
        std::uint64_t rules = 0;
        Rational bw = 0;
        for (std::size_t i = 0; i < k; ++i) {
            rules += plan.y[i][j] ? 1 : 0;
            bw += plan.x[i][j];
        }
        if (cfg.bytes_per_rule * rules + cfg.fixed_overhead > cfg.memory_limit)
            bad.push_back("enclave " + std::to_string(j) + " exceeds memory with " + std::to_string(rules) + " rules");
        if (bw > cfg.bandwidth_limit)
            bad.push_back("enclave " + std::to_string(j) + " exceeds bandwidth: " + format_decimal(bw));
    }
    return bad;
}

Rational plan_objective(const DistributionPlan& plan, const CapacityConfig& cfg) {
    if (plan.n == 0) throw InfeasibleError("plan has no enclaves");
    std::uint64_t max_c = 0;
    Rational max_i = 0;
    for (std::size_t j = 0; j < plan.n; ++j) {
        std::uint64_t rules = 0;
        Rational bw = 0;
        for (std::size_t i = 0; i < plan.x.size(); ++i) {
            if (plan.x[i][j] < 0 || (plan.x[i][j] > 0 && !plan.y[i][j]))
                throw InfeasibleError("share/installation mismatch");
            rules += plan.y[i][j] ? 1 : 0;
            bw += plan.x[i][j];
        }
        auto c = cfg.bytes_per_rule * rules + cfg.fixed_overhead;
        if (c > cfg.memory_limit) throw InfeasibleError("enclave " + std::to_string(j) + " over memory");
        if (bw > cfg.bandwidth_limit) throw InfeasibleError("enclave " + std::to_string(j) + " over bandwidth");
        max_c = std::max(max_c, c);
        max_i = std::max(max_i, bw);
    }
    return cfg.alpha_value() * Rational(BigInt(max_c)) + max_i;
}

// ---------------------------------------------------------------------------
// Integer scaling shared by both solvers: every bandwidth becomes an
// int64 multiple of 1/scale Gb/s.

namespace {

constexpr std::int64_t kScaledLimit = std::int64_t{1} << 56;

struct ScaledInstance {
    BigInt scale;
    std::vector<std::int64_t> b;
    std::int64_t total = 0;
    std::int64_t capacity = 0;  // G
    std::int64_t delta_g = 0;

    Rational to_rational(std::int64_t v) const { return Rational(BigInt(v), scale); }
};

std::int64_t to_scaled(const Rational& r, const BigInt& scale) {
    BigInt v = mp::numerator(r) * scale;
    if (v % mp::denominator(r) != 0) throw Error(ErrorCode::Internal, "scale does not clear denominator");
    v /= mp::denominator(r);
    if (v > kScaledLimit || v < -kScaledLimit)
        throw Error(ErrorCode::Overflow, "bandwidth values too large or too finely divided for exact solving");
    return v.convert_to<std::int64_t>();
}

ScaledInstance scale_instance(std::span<const RuleLoad> loads, const CapacityConfig& cfg, std::size_t n) {
    ScaledInstance s;
    s.scale = BigInt(n);
    auto fold = [&](const Rational& r) { s.scale = mp::lcm(s.scale, mp::denominator(r)); };
    for (const auto& l : loads) {
        if (l.bandwidth < 0) throw DomainError("negative rule bandwidth");
        fold(l.bandwidth);
    }
    fold(cfg.bandwidth_limit);
    fold(cfg.delta_g_value());
    Rational total = 0;
    for (const auto& l : loads) {
        s.b.push_back(to_scaled(l.bandwidth, s.scale));
        total += l.bandwidth;
    }
    s.total = to_scaled(total, s.scale);
    s.capacity = to_scaled(cfg.bandwidth_limit, s.scale);
    s.delta_g = to_scaled(cfg.delta_g_value(), s.scale);
    return s;
}

// ---------------------------------------------------------------------------
// Greedy

class GreedySolver {
public:
    GreedySolver(std::span<const RuleLoad> loads, const CapacityConfig& cfg, std::size_t n)
        : loads_(loads), cfg_(cfg), n_(n), inst_(scale_instance(loads, cfg, n)) {}

    SolveResult solve() {
        SolveResult res;
        const auto k = loads_.size();
        const std::int64_t g0 = inst_.total / static_cast<std::int64_t>(n_);  // exact: scale is a multiple of n
        const Rational h_max{BigInt(cfg_.memory_limit - cfg_.fixed_overhead), BigInt(cfg_.bytes_per_rule)};
        const std::uint64_t dh = cfg_.delta_h_value(k, n_);
        Rational h{BigInt(k), BigInt(n_)};
        std::int64_t g = g0;
        res.status = SolveStatus::Infeasible;
        if (g > inst_.capacity || h > h_max) return res;
        // The last step in each direction is clipped to the bound, so g = G
        // and h = (M - v) / u are always tried.
        while (true) {
            ++res.work;
            if (assign_bandwidth(h, g)) {
                res.status = SolveStatus::Solved;
                res.plan = to_plan();
                res.objective = plan_objective(res.plan, cfg_);
                return res;
            }
            if (g < inst_.capacity) {
                g = std::min(g + inst_.delta_g, inst_.capacity);
            } else if (h < h_max) {
                h = std::min(h + Rational(dh), h_max);
                g = g0;
            } else {
                return res;
            }
        }
    }

private:
    struct Entry {
        std::size_t rule;
        std::size_t enclave;
        std::int64_t amount;
    };
    // Pending bandwidth keyed by (amount, rule_id, position).
    using Key = std::tuple<std::int64_t, std::uint32_t, std::size_t>;

    bool assign_bandwidth(const Rational& h, std::int64_t g) {
        assigned_.clear();
        std::set<Key> pending;
        for (std::size_t i = 0; i < loads_.size(); ++i) pending.emplace(inst_.b[i], loads_[i].rule_id, i);

        auto take = [&](std::set<Key>::iterator it, std::size_t j, std::int64_t amount) {
            auto [b, id, pos] = *it;
            pending.erase(it);
            assigned_.push_back({pos, j, amount});
            if (amount < b) pending.emplace(b - amount, id, pos);
        };

        const std::uint64_t cap = cfg_.max_rules_per_enclave();
        // Whole rules while c + 1 <= h, then one closing rule (whole or split)
        // as long as memory still allows it.
        const std::uint64_t fill_budget = static_cast<std::uint64_t>(mp::numerator(h) / mp::denominator(h));
        for (std::size_t j = 0; j < n_ && !pending.empty(); ++j) {
            std::int64_t room = g;
            std::uint64_t count = 0;
            while (!pending.empty() && count <= fill_budget) {
                auto smallest = pending.begin();
                auto b = std::get<0>(*smallest);
                if ((b < room || b == 0) && count + 1 <= fill_budget && count + 1 <= cap) {
                    take(smallest, j, b);
                    ++count;
                    room -= b;
                    continue;
                }
                if (room == 0 || count + 1 > cap) break;
                // Largest pending rule, lowest rule id among equals.
                auto largest_b = std::get<0>(*pending.rbegin());
                auto largest = pending.lower_bound(Key{largest_b, 0, 0});
                take(largest, j, std::min(largest_b, room));
                ++count;
                break;
            }
        }
        return pending.empty();
    }

    DistributionPlan to_plan() const {
        auto plan = DistributionPlan::empty(loads_, n_);
        for (const auto& e : assigned_) {
            plan.x[e.rule][e.enclave] += inst_.to_rational(e.amount);
            plan.y[e.rule][e.enclave] = true;
        }
        return plan;
    }

    std::span<const RuleLoad> loads_;
    const CapacityConfig& cfg_;
    std::size_t n_;
    ScaledInstance inst_;
    std::vector<Entry> assigned_;
};

// ---------------------------------------------------------------------------
// Exact branch and bound.
//
// Some optimal plan has a forest as its rule/enclave support graph
// (shifting flow around a cycle keeps every load and sum fixed until one
// edge empties), so at most n-1 extra installations beyond one per rule
// are ever needed. For a fixed installation pattern the least possible
// maximum enclave load is max over enclave sets J of W(J)/|J|, where W(J)
// is the bandwidth of rules installed only inside J.

class ExactSolver {
public:
    ExactSolver(std::span<const RuleLoad> loads, const CapacityConfig& cfg, std::size_t n)
        : loads_(loads), cfg_(cfg), n_(n), inst_(scale_instance(loads, cfg, n)) {
        masks_ = (1u << n_);
        cap_rules_ = cfg.max_rules_per_enclave();
        inv_scale_ = 1.0 / inst_.scale.convert_to<double>();
        order_.resize(loads.size());
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            if (inst_.b[a] != inst_.b[b]) return inst_.b[a] > inst_.b[b];
            return loads[a].rule_id < loads[b].rule_id;
        });
        for (unsigned m = 1; m < masks_; ++m) popcount_[m] = static_cast<unsigned>(__builtin_popcount(m));
    }

    /// Objective of any known feasible plan; only tightens pruning.
    void set_upper_bound(const Rational& z) { upper_ = z; }

    SolveResult solve() {
        SolveResult res;
        const auto k = loads_.size();
        if (cap_rules_ == 0 || inst_.total > inst_.capacity * static_cast<std::int64_t>(n_) ||
            cap_rules_ * n_ < k) {
            res.status = SolveStatus::Infeasible;
            return res;
        }
        const Rational balanced(BigInt(inst_.total), inst_.scale * n_);
        // z = alpha (u C + v) + T: for every rule cap C find the least peak
        // load T, stopping once the cap alone rules out an improvement.
        for (std::uint64_t c = (k + n_ - 1) / n_; c <= std::min<std::uint64_t>(cap_rules_, k); ++c) {
            Rational memory_term = cfg_.alpha_value() * Rational(BigInt(cfg_.bytes_per_rule * c + cfg_.fixed_overhead));
            auto limit = best_ ? std::optional<Rational>(best_->z) : upper_;
            if (limit && memory_term + balanced > *limit) break;
            rule_cap_ = c;
            load_limit_ = limit ? to_double(*limit - memory_term) : std::numeric_limits<double>::infinity();
            balanced_reached_ = false;
            subset_.assign(k, 0);
            weight_.fill(0);
            count_.fill(0);
            search(0, 0, 0);
        }
        res.work = nodes_;
        if (!best_) {
            res.status = SolveStatus::Infeasible;
            return res;
        }
        res.status = SolveStatus::Solved;
        res.plan = build_plan();
        res.objective = plan_objective(res.plan, cfg_);
        return res;
    }

private:
    struct Best {
        std::vector<unsigned> subset;
        std::int64_t weight;  // T = weight / (divisor * scale)
        unsigned divisor;
        Rational z;
    };

    // Largest W(J)/|J| over all J; returned as (W, |J|).
    std::pair<std::int64_t, unsigned> peak_load() const {
        std::int64_t w = 0;
        unsigned d = 1;
        for (unsigned m = 1; m < masks_; ++m) {
            if (static_cast<__int128>(weight_[m]) * d > static_cast<__int128>(w) * popcount_[m]) {
                w = weight_[m];
                d = popcount_[m];
            }
        }
        return {w, d};
    }

    // Loose by a relative 1e-9 so floating error never cuts an optimum.
    bool prune(std::size_t depth) const {
        auto [w, d] = peak_load();
        if (static_cast<double>(w) / d * inv_scale_ > load_limit_ * (1 + 1e-9) + 1e-12) return true;
        std::uint64_t free_slots = 0;
        for (unsigned j = 0; j < n_; ++j) free_slots += rule_cap_ - count_[j];
        return free_slots < order_.size() - depth;
    }

    void apply(std::size_t rule, unsigned mask, int sign) {
        auto b = inst_.b[rule] * sign;
        for (unsigned m = 1; m < masks_; ++m)
            if ((m & mask) == mask) weight_[m] += b;
        for (unsigned j = 0; j < n_; ++j)
            if (mask & (1u << j)) count_[j] += static_cast<std::uint64_t>(sign);
    }

    bool within_capacity(unsigned mask) const {
        for (unsigned j = 0; j < n_; ++j)
            if ((mask & (1u << j)) && count_[j] > rule_cap_) return false;
        for (unsigned m = 1; m < masks_; ++m)
            if ((m & mask) == mask && weight_[m] > inst_.capacity * static_cast<std::int64_t>(popcount_[m]))
                return false;
        return true;
    }

    void search(std::size_t depth, unsigned extras, unsigned used) {
        ++nodes_;
        if (balanced_reached_) return;
        if (depth == order_.size()) {
            record();
            return;
        }
        if (prune(depth)) return;

        std::size_t rule = order_[depth];
        std::vector<unsigned> options;
        // Single installations, lightest enclave first; at most one fresh enclave.
        std::vector<unsigned> singles;
        for (unsigned j = 0; j < std::min<unsigned>(used + 1, static_cast<unsigned>(n_)); ++j) singles.push_back(j);
        std::stable_sort(singles.begin(), singles.end(),
                         [&](unsigned a, unsigned b) { return weight_[1u << a] < weight_[1u << b]; });
        for (auto j : singles) options.push_back(1u << j);
        // Split installations, fresh enclaves only as a contiguous block after `used`.
        for (unsigned m = 1; m < masks_; ++m) {
            unsigned extra = popcount_[m] - 1;
            if (extra == 0 || extras + extra > n_ - 1) continue;
            unsigned fresh = m >> used;
            if ((fresh & (fresh + 1)) != 0) continue;
            options.push_back(m);
        }
        for (auto mask : options) {
            apply(rule, mask, +1);
            if (within_capacity(mask)) {
                subset_[rule] = mask;
                unsigned top = 32 - static_cast<unsigned>(__builtin_clz(mask));
                search(depth + 1, extras + popcount_[mask] - 1, std::max(used, top));
            }
            apply(rule, mask, -1);
            if (balanced_reached_) return;
        }
    }

    void record() {
        auto [w, d] = peak_load();
        std::uint64_t max_count = *std::max_element(count_.begin(), count_.begin() + static_cast<long>(n_));
        Rational z = cfg_.alpha_value() * Rational(BigInt(cfg_.bytes_per_rule * max_count + cfg_.fixed_overhead)) +
                     Rational(BigInt(w), inst_.scale * d);
        if (best_ && z >= best_->z) return;
        best_ = Best{subset_, w, d, z};
        auto memory_term =
            cfg_.alpha_value() * Rational(BigInt(cfg_.bytes_per_rule * rule_cap_ + cfg_.fixed_overhead));
        load_limit_ = std::min(load_limit_, to_double(z - memory_term));
        // Nothing beats a perfectly balanced load under this cap.
        if (static_cast<__int128>(w) * n_ <= static_cast<__int128>(inst_.total) * d) balanced_reached_ = true;
    }

    // Shares for the best pattern: max-flow with every enclave capped at T.
    DistributionPlan build_plan() const {
        const auto k = loads_.size();
        const auto& best = *best_;
        // Multiply through by the divisor so T becomes the integer `weight`.
        const std::size_t src = 0, sink = k + n_ + 1;
        const std::size_t nodes = k + n_ + 2;
        std::vector<std::vector<std::int64_t>> cap(nodes, std::vector<std::int64_t>(nodes, 0));
        for (std::size_t i = 0; i < k; ++i) {
            cap[src][1 + i] = inst_.b[i] * best.divisor;
            for (unsigned j = 0; j < n_; ++j)
                if (best.subset[i] & (1u << j)) cap[1 + i][1 + k + j] = inst_.total * static_cast<std::int64_t>(best.divisor);
        }
        for (unsigned j = 0; j < n_; ++j) cap[1 + k + j][sink] = best.weight;
        auto residual = cap;
        for (;;) {
            std::vector<std::ptrdiff_t> parent(nodes, -1);
            parent[src] = static_cast<std::ptrdiff_t>(src);
            std::vector<std::size_t> queue{src};
            for (std::size_t qi = 0; qi < queue.size() && parent[sink] < 0; ++qi) {
                auto u = queue[qi];
                for (std::size_t v = 0; v < nodes; ++v)
                    if (parent[v] < 0 && residual[u][v] > 0) {
                        parent[v] = static_cast<std::ptrdiff_t>(u);
                        queue.push_back(v);
                    }
            }
            if (parent[sink] < 0) break;
            std::int64_t push = std::numeric_limits<std::int64_t>::max();
            for (auto v = sink; v != src; v = static_cast<std::size_t>(parent[v]))
                push = std::min(push, residual[static_cast<std::size_t>(parent[v])][v]);
            for (auto v = sink; v != src; v = static_cast<std::size_t>(parent[v])) {
                auto u = static_cast<std::size_t>(parent[v]);
                residual[u][v] -= push;
                residual[v][u] += push;
            }
        }
        auto plan = DistributionPlan::empty(loads_, n_);
        BigInt denom = inst_.scale * best.divisor;
        for (std::size_t i = 0; i < k; ++i) {
            std::int64_t sent = 0;
            for (unsigned j = 0; j < n_; ++j) {
                if (!(best.subset[i] & (1u << j))) continue;
                plan.y[i][j] = true;
                auto flow = cap[1 + i][1 + k + j] - residual[1 + i][1 + k + j];
                plan.x[i][j] = Rational(BigInt(flow), denom);
                sent += flow;
            }
            if (sent != inst_.b[i] * best.divisor) throw Error(ErrorCode::Internal, "exact share construction failed");
        }
        return plan;
    }

    std::span<const RuleLoad> loads_;
    const CapacityConfig& cfg_;
    std::size_t n_;
    ScaledInstance inst_;
    unsigned masks_ = 0;
    double inv_scale_ = 0;
    std::optional<Rational> upper_;
    std::uint64_t rule_cap_ = 0;
    double load_limit_ = 0;
    bool balanced_reached_ = false;
    std::uint64_t cap_rules_ = 0;
    std::vector<std::size_t> order_;
    std::array<unsigned, 16> popcount_{};
    std::array<std::int64_t, 16> weight_{};
    std::array<std::uint64_t, 4> count_{};
    std::vector<unsigned> subset_;
    std::optional<Best> best_;
    std::uint64_t nodes_ = 0;
};

}  // namespace

SolveResult exact_solve(std::span<const RuleLoad> loads, const CapacityConfig& cfg, std::size_t n) {
    cfg.validate();
    if (loads.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one rule");
    if (loads.size() > 16 || n == 0 || n > 4)
        throw Error(ErrorCode::InvalidArgument, "exact solver supports k <= 16 and 1 <= n <= 4");
    ExactSolver solver(loads, cfg, n);
    if (auto warm = GreedySolver(loads, cfg, n).solve(); warm.ok()) solver.set_upper_bound(warm.objective);
    return solver.solve();
}

SolveResult greedy_solve(std::span<const RuleLoad> loads, const CapacityConfig& cfg, std::size_t n) {
    cfg.validate();
    if (loads.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one rule");
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one enclave");
    return GreedySolver(loads, cfg, n).solve();
}

SolveResult greedy_solve(std::span<const RuleLoad> loads, const CapacityConfig& cfg) {
    auto count = enclave_count(loads, cfg);
    return greedy_solve(loads, cfg, static_cast<std::size_t>(count.n));
}

// ---------------------------------------------------------------------------
// Instances

std::vector<RuleLoad> synthetic_lognormal_loads(std::size_t k, const Rational& total, double sigma,
                                                std::uint64_t seed) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (total < 0 || sigma < 0) throw DomainError("total and sigma must be non-negative");
    Rational units_r = total * 1'000'000;
    if (mp::denominator(units_r) != 1) throw DomainError("total must be a multiple of 1 kb/s");
    auto units = mp::numerator(units_r);
    std::mt19937_64 rng(seed);
    auto unit_interval = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    std::vector<double> w(k);
    for (auto& v : w) {
        double z = std::sqrt(-2.0 * std::log(unit_interval())) * std::cos(2.0 * M_PI * unit_interval());
        v = std::exp(sigma * z);
    }
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    double total_units = units.convert_to<double>();
    std::vector<BigInt> share(k);
    std::vector<std::pair<double, std::size_t>> frac(k);
    BigInt assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double exact = total_units * w[i] / sum;
        double fl = std::floor(exact);
        share[i] = BigInt(static_cast<std::uint64_t>(fl));
        frac[i] = {exact - fl, i};
        assigned += share[i];
    }
    // Clamp rounding drift, then hand out the remainder by largest fraction.
    while (assigned > units) {
        for (std::size_t i = 0; i < k && assigned > units; ++i)
            if (share[i] > 0) {
                share[i] -= 1;
                assigned -= 1;
            }
    }
    std::stable_sort(frac.begin(), frac.end(), [](auto a, auto b) { return a.first > b.first; });
    for (std::size_t t = 0; assigned < units; t = (t + 1) % k) {
        share[frac[t].second] += 1;
        assigned += 1;
    }
    std::vector<RuleLoad> out(k);
    for (std::size_t i = 0; i < k; ++i)
        out[i] = RuleLoad{static_cast<std::uint32_t>(i + 1), Rational(share[i], BigInt(1'000'000))};
    return out;
}

std::vector<RuleLoad> parse_instance_csv(std::string_view csv) {
    std::vector<RuleLoad> out;
    std::set<std::uint32_t> ids;
    std::size_t line_no = 0;
    bool header = false;
    for (auto line : detail::split(csv, '\n')) {
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            if (line != "rule_id,bandwidth_gbps") throw ParseError("line " + std::to_string(line_no) + ": bad header");
            header = true;
            continue;
        }
        try {
            auto f = detail::split(line, ',');
            if (f.size() != 2) throw ParseError("expected 2 columns");
            RuleLoad l{detail::parse_uint<std::uint32_t>(f[0], "rule_id"), parse_rational(f[1])};
            if (!ids.insert(l.rule_id).second) throw ParseError("duplicate rule_id " + std::to_string(l.rule_id));
            out.push_back(std::move(l));
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header) throw ParseError("empty instance file");
    return out;
}

std::string format_instance_csv(std::span<const RuleLoad> loads) {
    std::ostringstream os;
    os << "rule_id,bandwidth_gbps\n";
    for (const auto& l : loads) os << l.rule_id << ',' << format_decimal(l.bandwidth, 6) << '\n';
    return os.str();
}

std::string format_plan_csv(const DistributionPlan& plan) {
    std::ostringstream os;
    os << "rule_id,enclave,xshare_gbps\n";
    for (std::size_t i = 0; i < plan.x.size(); ++i)
        for (std::size_t j = 0; j < plan.n; ++j)
            if (plan.y[i][j]) os << plan.rule_ids[i] << ',' << j << ',' << format_decimal(plan.x[i][j], 9) << '\n';
    return os.str();
}

}  // namespace vif
