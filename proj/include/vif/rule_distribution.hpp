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

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vif {

using Rational = boost::multiprecision::cpp_rational;

/// Exact decimal ("12.5") or fraction ("25/2") parse.
Rational parse_rational(std::string_view text);
/// Decimal rendering rounded to `digits` places.
std::string format_decimal(const Rational& r, int digits = 6);
double to_double(const Rational& r);
std::uint64_t ceil_to_u64(const Rational& r);

struct RuleLoad {
    std::uint32_t rule_id = 0;
    Rational bandwidth;  // Gb/s
};

/**
 * Per-enclave capacity and optimizer knobs. Memory values are bytes,
 * bandwidth values Gb/s. Unset optionals take their documented defaults.
 */
struct CapacityConfig {
    std::uint64_t memory_limit = 92'000'000;  // M
    Rational bandwidth_limit = 10;            // G
    std::uint64_t bytes_per_rule = 30'000;    // u
    std::uint64_t fixed_overhead = 2'000'000;  // v
    Rational lambda = 0;
    std::optional<Rational> alpha;             // default G / M
    std::optional<Rational> delta_g;           // default G / 20
    std::optional<std::uint64_t> delta_h;      // default max(1, ceil(k / 10n))

    void validate() const;
    Rational alpha_value() const { return alpha ? *alpha : bandwidth_limit / Rational(memory_limit); }
    Rational delta_g_value() const { return delta_g ? *delta_g : bandwidth_limit / 20; }
    std::uint64_t delta_h_value(std::size_t k, std::size_t n) const;
    /// floor((M - v) / u)
    std::uint64_t max_rules_per_enclave() const { return (memory_limit - fixed_overhead) / bytes_per_rule; }
};

/// Shares x (Gb/s) and installations y, indexed [rule position][enclave].
struct DistributionPlan {
    std::size_t n = 0;
    std::vector<std::uint32_t> rule_ids;
    std::vector<std::vector<Rational>> x;
    std::vector<std::vector<bool>> y;

    static DistributionPlan empty(std::span<const RuleLoad> loads, std::size_t n);

    std::size_t rules_on(std::size_t enclave) const;
    Rational bandwidth_on(std::size_t enclave) const;
    /// C_j = u * rules_on(j) + v
    std::uint64_t memory_on(std::size_t enclave, const CapacityConfig& cfg) const;
};

struct EnclaveCount {
    std::uint64_t n_min = 0;
    std::uint64_t n = 0;
};

/// n_min = ceil(max(sum b / G, k u / (M - v))), n = ceil(max(...) * (1 + lambda)).
EnclaveCount enclave_count(std::span<const RuleLoad> loads, const CapacityConfig& cfg);

/// Constraint violations of `plan` against the instance; empty when feasible.
/// Reads only the plan, never solver state.
std::vector<std::string> validate_plan(const DistributionPlan& plan, std::span<const RuleLoad> loads,
                                       const CapacityConfig& cfg);

/// z = alpha * max_j C_j + max_j I_j. Throws InfeasibleError if the plan
/// breaks memory, bandwidth or share/installation consistency.
Rational plan_objective(const DistributionPlan& plan, const CapacityConfig& cfg);

enum class SolveStatus : std::uint8_t { Solved, Infeasible };

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    Rational objective;
    DistributionPlan plan;
    std::uint64_t work = 0;  // greedy: AssignBandwidth calls; exact: search nodes

    bool ok() const noexcept { return status == SolveStatus::Solved; }
};

/// Exhaustive search over rule->enclave installations for small instances
/// (k <= 16, n <= 4); bandwidth shares per installation pattern come from
/// the min-max splittable assignment. Returns a globally optimal plan.
SolveResult exact_solve(std::span<const RuleLoad> loads, const CapacityConfig& cfg, std::size_t n);

/// Greedy rule distribution with n taken from enclave_count().
SolveResult greedy_solve(std::span<const RuleLoad> loads, const CapacityConfig& cfg);
SolveResult greedy_solve(std::span<const RuleLoad> loads, const CapacityConfig& cfg, std::size_t n);

/// k loads drawn lognormal(0, sigma), scaled to sum exactly to `total`
/// (Gb/s), quantised to 1 kb/s.
std::vector<RuleLoad> synthetic_lognormal_loads(std::size_t k, const Rational& total, double sigma,
                                                std::uint64_t seed);

// "rule_id,bandwidth_gbps" CSV.
std::vector<RuleLoad> parse_instance_csv(std::string_view csv);
std::string format_instance_csv(std::span<const RuleLoad> loads);
/// "rule_id,enclave,xshare_gbps" rows for installed (rule, enclave) pairs.
std::string format_plan_csv(const DistributionPlan& plan);

}  // namespace vif
