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

#include "vif/flow_model.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "io.hpp"

namespace vif {

using detail::parse_uint;
using detail::trim;

Ipv4 parse_ipv4(std::string_view text) {
    text = trim(text);
    auto parts = detail::split(text, '.');
    if (parts.size() != 4) throw ParseError("bad IPv4 address '" + std::string(text) + "'");
    Ipv4 addr = 0;
    for (auto part : parts) {
        auto octet = parse_uint<unsigned>(part, "IPv4 octet");
        if (octet > 255) throw ParseError("bad IPv4 octet in '" + std::string(text) + "'");
        addr = (addr << 8) | octet;
    }
    return addr;
}

std::string format_ipv4(Ipv4 addr) {
    return std::to_string(addr >> 24) + '.' + std::to_string((addr >> 16) & 0xff) + '.' +
           std::to_string((addr >> 8) & 0xff) + '.' + std::to_string(addr & 0xff);
}

FlowKey::Bytes FlowKey::serialize() const noexcept {
    Bytes b{};
    auto put32 = [&](std::size_t at, std::uint32_t v) {
        b[at] = static_cast<std::uint8_t>(v >> 24);
        b[at + 1] = static_cast<std::uint8_t>(v >> 16);
        b[at + 2] = static_cast<std::uint8_t>(v >> 8);
        b[at + 3] = static_cast<std::uint8_t>(v);
    };
    put32(0, src_ip);
    put32(4, dst_ip);
    b[8] = static_cast<std::uint8_t>(src_port >> 8);
    b[9] = static_cast<std::uint8_t>(src_port);
    b[10] = static_cast<std::uint8_t>(dst_port >> 8);
    b[11] = static_cast<std::uint8_t>(dst_port);
    b[12] = protocol;
    return b;
}

FlowKey FlowKey::deserialize(std::span<const std::uint8_t> b) {
    if (b.size() != kWireSize) throw ParseError("flow key must be 13 bytes");
    auto get32 = [&](std::size_t at) {
        return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
               (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
    };
    FlowKey k;
    k.src_ip = get32(0);
    k.dst_ip = get32(4);
    k.src_port = static_cast<std::uint16_t>((b[8] << 8) | b[9]);
    k.dst_port = static_cast<std::uint16_t>((b[10] << 8) | b[11]);
    k.protocol = b[12];
    return k;
}

std::size_t FlowKeyHash::operator()(const FlowKey& k) const noexcept {
    std::uint64_t h = (std::uint64_t{k.src_ip} << 32) | k.dst_ip;
    std::uint64_t l = (std::uint64_t{k.src_port} << 24) | (std::uint64_t{k.dst_port} << 8) | k.protocol;
    h ^= l * 0x9e3779b97f4a7c15ULL;
    h ^= h >> 31;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 29;
    return static_cast<std::size_t>(h);
}

std::ostream& operator<<(std::ostream& os, const FlowKey& k) {
    return os << format_ipv4(k.src_ip) << ':' << k.src_port << "->" << format_ipv4(k.dst_ip) << ':'
              << k.dst_port << '/' << unsigned{k.protocol};
}

Prefix::Prefix(Ipv4 a, std::uint8_t len) : length(len) {
    if (len > 32) throw DomainError("prefix length must be 0..32");
    addr = a & mask();
}

Prefix Prefix::parse(std::string_view cidr) {
    cidr = trim(cidr);
    if (cidr == "*") return Prefix{};
    auto slash = cidr.find('/');
    if (slash == std::string_view::npos) return Prefix{parse_ipv4(cidr), 32};
    auto len = parse_uint<unsigned>(cidr.substr(slash + 1), "prefix length");
    if (len > 32) throw ParseError("prefix length out of range in '" + std::string(cidr) + "'");
    return Prefix{parse_ipv4(cidr.substr(0, slash)), static_cast<std::uint8_t>(len)};
}

std::string Prefix::to_string() const { return format_ipv4(addr) + '/' + std::to_string(length); }

FlowSpec FlowSpec::exact(const FlowKey& k) {
    return FlowSpec{Prefix{k.src_ip, 32}, Prefix{k.dst_ip, 32}, k.src_port, k.dst_port, k.protocol};
}

bool matches(const FlowSpec& spec, const FlowKey& key) noexcept {
    return spec.src.contains(key.src_ip) && spec.dst.contains(key.dst_ip) &&
           (!spec.src_port || *spec.src_port == key.src_port) &&
           (!spec.dst_port || *spec.dst_port == key.dst_port) &&
           (!spec.protocol || *spec.protocol == key.protocol);
}

std::string_view to_string(Verdict v) noexcept { return v == Verdict::Allow ? "ALLOW" : "DROP"; }

Probability::Probability(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
    if (d == 0 || n > d) throw DomainError("probability must lie in [0,1]");
    auto g = std::gcd(num, den);
    num /= g;
    den /= g;
}

Probability Probability::parse(std::string_view text) {
    text = trim(text);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto n = parse_uint<std::uint64_t>(text.substr(0, slash), "probability numerator");
        auto d = parse_uint<std::uint64_t>(text.substr(slash + 1), "probability denominator");
        if (d == 0 || n > d) throw ParseError("probability outside [0,1]: '" + std::string(text) + "'");
        return Probability{n, d};
    }
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (frac.size() > 18) throw ParseError("too many decimals in probability '" + std::string(text) + "'");
    auto w = parse_uint<std::uint64_t>(whole, "probability");
    std::uint64_t den = 1;
    std::uint64_t f = 0;
    for (char c : frac) {
        if (c < '0' || c > '9') throw ParseError("bad probability '" + std::string(text) + "'");
        den *= 10;
        f = f * 10 + static_cast<std::uint64_t>(c - '0');
    }
    if (w > 1 || (w == 1 && f != 0)) throw ParseError("probability outside [0,1]: '" + std::string(text) + "'");
    return Probability{w * den + f, den};
}

std::string Probability::to_string() const {
    std::uint64_t d = den;
    int digits = 0;
    while (d % 10 == 0) {
        d /= 10;
        ++digits;
    }
    if (d == 1 && digits == 0) return num == 0 ? "0" : "1";
    if (d != 1) return std::to_string(num) + '/' + std::to_string(den);
    std::string frac = std::to_string(num % den);
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    return std::to_string(num / den) + '.' + frac;
}

RuleSet::RuleSet(std::vector<FilterRule> rules) : rules_(std::move(rules)) {
    for (std::size_t i = 0; i < rules_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (rules_[i].spec == rules_[j].spec)
                throw Error(ErrorCode::InvalidArgument,
                            "duplicate flow spec at rules " + std::to_string(j) + " and " + std::to_string(i));
}

RuleSet RuleSet::subset(std::span<const std::size_t> indices) const {
    std::vector<std::size_t> sorted(indices.begin(), indices.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    RuleSet out;
    out.rules_.reserve(sorted.size());
    for (auto i : sorted) out.rules_.push_back(rules_.at(i));
    return out;
}

std::optional<std::size_t> first_match_index(const RuleSet& rs, const FlowKey& key) noexcept {
    const auto& rules = rs.rules();
    for (std::size_t i = 0; i < rules.size(); ++i)
        if (matches(rules[i].spec, key)) return i;
    return std::nullopt;
}

FilterRule first_match(const RuleSet& rs, const FlowKey& key) {
    if (auto i = first_match_index(rs, key)) return rs[*i];
    return FilterRule{FlowSpec::any(), RuleSet::default_action};
}

namespace {

std::string format_port(const std::optional<std::uint16_t>& p) { return p ? std::to_string(*p) : "*"; }

std::optional<std::uint16_t> parse_port(std::string_view s) {
    if (s == "*") return std::nullopt;
    auto v = parse_uint<unsigned>(s, "port");
    if (v > 65535) throw ParseError("port out of range '" + std::string(s) + "'");
    return static_cast<std::uint16_t>(v);
}

std::optional<std::uint8_t> parse_proto(std::string_view s) {
    if (s == "*") return std::nullopt;
    if (s == "tcp" || s == "TCP") return 6;
    if (s == "udp" || s == "UDP") return 17;
    if (s == "icmp" || s == "ICMP") return 1;
    auto v = parse_uint<unsigned>(s, "protocol");
    if (v > 255) throw ParseError("protocol out of range '" + std::string(s) + "'");
    return static_cast<std::uint8_t>(v);
}

RuleAction parse_action(std::string_view s) {
    if (s == "ALLOW") return Verdict::Allow;
    if (s == "DROP") return Verdict::Drop;
    if (s.size() > 2 && (s[0] == 'P' || s[0] == 'p') && s[1] == '=') return Probability::parse(s.substr(2));
    throw ParseError("bad action '" + std::string(s) + "'");
}

}  // namespace

std::string format_rule(const FilterRule& rule) {
    std::string out = rule.spec.src.to_string() + ' ' + rule.spec.dst.to_string() + ' ' +
                      format_port(rule.spec.src_port) + ' ' + format_port(rule.spec.dst_port) + ' ' +
                      (rule.spec.protocol ? std::to_string(*rule.spec.protocol) : std::string("*")) + ' ';
    if (auto* v = std::get_if<Verdict>(&rule.action))
        out += to_string(*v);
    else
        out += "P=" + std::get<Probability>(rule.action).to_string();
    return out;
}

FilterRule parse_rule(std::string_view line) {
    auto fields = detail::split_ws(line);
    if (fields.size() != 6) throw ParseError("expected 6 fields, got " + std::to_string(fields.size()));
    FilterRule r;
    r.spec.src = Prefix::parse(fields[0]);
    r.spec.dst = Prefix::parse(fields[1]);
    r.spec.src_port = parse_port(fields[2]);
    r.spec.dst_port = parse_port(fields[3]);
    r.spec.protocol = parse_proto(fields[4]);
    r.action = parse_action(fields[5]);
    return r;
}

std::string format_ruleset(const RuleSet& rs) {
    std::string out;
    for (const auto& r : rs.rules()) out += format_rule(r) + '\n';
    return out;
}

RuleSet parse_ruleset(std::string_view text) {
    std::vector<FilterRule> rules;
    std::size_t line_no = 0;
    for (auto line : detail::split(text, '\n')) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            rules.push_back(parse_rule(line));
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    try {
        return RuleSet{std::move(rules)};
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

RuleSet load_ruleset(const std::string& path) { return parse_ruleset(detail::read_file(path)); }

std::string format_trace(std::span<const Packet> trace) {
    std::ostringstream os;
    os << kTraceHeader << '\n';
    for (const auto& p : trace)
        os << p.arrival_index << ',' << format_ipv4(p.key.src_ip) << ',' << format_ipv4(p.key.dst_ip) << ','
           << p.key.src_port << ',' << p.key.dst_port << ',' << unsigned{p.key.protocol} << ',' << p.size_bytes
           << ',' << p.payload_tag << '\n';
    return os.str();
}

std::vector<Packet> parse_trace(std::string_view csv) {
    std::vector<Packet> out;
    auto lines = detail::split(csv, '\n');
    std::size_t line_no = 0;
    bool header_seen = false;
    for (auto line : lines) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kTraceHeader) throw ParseError("line " + std::to_string(line_no) + ": bad trace header");
            header_seen = true;
            continue;
        }
        auto f = detail::split(line, ',');
        try {
            if (f.size() != 8) throw ParseError("expected 8 columns");
            Packet p;
            p.arrival_index = parse_uint<std::uint64_t>(f[0], "arrival_index");
            p.key.src_ip = parse_ipv4(f[1]);
            p.key.dst_ip = parse_ipv4(f[2]);
            p.key.src_port = parse_uint<std::uint16_t>(f[3], "src_port");
            p.key.dst_port = parse_uint<std::uint16_t>(f[4], "dst_port");
            p.key.protocol = parse_uint<std::uint8_t>(f[5], "protocol");
            p.size_bytes = parse_uint<std::uint32_t>(f[6], "size_bytes");
            if (p.size_bytes == 0) throw ParseError("size_bytes must be >= 1");
            p.payload_tag = parse_uint<std::uint64_t>(f[7], "payload_tag");
            out.push_back(p);
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen) throw ParseError("empty trace file");
    return out;
}

std::vector<Packet> load_trace(const std::string& path) { return parse_trace(detail::read_file(path)); }

void save_trace(const std::string& path, std::span<const Packet> trace) {
    detail::write_file(path, format_trace(trace));
}

}  // namespace vif
