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

#include "vif/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include "vif/error.hpp"

namespace vif::crypto {

namespace {

struct MdCtx {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    ~MdCtx() { EVP_MD_CTX_free(ctx); }
};

}  // namespace

Digest256 sha256(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    // One context per thread; EVP_DigestInit_ex resets it.
    thread_local MdCtx md;
    Digest256 out{};
    unsigned len = 0;
    if (!md.ctx || EVP_DigestInit_ex(md.ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(md.ctx, a.data(), a.size()) != 1 ||
        EVP_DigestUpdate(md.ctx, b.data(), b.size()) != 1 || EVP_DigestFinal_ex(md.ctx, out.data(), &len) != 1)
        throw Error(ErrorCode::Internal, "SHA-256 failed");
    return out;
}

Digest256 sha256(std::span<const std::uint8_t> data) { return sha256(data, {}); }

Digest256 hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data) {
    Digest256 out{};
    unsigned len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len))
        throw Error(ErrorCode::Internal, "HMAC-SHA-256 failed");
    return out;
}

void random_bytes(std::span<std::uint8_t> out) {
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1)
        throw Error(ErrorCode::Internal, "RAND_bytes failed");
}

Digest256 derive(std::uint64_t seed, const std::string& label) {
    std::array<std::uint8_t, 8> s{};
    for (int i = 0; i < 8; ++i) s[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
    return sha256(s, std::span(reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

}  // namespace vif::crypto
