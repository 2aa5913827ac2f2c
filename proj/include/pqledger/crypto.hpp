// Copyright 2026 The PQLedger Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
///////////////////////////////////////////////////////////////////////////////
//
// Signature-scheme registry and hashing services.
//
// Schemes are described by size profiles (public-key and signature byte
// lengths) and executed by pluggable backends behind a common
// keygen/sign/verify interface:
//
//   * MockBackend — deterministic, size-faithful stand-in for any scheme.
//     secret key = 32-byte seed, pk = SHAKE256(seed || "pk"), signature =
//     SHAKE256(pk || digest). Tamper-detecting but NOT cryptographically
//     secure; it exists so protocol structure and size-driven costs can be
//     studied with byte-exact key/signature lengths.
//   * Ed25519Backend — real signatures via OpenSSL for profiles declaring
//     pk 32 / sig 64. Demonstrates the adapter slot; a liboqs-style binding
//     would plug in the same way.
//
// The bundled profiles pin the published public-key/signature sizes of the
// algorithms under study; per-scheme synthetic CPU costs (busy-wait
// microseconds) can be layered on for latency experiments.

#ifndef PQLEDGER_CRYPTO_HPP
#define PQLEDGER_CRYPTO_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <openssl/evp.h>

#include "pqledger/bytes.hpp"
#include "pqledger/config.hpp"
#include "pqledger/errors.hpp"
#include "pqledger/metrics.hpp"

namespace pqledger {

// ============================================================================
// Hashing
// ============================================================================

struct HashSpec {
    enum class Alg { Sha256, Sha384 };

    Alg algorithm = Alg::Sha384;

    static constexpr HashSpec sha256() { return HashSpec{Alg::Sha256}; }
    static constexpr HashSpec sha384() { return HashSpec{Alg::Sha384}; }

    std::size_t output_bits() const { return algorithm == Alg::Sha256 ? 256 : 384; }
    std::size_t digest_size() const { return output_bits() / 8; }
    const char* name() const { return algorithm == Alg::Sha256 ? "sha-256" : "sha-384"; }

    bool operator==(const HashSpec&) const = default;
};

// SHA-2 digest, bit-exact against the published test vectors. Instrumented
// for the benchmark timing buckets.
inline Bytes hash(HashSpec spec, ByteView message) {
    auto start = metrics::Clock::now();
    const EVP_MD* md =
        spec.algorithm == HashSpec::Alg::Sha256 ? EVP_sha256() : EVP_sha384();
    Bytes digest(spec.digest_size());
    unsigned int out_len = 0;
    if (EVP_Digest(message.data(), message.size(), digest.data(), &out_len, md,
                   nullptr) != 1 ||
        out_len != digest.size())
        fail(Errc::IoFailure, "digest computation failed");
    metrics::add_hash(metrics::elapsed_ns(start), message.size());
    return digest;
}

inline Bytes hash(HashSpec spec, std::string_view message) {
    return hash(spec, view(message));
}

// SHAKE256 with arbitrary output length; the expansion primitive behind the
// mock schemes.
inline Bytes xof_expand(ByteView input, std::size_t out_len) {
    Bytes out(out_len);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    bool ok = ctx != nullptr &&
              EVP_DigestInit_ex(ctx, EVP_shake256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx, input.data(), input.size()) == 1 &&
              EVP_DigestFinalXOF(ctx, out.data(), out.size()) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) fail(Errc::IoFailure, "xof expansion failed");
    return out;
}

// ============================================================================
// Scheme descriptions
// ============================================================================

enum class SchemeKind { Classical, PostQuantum };

inline const char* kind_name(SchemeKind k) {
    return k == SchemeKind::Classical ? "classical" : "post-quantum";
}

struct SchemeId {
    std::string name;
    SchemeKind kind = SchemeKind::Classical;

    bool operator==(const SchemeId&) const = default;
};

struct SchemeProfile {
    SchemeId id;
    std::size_t pk_size = 0;
    std::size_t sig_size = 0;
    std::uint32_t synthetic_sign_cost_us = 0;
    std::uint32_t synthetic_verify_cost_us = 0;
};

struct KeyPair {
    SchemeId scheme;
    Bytes public_key;
    Bytes secret_key;
};

inline constexpr std::size_t kSeedSize = 32;

// ============================================================================
// Backends (the adapter slot)
// ============================================================================

class SignatureBackend {
public:
    virtual ~SignatureBackend() = default;

    virtual std::string_view backend_name() const = 0;

    // Called at registration; rejects profiles the backend cannot honor.
    virtual void check_profile(const SchemeProfile& profile) const = 0;

    virtual KeyPair keygen(const SchemeProfile& profile, ByteView seed) const = 0;
    virtual Bytes sign(const SchemeProfile& profile, ByteView secret_key,
                       ByteView digest) const = 0;
    // Never throws on malformed input: any mismatch is a reject.
    virtual bool verify(const SchemeProfile& profile, ByteView public_key,
                        ByteView digest, ByteView signature) const = 0;
};

class MockBackend final : public SignatureBackend {
public:
    std::string_view backend_name() const override { return "mock"; }

    void check_profile(const SchemeProfile&) const override {}

    KeyPair keygen(const SchemeProfile& profile, ByteView seed) const override {
        if (seed.size() != kSeedSize)
            fail(Errc::KeyMismatch, "mock keygen needs a 32-byte seed");
        KeyPair kp;
        kp.scheme = profile.id;
        kp.secret_key = Bytes(seed.begin(), seed.end());
        kp.public_key = derive_pk(profile, seed);
        return kp;
    }

    Bytes sign(const SchemeProfile& profile, ByteView secret_key,
               ByteView digest) const override {
        if (secret_key.size() != kSeedSize)
            fail(Errc::KeyMismatch, "mock secret key must be a 32-byte seed");
        Bytes pk = derive_pk(profile, secret_key);
        return xof_expand(concat(pk, digest), profile.sig_size);
    }

    bool verify(const SchemeProfile& profile, ByteView public_key, ByteView digest,
                ByteView signature) const override {
        if (signature.size() != profile.sig_size) return false;
        Bytes expected = xof_expand(concat(public_key, digest), profile.sig_size);
        return std::equal(expected.begin(), expected.end(), signature.begin());
    }

private:
    static Bytes derive_pk(const SchemeProfile& profile, ByteView seed) {
        return xof_expand(concat(seed, std::string_view("pk")), profile.pk_size);
    }
};

// Real Ed25519 (RFC 8032) through OpenSSL. Keygen and signing are
// deterministic, and sizes are fixed at pk 32 / sig 64, so the backend keeps
// every size and determinism contract the mock keeps.
class Ed25519Backend final : public SignatureBackend {
public:
    std::string_view backend_name() const override { return "ed25519"; }

    void check_profile(const SchemeProfile& profile) const override {
        if (profile.pk_size != 32 || profile.sig_size != 64)
            fail(Errc::ConfigInvalid,
                 "ed25519 backend requires pk_size 32 and sig_size 64, got pk " +
                     std::to_string(profile.pk_size) + " / sig " +
                     std::to_string(profile.sig_size));
    }

    KeyPair keygen(const SchemeProfile& profile, ByteView seed) const override {
        if (seed.size() != kSeedSize)
            fail(Errc::KeyMismatch, "ed25519 keygen needs a 32-byte seed");
        EVP_PKEY* key = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                                     seed.data(), seed.size());
        if (!key) fail(Errc::KeyMismatch, "ed25519 key construction failed");
        KeyPair kp;
        kp.scheme = profile.id;
        kp.secret_key = Bytes(seed.begin(), seed.end());
        kp.public_key.resize(32);
        std::size_t pk_len = kp.public_key.size();
        int rc = EVP_PKEY_get_raw_public_key(key, kp.public_key.data(), &pk_len);
        EVP_PKEY_free(key);
        if (rc != 1 || pk_len != 32)
            fail(Errc::KeyMismatch, "ed25519 public key extraction failed");
        return kp;
    }

    Bytes sign(const SchemeProfile&, ByteView secret_key,
               ByteView digest) const override {
        if (secret_key.size() != kSeedSize)
            fail(Errc::KeyMismatch, "ed25519 secret key must be 32 bytes");
        EVP_PKEY* key = EVP_PKEY_new_raw_private_key(
            EVP_PKEY_ED25519, nullptr, secret_key.data(), secret_key.size());
        if (!key) fail(Errc::KeyMismatch, "ed25519 key construction failed");
        Bytes sig(64);
        std::size_t sig_len = sig.size();
        EVP_MD_CTX* ctx = EVP_MD_CTX_new();
        bool ok = ctx != nullptr &&
                  EVP_DigestSignInit(ctx, nullptr, nullptr, nullptr, key) == 1 &&
                  EVP_DigestSign(ctx, sig.data(), &sig_len, digest.data(),
                                 digest.size()) == 1 &&
                  sig_len == 64;
        EVP_MD_CTX_free(ctx);
        EVP_PKEY_free(key);
        if (!ok) fail(Errc::KeyMismatch, "ed25519 signing failed");
        return sig;
    }

    bool verify(const SchemeProfile&, ByteView public_key, ByteView digest,
                ByteView signature) const override {
        if (public_key.size() != 32 || signature.size() != 64) return false;
        EVP_PKEY* key = EVP_PKEY_new_raw_public_key(
            EVP_PKEY_ED25519, nullptr, public_key.data(), public_key.size());
        if (!key) return false;
        EVP_MD_CTX* ctx = EVP_MD_CTX_new();
        bool ok = ctx != nullptr &&
                  EVP_DigestVerifyInit(ctx, nullptr, nullptr, nullptr, key) == 1 &&
                  EVP_DigestVerify(ctx, signature.data(), signature.size(),
                                   digest.data(), digest.size()) == 1;
        EVP_MD_CTX_free(ctx);
        EVP_PKEY_free(key);
        return ok;
    }
};

inline std::shared_ptr<const SignatureBackend> mock_backend() {
    static auto backend = std::make_shared<MockBackend>();
    return backend;
}

inline std::shared_ptr<const SignatureBackend> ed25519_backend() {
    static auto backend = std::make_shared<Ed25519Backend>();
    return backend;
}

// ============================================================================
// Registry
// ============================================================================

// Populated during setup, then shared by const reference: all lookups and
// crypto operations are const, stateless and reentrant.
class Registry {
public:
    void register_profile(SchemeProfile profile,
                          std::shared_ptr<const SignatureBackend> backend = nullptr) {
        if (!backend) backend = mock_backend();
        if (profile.id.name.empty())
            fail(Errc::ConfigInvalid, "scheme name must be non-empty");
        if (profile.pk_size < 1 || profile.sig_size < 1)
            fail(Errc::ConfigInvalid,
                 "scheme " + profile.id.name + " needs pk_size >= 1 and sig_size >= 1");
        if (index_.contains(profile.id.name))
            fail(Errc::DuplicateScheme, profile.id.name + " is already registered");
        backend->check_profile(profile);
        index_.emplace(profile.id.name, entries_.size());
        entries_.push_back(Entry{std::move(profile), std::move(backend)});
    }

    bool has(std::string_view name) const { return index_.contains(std::string(name)); }

    const SchemeProfile& profile(std::string_view name) const {
        return entry(name).profile;
    }

    // Registration order, which for the bundled set is ascending
    // certificate size.
    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.profile.id.name);
        return out;
    }

    KeyPair keygen(std::string_view scheme, ByteView seed) const {
        const Entry& e = entry(scheme);
        return e.backend->keygen(e.profile, seed);
    }

    Bytes sign(std::string_view scheme, ByteView secret_key, ByteView digest) const {
        const Entry& e = entry(scheme);
        auto start = metrics::Clock::now();
        Bytes sig = e.backend->sign(e.profile, secret_key, digest);
        metrics::busy_wait_us(e.profile.synthetic_sign_cost_us);
        metrics::add_sign(metrics::elapsed_ns(start));
        return sig;
    }

    bool verify(std::string_view scheme, ByteView public_key, ByteView digest,
                ByteView signature) const {
        const Entry& e = entry(scheme);
        auto start = metrics::Clock::now();
        bool ok = e.backend->verify(e.profile, public_key, digest, signature);
        metrics::busy_wait_us(e.profile.synthetic_verify_cost_us);
        metrics::add_verify(metrics::elapsed_ns(start));
        return ok;
    }

private:
    struct Entry {
        SchemeProfile profile;
        std::shared_ptr<const SignatureBackend> backend;
    };

    const Entry& entry(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end())
            fail(Errc::UnknownScheme, "scheme " + std::string(name) + " not registered");
        return entries_[it->second];
    }

    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

// ============================================================================
// Bundled profiles
// ============================================================================

// The ten algorithms under study, ascending certificate size. Sizes are the
// published public-key / signature byte lengths of each parameter set
// (liboqs 0.4.0 era). The ecdsa-p256 row models a 96-byte combined pk+sig;
// no real 256-bit EC scheme splits as 64/32, so the bundled row runs on the
// mock backend and the split is configurable (see data/profiles.toml).
inline std::vector<SchemeProfile> builtin_profiles() {
    auto pq = [](std::string name, std::size_t pk, std::size_t sig) {
        return SchemeProfile{SchemeId{std::move(name), SchemeKind::PostQuantum}, pk, sig};
    };
    return {
        SchemeProfile{SchemeId{"ecdsa-p256", SchemeKind::Classical}, 64, 32},
        pq("falcon-512", 897, 666),
        pq("falcon-1024", 1793, 1280),
        pq("dilithium-2", 1184, 2044),
        pq("dilithium-3", 1472, 2701),
        pq("dilithium-4", 1760, 3366),
        pq("qtesla-p-I", 14880, 2592),
        pq("picnic-L1-FS", 33, 34036),
        pq("rainbow-Ia-cyclic-compressed", 58144, 64),
        pq("rainbow-Ia-classic", 148992, 64),
    };
}

inline Registry builtin_registry() {
    Registry reg;
    for (auto& p : builtin_profiles()) reg.register_profile(std::move(p));
    return reg;
}

// Loads `[scheme-name]` sections: kind, pk_size, sig_size, optional
// sign_cost_us / verify_cost_us and backend (mock | ed25519).
inline void load_profiles(Registry& reg, const ConfigFile& cfg) {
    for (const auto* sec : cfg.named_sections()) {
        SchemeProfile p;
        p.id.name = sec->name;
        std::string kind = sec->get_string("kind");
        if (kind == "classical")
            p.id.kind = SchemeKind::Classical;
        else if (kind == "post-quantum")
            p.id.kind = SchemeKind::PostQuantum;
        else
            fail(Errc::ConfigInvalid,
                 "scheme " + sec->name + ": kind must be classical or post-quantum");
        p.pk_size = sec->require_u64("pk_size");
        p.sig_size = sec->require_u64("sig_size");
        p.synthetic_sign_cost_us = static_cast<std::uint32_t>(sec->get_u64("sign_cost_us", 0));
        p.synthetic_verify_cost_us =
            static_cast<std::uint32_t>(sec->get_u64("verify_cost_us", 0));

        std::string backend_name = sec->get_string("backend", "mock");
        std::shared_ptr<const SignatureBackend> backend;
        if (backend_name == "mock")
            backend = mock_backend();
        else if (backend_name == "ed25519")
            backend = ed25519_backend();
        else
            fail(Errc::ConfigInvalid,
                 "scheme " + sec->name + ": unknown backend " + backend_name);
        reg.register_profile(std::move(p), std::move(backend));
    }
}

inline Registry registry_from_file(const std::string& path) {
    Registry reg;
    load_profiles(reg, ConfigFile::load(path));
    return reg;
}

} // namespace pqledger

#endif // PQLEDGER_CRYPTO_HPP
