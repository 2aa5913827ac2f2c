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
// Hybrid signature combiners.
//
// Concatenation combiner (transactions and other messages): the same digest
// is signed once with the post-quantum key and once with the classical key,
// and both components must verify. Whether a verifier expects the hybrid
// form is decided by the signer's certificate, never by the signature bytes.
//
// Nested dual-message combiner (certificate material): the post-quantum
// signature covers m1, and the classical signature covers
// (m1, sigma1, m2) — the classical component cannot be detached without
// breaking it.
//
// Wire format (see docs/FORMATS.md): TLV records, tag 0x01 = post-quantum
// component, 0x02 = classical component, 0x03 = explicit absence marker
// (single 0x00 byte), 0x04 = opaque message blob. Component values are a
// 1-byte-length-prefixed scheme name followed by the raw key or signature
// bytes. A classical-only hybrid signature encodes as the bare classical
// component record.

#ifndef PQLEDGER_HYBRID_HPP
#define PQLEDGER_HYBRID_HPP

#include <optional>
#include <string>
#include <utility>

#include "pqledger/bytes.hpp"
#include "pqledger/crypto.hpp"
#include "pqledger/errors.hpp"
#include "pqledger/tlv.hpp"

namespace pqledger {

namespace tag {
inline constexpr std::uint8_t kPqComponent = 0x01;
inline constexpr std::uint8_t kClassicalComponent = 0x02;
inline constexpr std::uint8_t kAbsenceMarker = 0x03;
inline constexpr std::uint8_t kBlob = 0x04;
} // namespace tag

// A scheme-tagged key or signature payload.
struct SigPart {
    std::string scheme;
    Bytes bytes;

    bool operator==(const SigPart&) const = default;
};

struct HybridSignature {
    std::optional<SigPart> pq;
    SigPart classical;

    bool operator==(const HybridSignature&) const = default;
};

// m1 = post-quantum public-key material (or the absence marker),
// m2 = classical certificate information.
struct DualMessage {
    Bytes m1;
    Bytes m2;
};

struct NestedSignature {
    SigPart sigma1; // post-quantum, over m1
    SigPart sigma2; // classical, over encode(m1, sigma1, m2)
};

struct NestedVerdict {
    std::optional<bool> sigma1_ok; // nullopt: skipped (no PQ issuer key supplied)
    bool sigma2_ok = false;
};

// What a verifier derives from the signer's certificate.
struct VerificationContext {
    bool expect_hybrid = false;
    SigPart classical_pk;
    std::optional<SigPart> pq_pk;
};

// ============================================================================
// Component encoding
// ============================================================================

namespace detail {

inline Bytes component_value(const SigPart& part) {
    if (part.scheme.size() > 255)
        fail(Errc::ConfigInvalid, "scheme name longer than 255 bytes");
    Bytes out;
    out.push_back(static_cast<std::uint8_t>(part.scheme.size()));
    append(out, part.scheme);
    append(out, part.bytes);
    return out;
}

inline SigPart parse_component(const tlv::Record& rec) {
    if (rec.value.empty())
        fail_malformed(rec.offset, "empty signature component");
    std::size_t name_len = rec.value[0];
    if (rec.value.size() < 1 + name_len)
        fail_malformed(rec.offset, "component scheme name overruns value");
    SigPart part;
    part.scheme = string_of(rec.value.subspan(1, name_len));
    ByteView payload = rec.value.subspan(1 + name_len);
    part.bytes = Bytes(payload.begin(), payload.end());
    return part;
}

} // namespace detail

inline void write_component(tlv::Writer& w, std::uint8_t tag, const SigPart& part) {
    w.record(tag, detail::component_value(part));
}

// ============================================================================
// Concatenation combiner
// ============================================================================

inline Bytes encode_hybrid(const HybridSignature& sig) {
    tlv::Writer w;
    if (sig.pq) write_component(w, tag::kPqComponent, *sig.pq);
    write_component(w, tag::kClassicalComponent, sig.classical);
    return w.take();
}

inline HybridSignature decode_hybrid(ByteView encoded) {
    tlv::Reader r(encoded);
    HybridSignature sig;
    tlv::Record first = r.next();
    if (first.tag == tag::kPqComponent) {
        sig.pq = detail::parse_component(first);
        tlv::Record second = r.expect(tag::kClassicalComponent, "classical component");
        sig.classical = detail::parse_component(second);
    } else if (first.tag == tag::kClassicalComponent) {
        sig.classical = detail::parse_component(first);
    } else {
        fail_malformed(first.offset, "unexpected tag for hybrid signature");
    }
    r.require_done("hybrid signature");
    return sig;
}

inline HybridSignature sign_concat(const Registry& reg, const KeyPair& classical_key,
                                   const std::optional<KeyPair>& pq_key,
                                   ByteView digest) {
    HybridSignature sig;
    if (pq_key) {
        sig.pq = SigPart{pq_key->scheme.name,
                         reg.sign(pq_key->scheme.name, pq_key->secret_key, digest)};
    }
    sig.classical =
        SigPart{classical_key.scheme.name,
                reg.sign(classical_key.scheme.name, classical_key.secret_key, digest)};
    return sig;
}

// expect_hybrid comes from the signer's certificate. A signature carrying a
// PQ component when none is expected is rejected rather than partially
// verified, and vice versa a missing PQ component under expect_hybrid is the
// downgrade case.
inline bool verify_concat(const Registry& reg, const VerificationContext& ctx,
                          ByteView digest, const HybridSignature& sig) {
    if (ctx.expect_hybrid) {
        if (!sig.pq || !ctx.pq_pk) return false;
        if (sig.pq->scheme != ctx.pq_pk->scheme) return false;
        if (!reg.verify(sig.pq->scheme, ctx.pq_pk->bytes, digest, sig.pq->bytes))
            return false;
    } else {
        if (sig.pq) return false;
    }
    if (sig.classical.scheme != ctx.classical_pk.scheme) return false;
    return reg.verify(sig.classical.scheme, ctx.classical_pk.bytes, digest,
                      sig.classical.bytes);
}

// ============================================================================
// Nested dual-message combiner
// ============================================================================

// m1 for certificate material: the subject's classical public key followed
// by its post-quantum public key, or the absence marker when the subject has
// none — so "no post-quantum key" is itself a signed statement.
inline Bytes encode_key_material(const SigPart& classical_pk,
                                 const std::optional<SigPart>& pq_pk) {
    tlv::Writer w;
    write_component(w, tag::kClassicalComponent, classical_pk);
    if (pq_pk) {
        write_component(w, tag::kPqComponent, *pq_pk);
    } else {
        const std::uint8_t marker[1] = {0x00};
        w.record(tag::kAbsenceMarker, ByteView(marker, 1));
    }
    return w.take();
}

// The payload the classical (outer) signature covers: sigma1 is embedded
// verbatim between the two messages.
inline Bytes nested_payload(ByteView m1, const SigPart& sigma1, ByteView m2) {
    tlv::Writer w;
    w.record(tag::kBlob, m1);
    write_component(w, tag::kPqComponent, sigma1);
    w.record(tag::kBlob, m2);
    return w.take();
}

inline NestedSignature sign_nested(const Registry& reg, const KeyPair& pq_issuer_key,
                                   const KeyPair& classical_issuer_key,
                                   const DualMessage& dual) {
    NestedSignature out;
    Bytes d1 = hash(HashSpec::sha384(), dual.m1);
    out.sigma1 = SigPart{pq_issuer_key.scheme.name,
                         reg.sign(pq_issuer_key.scheme.name,
                                  pq_issuer_key.secret_key, d1)};
    Bytes payload = nested_payload(dual.m1, out.sigma1, dual.m2);
    Bytes d2 = hash(HashSpec::sha384(), payload);
    out.sigma2 = SigPart{classical_issuer_key.scheme.name,
                         reg.sign(classical_issuer_key.scheme.name,
                                  classical_issuer_key.secret_key, d2)};
    return out;
}

// sigma1 is checked only when a PQ issuer key is supplied (classical-only
// validation path otherwise); sigma2 is always checked over the full
// (m1, sigma1, m2) payload.
inline NestedVerdict verify_nested(const Registry& reg,
                                   const std::optional<SigPart>& pq_issuer_pk,
                                   const SigPart& classical_issuer_pk,
                                   const DualMessage& dual,
                                   const NestedSignature& nsig) {
    NestedVerdict verdict;
    if (pq_issuer_pk) {
        Bytes d1 = hash(HashSpec::sha384(), dual.m1);
        verdict.sigma1_ok = nsig.sigma1.scheme == pq_issuer_pk->scheme &&
                            reg.verify(nsig.sigma1.scheme, pq_issuer_pk->bytes, d1,
                                       nsig.sigma1.bytes);
    }
    Bytes payload = nested_payload(dual.m1, nsig.sigma1, dual.m2);
    Bytes d2 = hash(HashSpec::sha384(), payload);
    verdict.sigma2_ok = nsig.sigma2.scheme == classical_issuer_pk.scheme &&
                        reg.verify(nsig.sigma2.scheme, classical_issuer_pk.bytes, d2,
                                   nsig.sigma2.bytes);
    return verdict;
}

} // namespace pqledger

#endif // PQLEDGER_HYBRID_HPP
