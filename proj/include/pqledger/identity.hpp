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
// Hybrid certificates: a classical certificate body plus three non-critical
// alternate extensions carrying the post-quantum material —
//
//   SubjectAltPublicKeyInfo  the subject's post-quantum public key
//   AltSignatureValue        issuer PQ signature over the subject's combined
//                            key material (or its explicit absence)
//   AltSignatureAlgorithm    scheme name of that signature
//
// The issuer always signs the entire certificate, extensions included, with
// a classical-only outer signature, so stripping or altering any alternate
// extension breaks the classical verdict. Verifiers that know nothing about
// the extensions simply ignore them.
//
// Certificate encoding is a single TLV record (tag 0x10); the armored text
// form is base64 of that record between fixed BEGIN/END lines. A Padding
// extension is sized at issuance so that a classical-only armored
// certificate is exactly kClassicalArmoredSize bytes, which keeps armored
// hybrid sizes comparable across schemes.

#ifndef PQLEDGER_IDENTITY_HPP
#define PQLEDGER_IDENTITY_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pqledger/bytes.hpp"
#include "pqledger/crypto.hpp"
#include "pqledger/errors.hpp"
#include "pqledger/hybrid.hpp"
#include "pqledger/tlv.hpp"

namespace pqledger {

namespace tag {
inline constexpr std::uint8_t kCertificate = 0x10;
inline constexpr std::uint8_t kSerial = 0x11;
inline constexpr std::uint8_t kSubject = 0x12;
inline constexpr std::uint8_t kIssuer = 0x13;
inline constexpr std::uint8_t kValidity = 0x14;
inline constexpr std::uint8_t kExtension = 0x15;
inline constexpr std::uint8_t kSubjectClassicalKey = 0x16;
inline constexpr std::uint8_t kOuterSignature = 0x17;
} // namespace tag

enum class ExtensionId : std::uint8_t {
    SubjectAltPublicKeyInfo = 1,
    AltSignatureValue = 2,
    AltSignatureAlgorithm = 3,
    Padding = 4,
};

inline const char* extension_name(ExtensionId id) {
    switch (id) {
        case ExtensionId::SubjectAltPublicKeyInfo: return "subject-alt-public-key-info";
        case ExtensionId::AltSignatureValue: return "alt-signature-value";
        case ExtensionId::AltSignatureAlgorithm: return "alt-signature-algorithm";
        case ExtensionId::Padding: return "padding";
    }
    return "unknown";
}

struct Extension {
    ExtensionId id;
    bool critical = false;
    Bytes value;
};

enum class CertKind { ClassicalOnly, Legacy, Hybrid };

inline const char* cert_kind_name(CertKind k) {
    switch (k) {
        case CertKind::ClassicalOnly: return "classical-only";
        case CertKind::Legacy: return "legacy";
        case CertKind::Hybrid: return "hybrid";
    }
    return "unknown";
}

struct CertificateBody {
    std::uint64_t serial = 0;
    std::string subject;
    std::string issuer;
    std::int64_t valid_from = 0;
    std::int64_t valid_to = 0;
    SigPart classical_pk;
    std::vector<Extension> extensions; // sorted by ExtensionId

    const Extension* find(ExtensionId id) const {
        for (const auto& e : extensions)
            if (e.id == id) return &e;
        return nullptr;
    }
};

// Calibration targets. 564 raw body bytes armor to exactly 818 bytes
// (54 bytes of BEGIN/END lines + 752 base64 chars + 12 line breaks); the
// Padding extension absorbs the difference at issuance.
inline constexpr std::size_t kClassicalRawTarget = 564;
inline constexpr std::size_t kClassicalArmoredSize = 818;

inline constexpr std::string_view kArmorHeader = "-----BEGIN HYBRID CERT-----\n";
inline constexpr std::string_view kArmorFooter = "-----END HYBRID CERT-----\n";
inline constexpr std::size_t kArmorLineWidth = 64;

class HybridCertificate {
public:
    CertificateBody body;
    SigPart outer_signature;

    Bytes encode() const {
        tlv::Writer w;
        std::size_t cert = w.begin(tag::kCertificate);
        encode_tbs(w);
        write_component(w, tag::kOuterSignature, outer_signature);
        w.end(cert);
        return w.take();
    }

    // The bytes the outer signature covers: every body field and every
    // extension, in canonical order.
    Bytes to_be_signed() const {
        tlv::Writer w;
        encode_tbs(w);
        return w.take();
    }

    CertKind kind() const {
        if (body.find(ExtensionId::SubjectAltPublicKeyInfo)) return CertKind::Hybrid;
        if (body.find(ExtensionId::AltSignatureValue)) return CertKind::Legacy;
        return CertKind::ClassicalOnly;
    }

    std::optional<SigPart> subject_pq_pk() const {
        const Extension* ext = body.find(ExtensionId::SubjectAltPublicKeyInfo);
        if (!ext) return std::nullopt;
        return parse_key_value(*ext);
    }

    static HybridCertificate decode(ByteView encoded) {
        tlv::Reader top(encoded);
        tlv::Record cert_rec = top.expect(tag::kCertificate, "certificate record");
        top.require_done("certificate");
        HybridCertificate cert = decode_record(cert_rec);
        return cert;
    }

    static HybridCertificate decode_record(const tlv::Record& cert_rec) {
        HybridCertificate cert;
        tlv::Reader r = tlv::Reader::over(cert_rec);
        cert.body.serial = tlv::value_u64(r.expect(tag::kSerial, "serial"), "serial");
        cert.body.subject = tlv::value_string(r.expect(tag::kSubject, "subject"));
        cert.body.issuer = tlv::value_string(r.expect(tag::kIssuer, "issuer"));
        tlv::Record validity = r.expect(tag::kValidity, "validity");
        if (validity.value.size() != 16)
            fail_malformed(validity.offset, "validity must be 16 bytes");
        cert.body.valid_from = static_cast<std::int64_t>(get_u64be(validity.value.subspan(0, 8)));
        cert.body.valid_to = static_cast<std::int64_t>(get_u64be(validity.value.subspan(8, 8)));
        cert.body.classical_pk = detail::parse_component(
            r.expect(tag::kSubjectClassicalKey, "subject classical key"));

        while (!r.done() && r.peek_tag() == tag::kExtension) {
            tlv::Record ext_rec = r.next();
            if (ext_rec.value.size() < 2)
                fail_malformed(ext_rec.offset, "extension too short");
            Extension ext;
            std::uint8_t raw_id = ext_rec.value[0];
            if (raw_id < 1 || raw_id > 4)
                fail_malformed(ext_rec.offset, "unknown extension id");
            ext.id = static_cast<ExtensionId>(raw_id);
            ext.critical = ext_rec.value[1] != 0;
            ByteView payload = ext_rec.value.subspan(2);
            ext.value = Bytes(payload.begin(), payload.end());
            if (!cert.body.extensions.empty() &&
                static_cast<std::uint8_t>(cert.body.extensions.back().id) >= raw_id)
                fail_malformed(ext_rec.offset, "extensions out of order or duplicated");
            if (ext.critical && ext.id != ExtensionId::Padding)
                fail_malformed(ext_rec.offset, "alternate extensions must be non-critical");
            cert.body.extensions.push_back(std::move(ext));
        }
        cert.outer_signature =
            detail::parse_component(r.expect(tag::kOuterSignature, "outer signature"));
        r.require_done("certificate record");

        if (cert.body.find(ExtensionId::AltSignatureValue) &&
            !cert.body.find(ExtensionId::AltSignatureAlgorithm))
            fail_malformed(cert_rec.offset,
                           "alt-signature-value requires alt-signature-algorithm");
        return cert;
    }

    static SigPart parse_key_value(const Extension& ext) {
        if (ext.value.empty())
            fail_malformed(0, "empty alternate public key extension");
        std::size_t name_len = ext.value[0];
        if (ext.value.size() < 1 + name_len)
            fail_malformed(0, "alternate public key name overruns extension");
        SigPart part;
        part.scheme = string_of(ByteView(ext.value).subspan(1, name_len));
        ByteView payload = ByteView(ext.value).subspan(1 + name_len);
        part.bytes = Bytes(payload.begin(), payload.end());
        return part;
    }

private:
    void encode_tbs(tlv::Writer& w) const {
        w.record_u64(tag::kSerial, body.serial);
        w.record(tag::kSubject, body.subject);
        w.record(tag::kIssuer, body.issuer);
        Bytes validity;
        put_u64be(validity, static_cast<std::uint64_t>(body.valid_from));
        put_u64be(validity, static_cast<std::uint64_t>(body.valid_to));
        w.record(tag::kValidity, validity);
        write_component(w, tag::kSubjectClassicalKey, body.classical_pk);
        for (const Extension& ext : body.extensions) {
            Bytes v;
            v.push_back(static_cast<std::uint8_t>(ext.id));
            v.push_back(ext.critical ? 1 : 0);
            append(v, ext.value);
            w.record(tag::kExtension, v);
        }
    }
};

// ============================================================================
// Armor (PEM-style text form)
// ============================================================================

namespace detail {

inline constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(ByteView in) {
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= in.size(); i += 3) {
        std::uint32_t v = (in[i] << 16) | (in[i + 1] << 8) | in[i + 2];
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back(kB64Alphabet[v & 63]);
    }
    std::size_t rem = in.size() - i;
    if (rem == 1) {
        std::uint32_t v = in[i] << 16;
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back('=');
        out.push_back('=');
    } else if (rem == 2) {
        std::uint32_t v = (in[i] << 16) | (in[i + 1] << 8);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

inline int base64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

inline Bytes base64_decode(std::string_view in, std::size_t text_offset) {
    Bytes out;
    std::uint32_t acc = 0;
    int bits = 0;
    std::size_t pad = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        char c = in[i];
        if (c == '=') {
            ++pad;
            continue;
        }
        if (pad > 0)
            fail_malformed(text_offset + i, "base64 data after padding");
        int v = base64_value(c);
        if (v < 0) fail_malformed(text_offset + i, "invalid base64 character");
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
        }
    }
    if (pad > 2 || (bits != 0 && out.empty() && pad == 0))
        fail_malformed(text_offset, "truncated base64 input");
    return out;
}

} // namespace detail

inline std::string armor_raw(ByteView raw) {
    std::string b64 = detail::base64_encode(raw);
    std::string out(kArmorHeader);
    for (std::size_t i = 0; i < b64.size(); i += kArmorLineWidth) {
        out += b64.substr(i, kArmorLineWidth);
        out += '\n';
    }
    out += kArmorFooter;
    return out;
}

inline Bytes dearmor_raw(std::string_view text) {
    if (text.substr(0, kArmorHeader.size()) != kArmorHeader)
        fail_malformed(0, "missing armor header");
    std::size_t body_start = kArmorHeader.size();
    std::size_t footer_at = text.rfind(kArmorFooter);
    if (footer_at == std::string_view::npos || footer_at < body_start)
        fail_malformed(text.size(), "missing armor footer");
    if (footer_at + kArmorFooter.size() != text.size())
        fail_malformed(footer_at + kArmorFooter.size(), "trailing data after armor footer");
    std::string b64;
    for (std::size_t i = body_start; i < footer_at; ++i) {
        char c = text[i];
        if (c == '\n') continue;
        b64.push_back(c);
    }
    return detail::base64_decode(b64, body_start);
}

inline std::string armor(const HybridCertificate& cert) { return armor_raw(cert.encode()); }

inline HybridCertificate dearmor(std::string_view text) {
    return HybridCertificate::decode(dearmor_raw(text));
}

// ============================================================================
// Certificate authority
// ============================================================================

// Default validity window; fixed values keep issuance fully deterministic.
struct IssueOptions {
    std::int64_t valid_from = 1767225600; // 2026-01-01T00:00:00Z
    std::int64_t valid_to = 2082758400;   // 2036-01-01T00:00:00Z
};

struct CertAuthority {
    std::string name;
    KeyPair classical_keys;
    std::optional<KeyPair> pq_keys;
    HybridCertificate self_certificate;
    std::uint64_t next_serial = 1;
};

namespace detail {

inline Bytes derive_seed(ByteView master, std::string_view label) {
    return xof_expand(concat(master, std::string_view("/"), label), kSeedSize);
}

// Builds and signs a certificate. The Padding extension is sized so the
// certificate without its alternate extensions hits kClassicalRawTarget;
// alternate extensions then add exactly their own encoded length on top.
inline HybridCertificate issue_with(const Registry& reg, CertAuthority& ca,
                                    const std::string& subject,
                                    const SigPart& subject_classical_pk,
                                    const std::optional<SigPart>& subject_pq_pk,
                                    const IssueOptions& opts) {
    if (!reg.has(subject_classical_pk.scheme))
        fail(Errc::SchemeMismatch,
             "subject classical scheme " + subject_classical_pk.scheme + " not registered");
    if (subject_pq_pk && !reg.has(subject_pq_pk->scheme))
        fail(Errc::SchemeMismatch,
             "subject post-quantum scheme " + subject_pq_pk->scheme + " not registered");

    HybridCertificate cert;
    cert.body.serial = ca.next_serial++;
    cert.body.subject = subject;
    cert.body.issuer = ca.name;
    cert.body.valid_from = opts.valid_from;
    cert.body.valid_to = opts.valid_to;
    cert.body.classical_pk = subject_classical_pk;

    // Padding calibration against the classical-only layout.
    const std::size_t sig_record_size =
        tlv::kHeaderSize + 1 + ca.classical_keys.scheme.name.size() +
        reg.profile(ca.classical_keys.scheme.name).sig_size;
    cert.body.extensions.push_back(Extension{ExtensionId::Padding, false, {}});
    std::size_t unpadded =
        tlv::kHeaderSize + cert.to_be_signed().size() + sig_record_size;
    std::size_t pad_len =
        unpadded < kClassicalRawTarget ? kClassicalRawTarget - unpadded : 0;
    cert.body.extensions.back().value.assign(pad_len, 0);

    if (ca.pq_keys) {
        Bytes m1 = encode_key_material(subject_classical_pk, subject_pq_pk);
        Bytes d1 = hash(HashSpec::sha384(), m1);
        Bytes sigma1 = reg.sign(ca.pq_keys->scheme.name, ca.pq_keys->secret_key, d1);
        if (subject_pq_pk) {
            cert.body.extensions.push_back(
                Extension{ExtensionId::SubjectAltPublicKeyInfo, false,
                          component_value(*subject_pq_pk)});
        }
        cert.body.extensions.push_back(
            Extension{ExtensionId::AltSignatureValue, false, std::move(sigma1)});
        cert.body.extensions.push_back(
            Extension{ExtensionId::AltSignatureAlgorithm, false,
                      bytes_of(ca.pq_keys->scheme.name)});
        std::sort(cert.body.extensions.begin(), cert.body.extensions.end(),
                  [](const Extension& a, const Extension& b) {
                      return static_cast<std::uint8_t>(a.id) <
                             static_cast<std::uint8_t>(b.id);
                  });
    }

    Bytes tbs_digest = hash(HashSpec::sha384(), cert.to_be_signed());
    cert.outer_signature =
        SigPart{ca.classical_keys.scheme.name,
                reg.sign(ca.classical_keys.scheme.name, ca.classical_keys.secret_key,
                         tbs_digest)};
    return cert;
}

inline void self_certify(const Registry& reg, CertAuthority& ca) {
    std::optional<SigPart> own_pq;
    if (ca.pq_keys)
        own_pq = SigPart{ca.pq_keys->scheme.name, ca.pq_keys->public_key};
    ca.self_certificate = issue_with(
        reg, ca, ca.name, SigPart{ca.classical_keys.scheme.name, ca.classical_keys.public_key},
        own_pq, IssueOptions{});
}

} // namespace detail

inline CertAuthority make_authority(const Registry& reg, const std::string& name,
                                    const std::string& classical_scheme,
                                    const std::optional<std::string>& pq_scheme,
                                    ByteView master_seed) {
    CertAuthority ca;
    ca.name = name;
    ca.classical_keys =
        reg.keygen(classical_scheme, detail::derive_seed(master_seed, "ca-classical"));
    if (pq_scheme)
        ca.pq_keys = reg.keygen(*pq_scheme, detail::derive_seed(master_seed, "ca-pq"));
    detail::self_certify(reg, ca);
    return ca;
}

// Key rollover: the classical keypair is retained so previously issued
// certificates keep verifying; the authority gains a post-quantum key and a
// fresh hybrid self-certificate.
inline void authority_enable_pq(const Registry& reg, CertAuthority& ca,
                                const std::string& pq_scheme, ByteView master_seed) {
    ca.pq_keys = reg.keygen(pq_scheme, detail::derive_seed(master_seed, "ca-pq"));
    detail::self_certify(reg, ca);
}

inline void authority_disable_pq(const Registry& reg, CertAuthority& ca) {
    ca.pq_keys.reset();
    detail::self_certify(reg, ca);
}

inline HybridCertificate issue_certificate(const Registry& reg, CertAuthority& ca,
                                           const std::string& subject,
                                           const SigPart& subject_classical_pk,
                                           const std::optional<SigPart>& subject_pq_pk,
                                           const IssueOptions& opts = {}) {
    return detail::issue_with(reg, ca, subject, subject_classical_pk, subject_pq_pk, opts);
}

// ============================================================================
// Verification
// ============================================================================

struct CertVerdict {
    enum class Alt { Accept, Reject, Skipped };

    bool classical_ok = false;
    Alt alt_ok = Alt::Skipped;
    CertKind kind = CertKind::ClassicalOnly;
};

inline CertVerdict verify_certificate(const Registry& reg, const HybridCertificate& cert,
                                      const HybridCertificate& ca_cert, bool verify_alt) {
    CertVerdict verdict;
    verdict.kind = cert.kind();

    Bytes tbs_digest = hash(HashSpec::sha384(), cert.to_be_signed());
    verdict.classical_ok =
        cert.outer_signature.scheme == ca_cert.body.classical_pk.scheme &&
        reg.verify(cert.outer_signature.scheme, ca_cert.body.classical_pk.bytes,
                   tbs_digest, cert.outer_signature.bytes);

    const Extension* asv = cert.body.find(ExtensionId::AltSignatureValue);
    std::optional<SigPart> ca_pq_pk = ca_cert.subject_pq_pk();
    if (verify_alt && asv && ca_pq_pk) {
        const Extension* asa = cert.body.find(ExtensionId::AltSignatureAlgorithm);
        std::string sigma1_scheme = asa ? string_of(view(asa->value)) : std::string();
        Bytes m1 = encode_key_material(cert.body.classical_pk, cert.subject_pq_pk());
        Bytes d1 = hash(HashSpec::sha384(), m1);
        bool ok = sigma1_scheme == ca_pq_pk->scheme && reg.has(sigma1_scheme) &&
                  reg.verify(sigma1_scheme, ca_pq_pk->bytes, d1, asv->value);
        verdict.alt_ok = ok ? CertVerdict::Alt::Accept : CertVerdict::Alt::Reject;
    }
    return verdict;
}

// The per-signer expectation a verifier derives from a certificate: hybrid
// verification is demanded by the certificate, never by the signature.
inline VerificationContext extract_verification_context(const HybridCertificate& cert) {
    VerificationContext ctx;
    ctx.classical_pk = cert.body.classical_pk;
    ctx.pq_pk = cert.subject_pq_pk();
    ctx.expect_hybrid = cert.kind() == CertKind::Hybrid;
    if (!ctx.expect_hybrid) ctx.pq_pk.reset();
    return ctx;
}

} // namespace pqledger

#endif // PQLEDGER_IDENTITY_HPP
