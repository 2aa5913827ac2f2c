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

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pqledger/hybrid.hpp"

using namespace pqledger;

namespace {

struct Fixture {
    Registry reg = builtin_registry();
    KeyPair classical = reg.keygen("ecdsa-p256", Bytes(kSeedSize, 0x01));
    KeyPair pq = reg.keygen("falcon-512", Bytes(kSeedSize, 0x02));
    Bytes digest = hash(HashSpec::sha384(), std::string_view("a message"));

    VerificationContext ctx(bool expect_hybrid) const {
        VerificationContext c;
        c.expect_hybrid = expect_hybrid;
        c.classical_pk = SigPart{"ecdsa-p256", classical.public_key};
        if (expect_hybrid) c.pq_pk = SigPart{"falcon-512", pq.public_key};
        return c;
    }
};

} // namespace

TEST_CASE("concatenation combiner signs with both keys and verifies both", "[hybrid]") {
    Fixture f;
    HybridSignature sig = sign_concat(f.reg, f.classical, f.pq, f.digest);
    REQUIRE(sig.pq.has_value());
    REQUIRE(sig.pq->bytes.size() == 666);
    REQUIRE(sig.classical.bytes.size() == 32);
    REQUIRE(verify_concat(f.reg, f.ctx(true), f.digest, sig));

    SECTION("each component verifies standalone against its own key") {
        REQUIRE(f.reg.verify("falcon-512", f.pq.public_key, f.digest, sig.pq->bytes));
        REQUIRE(f.reg.verify("ecdsa-p256", f.classical.public_key, f.digest,
                             sig.classical.bytes));
    }
    SECTION("tampering with either component rejects the whole signature") {
        HybridSignature bad = sig;
        bad.pq->bytes[1] ^= 0x10;
        REQUIRE_FALSE(verify_concat(f.reg, f.ctx(true), f.digest, bad));
        bad = sig;
        bad.classical.bytes[0] ^= 0x01;
        REQUIRE_FALSE(verify_concat(f.reg, f.ctx(true), f.digest, bad));
    }
}

TEST_CASE("classical-only signing when no post-quantum key is supplied", "[hybrid]") {
    Fixture f;
    HybridSignature sig = sign_concat(f.reg, f.classical, std::nullopt, f.digest);
    REQUIRE_FALSE(sig.pq.has_value());
    REQUIRE(verify_concat(f.reg, f.ctx(false), f.digest, sig));

    // The encoding is the bare classical component: no PQ bytes at all.
    Bytes encoded = encode_hybrid(sig);
    REQUIRE(encoded.size() == tlv::kHeaderSize + 1 + 10 + 32);
    REQUIRE(encoded[0] == tag::kClassicalComponent);
}

TEST_CASE("a missing pq component under a hybrid expectation is a downgrade reject",
          "[hybrid]") {
    Fixture f;
    HybridSignature classical_only = sign_concat(f.reg, f.classical, std::nullopt, f.digest);
    REQUIRE_FALSE(verify_concat(f.reg, f.ctx(true), f.digest, classical_only));
}

TEST_CASE("an unexpected pq component under a classical expectation is rejected",
          "[hybrid]") {
    Fixture f;
    HybridSignature hybrid = sign_concat(f.reg, f.classical, f.pq, f.digest);
    REQUIRE_FALSE(verify_concat(f.reg, f.ctx(false), f.digest, hybrid));
}

TEST_CASE("hybrid encoding sizes add component payloads plus fixed overhead", "[hybrid]") {
    Fixture f;
    HybridSignature sig = sign_concat(f.reg, f.classical, f.pq, f.digest);
    Bytes encoded = encode_hybrid(sig);
    // two records, each: 5-byte TLV header + 1-byte name length + name
    std::size_t overhead = 2 * (tlv::kHeaderSize + 1) + 10 + 10;
    REQUIRE(encoded.size() == 666 + 32 + overhead);
}

TEST_CASE("hybrid encode/decode round trips are canonical", "[hybrid]") {
    Fixture f;
    for (bool with_pq : {true, false}) {
        HybridSignature sig = sign_concat(
            f.reg, f.classical, with_pq ? std::optional<KeyPair>(f.pq) : std::nullopt,
            f.digest);
        Bytes once = encode_hybrid(sig);
        HybridSignature decoded = decode_hybrid(once);
        REQUIRE(decoded == sig);
        REQUIRE(encode_hybrid(decoded) == once);
    }
}

TEST_CASE("malformed hybrid encodings report offsets", "[hybrid]") {
    Fixture f;
    Bytes good = encode_hybrid(sign_concat(f.reg, f.classical, f.pq, f.digest));

    SECTION("truncation") {
        Bytes cut(good.begin(), good.begin() + good.size() / 2);
        REQUIRE_THROWS_AS(decode_hybrid(cut), Error);
    }
    SECTION("wrong leading tag") {
        Bytes bad = good;
        bad[0] = 0x7e;
        try {
            decode_hybrid(bad);
            FAIL("expected MalformedEncoding");
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::MalformedEncoding);
            REQUIRE(e.offset() == 0);
        }
    }
    SECTION("trailing garbage") {
        Bytes bad = good;
        bad.push_back(0x00);
        REQUIRE_THROWS_AS(decode_hybrid(bad), Error);
    }
}

TEST_CASE("downgrade fuzz: no deletion or truncation of a hybrid encoding verifies",
          "[hybrid]") {
    Fixture f;
    HybridSignature sig = sign_concat(f.reg, f.classical, f.pq, f.digest);
    Bytes encoded = encode_hybrid(sig);
    VerificationContext ctx = f.ctx(true);

    std::mt19937_64 rng(99);
    int accepted = 0;
    for (int trial = 0; trial < 300; ++trial) {
        Bytes mutated = encoded;
        switch (trial % 3) {
            case 0: { // delete a byte range
                std::size_t at = rng() % mutated.size();
                std::size_t len = 1 + rng() % (mutated.size() - at);
                mutated.erase(mutated.begin() + at, mutated.begin() + at + len);
                break;
            }
            case 1: // truncate
                mutated.resize(rng() % mutated.size());
                break;
            case 2: // drop the pq record, keep the classical one
                mutated = encode_hybrid(HybridSignature{std::nullopt, sig.classical});
                break;
        }
        try {
            HybridSignature parsed = decode_hybrid(mutated);
            if (verify_concat(f.reg, ctx, f.digest, parsed)) ++accepted;
        } catch (const Error&) {
            // malformed: fine, rejected at the decode layer
        }
    }
    REQUIRE(accepted == 0);
}

TEST_CASE("nested combiner: sign then verify, scoping of the two signatures",
          "[hybrid]") {
    Fixture f;
    DualMessage dual;
    dual.m1 = encode_key_material(SigPart{"ecdsa-p256", f.classical.public_key},
                                  SigPart{"falcon-512", f.pq.public_key});
    dual.m2 = bytes_of("classical certificate information");

    NestedSignature nsig = sign_nested(f.reg, f.pq, f.classical, dual);
    SigPart pq_pk{"falcon-512", f.pq.public_key};
    SigPart cls_pk{"ecdsa-p256", f.classical.public_key};

    NestedVerdict v = verify_nested(f.reg, pq_pk, cls_pk, dual, nsig);
    REQUIRE(v.sigma1_ok == std::optional<bool>(true));
    REQUIRE(v.sigma2_ok);

    SECTION("mutating m2 breaks sigma2 but not sigma1") {
        DualMessage other = dual;
        other.m2[0] ^= 0x01;
        NestedVerdict w = verify_nested(f.reg, pq_pk, cls_pk, other, nsig);
        REQUIRE(w.sigma1_ok == std::optional<bool>(true));
        REQUIRE_FALSE(w.sigma2_ok);
    }
    SECTION("mutating sigma1 breaks sigma2: it is inside the signed payload") {
        NestedSignature bad = nsig;
        bad.sigma1.bytes[3] ^= 0x20;
        NestedVerdict w = verify_nested(f.reg, pq_pk, cls_pk, dual, bad);
        REQUIRE(w.sigma1_ok == std::optional<bool>(false));
        REQUIRE_FALSE(w.sigma2_ok);
    }
    SECTION("without a pq issuer key, verification is classical-only") {
        NestedVerdict w = verify_nested(f.reg, std::nullopt, cls_pk, dual, nsig);
        REQUIRE_FALSE(w.sigma1_ok.has_value());
        REQUIRE(w.sigma2_ok);
    }
    SECTION("a sigma1 swapped in from a different signing breaks sigma2") {
        DualMessage other = dual;
        other.m1 = encode_key_material(SigPart{"ecdsa-p256", f.classical.public_key},
                                       std::nullopt);
        NestedSignature foreign = sign_nested(f.reg, f.pq, f.classical, other);
        // Oracle: the payload sigma2 covers differs once sigma1 is swapped.
        REQUIRE(nested_payload(dual.m1, foreign.sigma1, dual.m2) !=
                nested_payload(dual.m1, nsig.sigma1, dual.m2));
        NestedSignature spliced = nsig;
        spliced.sigma1 = foreign.sigma1;
        NestedVerdict w = verify_nested(f.reg, pq_pk, cls_pk, dual, spliced);
        REQUIRE_FALSE(w.sigma2_ok);
    }
}

TEST_CASE("absence marker makes a missing pq key an explicitly signed statement",
          "[hybrid]") {
    Fixture f;
    Bytes with_key = encode_key_material(SigPart{"ecdsa-p256", f.classical.public_key},
                                         SigPart{"falcon-512", f.pq.public_key});
    Bytes without = encode_key_material(SigPart{"ecdsa-p256", f.classical.public_key},
                                        std::nullopt);
    REQUIRE(with_key != without);

    // the absence marker is a 0x03 record holding exactly one 0x00 byte
    tlv::Reader r(view(without));
    r.next(); // classical key component
    tlv::Record marker = r.next();
    REQUIRE(marker.tag == tag::kAbsenceMarker);
    REQUIRE(marker.value.size() == 1);
    REQUIRE(marker.value[0] == 0x00);
    r.require_done("key material");
}

TEST_CASE("nested scoping sweep: sigma2 is sensitive to every byte it covers",
          "[hybrid]") {
    Fixture f;
    DualMessage dual;
    dual.m1 = encode_key_material(SigPart{"ecdsa-p256", f.classical.public_key}, std::nullopt);
    dual.m2 = bytes_of("m2-material");
    NestedSignature nsig = sign_nested(f.reg, f.pq, f.classical, dual);
    SigPart cls_pk{"ecdsa-p256", f.classical.public_key};
    SigPart pq_pk{"falcon-512", f.pq.public_key};

    for (std::size_t i = 0; i < dual.m1.size(); ++i) {
        DualMessage mutated = dual;
        mutated.m1[i] ^= 0x01;
        REQUIRE_FALSE(verify_nested(f.reg, pq_pk, cls_pk, mutated, nsig).sigma2_ok);
    }
    for (std::size_t i = 0; i < dual.m2.size(); ++i) {
        DualMessage mutated = dual;
        mutated.m2[i] ^= 0x01;
        REQUIRE_FALSE(verify_nested(f.reg, pq_pk, cls_pk, mutated, nsig).sigma2_ok);
    }
    for (std::size_t i = 0; i < nsig.sigma1.bytes.size(); i += 7) {
        NestedSignature mutated = nsig;
        mutated.sigma1.bytes[i] ^= 0x01;
        REQUIRE_FALSE(verify_nested(f.reg, pq_pk, cls_pk, dual, mutated).sigma2_ok);
    }
}
