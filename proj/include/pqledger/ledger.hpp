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
// Execute-order-validate pipeline over a balance-transfer world state.
//
//   propose             client signs a transfer proposal
//   endorse             a peer verifies the proposal, simulates the transfer
//                       against current state and signs the outcome
//   assemble            the client packages proposal + endorsements and signs
//   order               a single FIFO orderer verifies everything, batches
//                       transactions into a numbered, chained, signed block
//   validate_and_commit a committing peer re-verifies the block, applies
//                       transfers per transaction and appends to its ledger
//
// Signature digests use SHA-384; block hashes forming the chain use SHA-256
// (both configurable via PipelineConfig). Every structure has a canonical
// TLV encoding (tags 0x20-0x3f, docs/FORMATS.md); a signature record covers
// the sibling records that precede it.
//
// Node verification capabilities mirror the migration stages: a node that
// cannot decode hybrid signatures rejects any signature carrying a PQ
// component and ignores certificate alt extensions; alt-extension checking
// is a separate switch.

#ifndef PQLEDGER_LEDGER_HPP
#define PQLEDGER_LEDGER_HPP

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "pqledger/bytes.hpp"
#include "pqledger/crypto.hpp"
#include "pqledger/errors.hpp"
#include "pqledger/hybrid.hpp"
#include "pqledger/identity.hpp"
#include "pqledger/tlv.hpp"

namespace pqledger {

namespace tag {
inline constexpr std::uint8_t kBlock = 0x20;
inline constexpr std::uint8_t kBlockNumber = 0x21;
inline constexpr std::uint8_t kPrevHash = 0x22;
inline constexpr std::uint8_t kDataHash = 0x23;
inline constexpr std::uint8_t kTransaction = 0x24;
inline constexpr std::uint8_t kProposal = 0x25;
inline constexpr std::uint8_t kTxId = 0x26;
inline constexpr std::uint8_t kOrdererSignature = 0x27;
inline constexpr std::uint8_t kTransfer = 0x28;
inline constexpr std::uint8_t kEndorsement = 0x29;
inline constexpr std::uint8_t kSubmitterSignature = 0x2A;
inline constexpr std::uint8_t kClientSignature = 0x2B;
inline constexpr std::uint8_t kResultDigest = 0x2C;
inline constexpr std::uint8_t kEndorsementSignature = 0x2D;
inline constexpr std::uint8_t kLedgerHeader = 0x30;
inline constexpr std::uint8_t kBlockChecksum = 0x3F;
} // namespace tag

struct PipelineConfig {
    std::size_t endorsement_threshold = 1;
    std::size_t block_size = 100;
    std::size_t payload_cap = 32768;
    HashSpec block_hash_spec = HashSpec::sha256();
    HashSpec sig_hash_spec = HashSpec::sha384();
};

// ============================================================================
// Pipeline data structures
// ============================================================================

struct TransferOp {
    std::uint64_t from = 0;
    std::uint64_t to = 0;
    std::uint64_t amount = 0;
};

struct TransactionProposal {
    std::string tx_id;
    TransferOp op;
    HybridCertificate creator_cert;
    HybridSignature client_signature;

    // Everything the client signature covers.
    Bytes signed_payload() const {
        tlv::Writer w;
        encode_payload(w);
        return w.take();
    }

    Bytes encode() const {
        tlv::Writer w;
        std::size_t rec = w.begin(tag::kProposal);
        encode_payload(w);
        w.record(tag::kClientSignature, encode_hybrid(client_signature));
        w.end(rec);
        return w.take();
    }

    static TransactionProposal decode_record(const tlv::Record& rec) {
        TransactionProposal p;
        tlv::Reader r = tlv::Reader::over(rec);
        p.tx_id = tlv::value_string(r.expect(tag::kTxId, "tx id"));
        tlv::Record op = r.expect(tag::kTransfer, "transfer");
        if (op.value.size() != 24) fail_malformed(op.offset, "transfer must be 24 bytes");
        p.op.from = get_u64be(op.value.subspan(0, 8));
        p.op.to = get_u64be(op.value.subspan(8, 8));
        p.op.amount = get_u64be(op.value.subspan(16, 8));
        p.creator_cert = HybridCertificate::decode_record(
            r.expect(tag::kCertificate, "creator certificate"));
        p.client_signature =
            decode_hybrid(r.expect(tag::kClientSignature, "client signature").value);
        r.require_done("proposal");
        return p;
    }

private:
    void encode_payload(tlv::Writer& w) const {
        w.record(tag::kTxId, tx_id);
        Bytes op_bytes;
        put_u64be(op_bytes, op.from);
        put_u64be(op_bytes, op.to);
        put_u64be(op_bytes, op.amount);
        w.record(tag::kTransfer, op_bytes);
        w.raw(creator_cert.encode());
    }
};

struct Endorsement {
    Bytes result_digest;
    HybridCertificate endorser_cert;
    HybridSignature signature;

    // The endorsement signature binds the full proposal and the simulated
    // outcome together.
    static Bytes signed_payload(const TransactionProposal& proposal,
                                ByteView result_digest) {
        return concat(proposal.encode(), result_digest);
    }

    Bytes encode() const {
        tlv::Writer w;
        std::size_t rec = w.begin(tag::kEndorsement);
        w.record(tag::kResultDigest, result_digest);
        w.raw(endorser_cert.encode());
        w.record(tag::kEndorsementSignature, encode_hybrid(signature));
        w.end(rec);
        return w.take();
    }

    static Endorsement decode_record(const tlv::Record& rec) {
        Endorsement e;
        tlv::Reader r = tlv::Reader::over(rec);
        tlv::Record digest = r.expect(tag::kResultDigest, "result digest");
        e.result_digest = Bytes(digest.value.begin(), digest.value.end());
        e.endorser_cert = HybridCertificate::decode_record(
            r.expect(tag::kCertificate, "endorser certificate"));
        e.signature =
            decode_hybrid(r.expect(tag::kEndorsementSignature, "endorsement signature").value);
        r.require_done("endorsement");
        return e;
    }
};

struct Transaction {
    TransactionProposal proposal;
    std::vector<Endorsement> endorsements;
    HybridSignature submitter_signature;

    // proposal || endorsements, the submitter's signed payload.
    Bytes signed_payload() const {
        Bytes out = proposal.encode();
        for (const auto& e : endorsements) append(out, e.encode());
        return out;
    }

    Bytes encode() const {
        tlv::Writer w;
        std::size_t rec = w.begin(tag::kTransaction);
        w.raw(proposal.encode());
        for (const auto& e : endorsements) w.raw(e.encode());
        w.record(tag::kSubmitterSignature, encode_hybrid(submitter_signature));
        w.end(rec);
        return w.take();
    }

    static Transaction decode_record(const tlv::Record& rec) {
        Transaction tx;
        tlv::Reader r = tlv::Reader::over(rec);
        tx.proposal =
            TransactionProposal::decode_record(r.expect(tag::kProposal, "proposal"));
        while (!r.done() && r.peek_tag() == tag::kEndorsement)
            tx.endorsements.push_back(Endorsement::decode_record(r.next()));
        tx.submitter_signature =
            decode_hybrid(r.expect(tag::kSubmitterSignature, "submitter signature").value);
        r.require_done("transaction");
        return tx;
    }
};

struct Block {
    std::uint64_t number = 0;
    Bytes prev_hash;
    Bytes data_hash;
    std::vector<Transaction> transactions;
    HybridCertificate orderer_cert;
    HybridSignature orderer_signature;

    // The orderer signs number || prev_hash || data_hash.
    Bytes header_digest(HashSpec sig_hash) const {
        return hash(sig_hash, concat(u64be(number), prev_hash, data_hash));
    }

    static Bytes compute_data_hash(HashSpec block_hash,
                                   const std::vector<Transaction>& txs) {
        Bytes all;
        for (const auto& tx : txs) append(all, tx.encode());
        return hash(block_hash, all);
    }

    Bytes encode() const {
        tlv::Writer w;
        std::size_t rec = w.begin(tag::kBlock);
        w.record_u64(tag::kBlockNumber, number);
        w.record(tag::kPrevHash, prev_hash);
        w.record(tag::kDataHash, data_hash);
        for (const auto& tx : transactions) w.raw(tx.encode());
        w.raw(orderer_cert.encode());
        w.record(tag::kOrdererSignature, encode_hybrid(orderer_signature));
        w.end(rec);
        return w.take();
    }

    static Block decode(ByteView encoded) {
        tlv::Reader top(encoded);
        Block b = decode_record(top.expect(tag::kBlock, "block"));
        top.require_done("block");
        return b;
    }

    static Block decode_record(const tlv::Record& rec) {
        Block b;
        tlv::Reader r = tlv::Reader::over(rec);
        b.number = tlv::value_u64(r.expect(tag::kBlockNumber, "block number"), "block number");
        tlv::Record prev = r.expect(tag::kPrevHash, "prev hash");
        b.prev_hash = Bytes(prev.value.begin(), prev.value.end());
        tlv::Record data = r.expect(tag::kDataHash, "data hash");
        b.data_hash = Bytes(data.value.begin(), data.value.end());
        while (!r.done() && r.peek_tag() == tag::kTransaction)
            b.transactions.push_back(Transaction::decode_record(r.next()));
        b.orderer_cert = HybridCertificate::decode_record(
            r.expect(tag::kCertificate, "orderer certificate"));
        b.orderer_signature =
            decode_hybrid(r.expect(tag::kOrdererSignature, "orderer signature").value);
        r.require_done("block");
        return b;
    }
};

// ============================================================================
// Nodes
// ============================================================================

struct Node {
    std::string id;
    KeyPair classical_keys;
    std::optional<KeyPair> pq_keys;
    HybridCertificate certificate;

    // Verification capabilities (migration stages S1 / S3).
    bool decode_hybrid = true;
    bool check_alt = true;

    bool signs_hybrid() const {
        return pq_keys.has_value() && certificate.kind() == CertKind::Hybrid;
    }
    std::optional<KeyPair> signing_pq_key() const {
        if (signs_hybrid()) return pq_keys;
        return std::nullopt;
    }
};

inline Node make_node(const Registry& reg, CertAuthority& ca, const std::string& id,
                      const std::string& classical_scheme,
                      const std::optional<std::string>& pq_scheme, ByteView seed) {
    Node n;
    n.id = id;
    n.classical_keys = reg.keygen(classical_scheme, detail::derive_seed(seed, id + "/c"));
    std::optional<SigPart> pq_pk;
    if (pq_scheme) {
        n.pq_keys = reg.keygen(*pq_scheme, detail::derive_seed(seed, id + "/q"));
        pq_pk = SigPart{*pq_scheme, n.pq_keys->public_key};
    }
    n.certificate = issue_certificate(
        reg, ca, id, SigPart{classical_scheme, n.classical_keys.public_key}, pq_pk);
    return n;
}

// Stage-aware signature acceptance. A node that cannot decode hybrid
// signatures rejects anything carrying a PQ component and treats every
// identity as classical; otherwise the expectation comes from the
// signer's certificate.
inline bool node_accepts_signature(const Registry& reg, const Node& verifier,
                                   const HybridCertificate& signer_cert, ByteView digest,
                                   const HybridSignature& sig) {
    VerificationContext ctx = extract_verification_context(signer_cert);
    if (!verifier.decode_hybrid) {
        if (sig.pq) return false;
        ctx.expect_hybrid = false;
        ctx.pq_pk.reset();
    }
    return verify_concat(reg, ctx, digest, sig);
}

inline bool node_trusts_certificate(const Registry& reg, const Node& verifier,
                                    const HybridCertificate& cert,
                                    const HybridCertificate& ca_cert) {
    bool verify_alt = verifier.decode_hybrid && verifier.check_alt;
    CertVerdict v = verify_certificate(reg, cert, ca_cert, verify_alt);
    return v.classical_ok && v.alt_ok != CertVerdict::Alt::Reject;
}

// ============================================================================
// Ledger state
// ============================================================================

class Ledger {
public:
    Ledger(PipelineConfig config, HybridCertificate ca_cert,
           std::map<std::uint64_t, std::uint64_t> initial_balances)
        : config_(std::move(config)),
          ca_cert_(std::move(ca_cert)),
          balances_(std::move(initial_balances)),
          tip_hash_(config_.block_hash_spec.digest_size(), 0) {}

    const PipelineConfig& config() const { return config_; }
    const HybridCertificate& ca_cert() const { return ca_cert_; }

    std::uint64_t height() const {
        std::shared_lock lock(mu_);
        return blocks_.size();
    }
    Bytes tip_hash() const {
        std::shared_lock lock(mu_);
        return tip_hash_;
    }
    const std::vector<Block>& blocks() const { return blocks_; }

    std::uint64_t balance(std::uint64_t account) const {
        std::shared_lock lock(mu_);
        auto it = balances_.find(account);
        return it == balances_.end() ? 0 : it->second;
    }

    std::pair<std::uint64_t, std::uint64_t> balances_of(std::uint64_t from,
                                                        std::uint64_t to) const {
        std::shared_lock lock(mu_);
        auto f = balances_.find(from);
        auto t = balances_.find(to);
        return {f == balances_.end() ? 0 : f->second, t == balances_.end() ? 0 : t->second};
    }

    std::uint64_t total_balance() const {
        std::shared_lock lock(mu_);
        std::uint64_t sum = 0;
        for (const auto& [id, bal] : balances_) sum += bal;
        return sum;
    }

    std::map<std::uint64_t, std::uint64_t> snapshot_balances() const {
        std::shared_lock lock(mu_);
        return balances_;
    }

private:
    friend struct CommitAccess;

    PipelineConfig config_;
    HybridCertificate ca_cert_;
    mutable std::shared_mutex mu_;
    std::map<std::uint64_t, std::uint64_t> balances_;
    std::vector<Block> blocks_;
    Bytes tip_hash_;
    std::set<std::string> seen_tx_ids_;
};

// Commit-path access to the ledger internals; world state mutates only here.
struct CommitAccess {
    static std::shared_mutex& mu(Ledger& l) { return l.mu_; }
    static std::map<std::uint64_t, std::uint64_t>& balances(Ledger& l) { return l.balances_; }
    static std::vector<Block>& blocks(Ledger& l) { return l.blocks_; }
    static Bytes& tip(Ledger& l) { return l.tip_hash_; }
    static std::set<std::string>& seen(Ledger& l) { return l.seen_tx_ids_; }
};

// ============================================================================
// Pipeline operations
// ============================================================================

inline TransactionProposal propose(const Registry& reg, const Node& client,
                                   std::uint64_t from, std::uint64_t to,
                                   std::uint64_t amount, std::string tx_id,
                                   HashSpec sig_hash = HashSpec::sha384()) {
    if (from == to)
        fail(Errc::InvalidTransfer, "transfer must touch two distinct accounts");
    if (amount == 0) fail(Errc::InvalidTransfer, "transfer amount must be positive");
    TransactionProposal p;
    p.tx_id = std::move(tx_id);
    p.op = TransferOp{from, to, amount};
    p.creator_cert = client.certificate;
    Bytes digest = hash(sig_hash, p.signed_payload());
    p.client_signature =
        sign_concat(reg, client.classical_keys, client.signing_pq_key(), digest);
    return p;
}

inline Endorsement endorse(const Registry& reg, const Node& peer, const Ledger& ledger,
                           const TransactionProposal& proposal) {
    const PipelineConfig& cfg = ledger.config();

    Bytes encoded = proposal.encode();
    if (encoded.size() > cfg.payload_cap)
        fail(Errc::PayloadTooLarge,
             "proposal " + proposal.tx_id + " is " + std::to_string(encoded.size()) +
                 " bytes, cap is " + std::to_string(cfg.payload_cap));

    if (!node_trusts_certificate(reg, peer, proposal.creator_cert, ledger.ca_cert()))
        fail(Errc::BadClientSignature,
             "creator certificate of " + proposal.tx_id + " failed verification");
    Bytes digest = hash(cfg.sig_hash_spec, proposal.signed_payload());
    if (!node_accepts_signature(reg, peer, proposal.creator_cert, digest,
                                proposal.client_signature))
        fail(Errc::BadClientSignature, "client signature of " + proposal.tx_id + " rejected");

    auto [pre_from, pre_to] = ledger.balances_of(proposal.op.from, proposal.op.to);
    if (pre_from < proposal.op.amount)
        fail(Errc::InsufficientFunds,
             "account " + std::to_string(proposal.op.from) + " holds " +
                 std::to_string(pre_from) + ", needs " + std::to_string(proposal.op.amount));

    Endorsement e;
    e.result_digest = hash(cfg.sig_hash_spec,
                           concat(u64be(proposal.op.from), u64be(proposal.op.to),
                                  u64be(proposal.op.amount), u64be(pre_from), u64be(pre_to)));
    e.endorser_cert = peer.certificate;
    Bytes sig_digest =
        hash(cfg.sig_hash_spec, Endorsement::signed_payload(proposal, e.result_digest));
    e.signature = sign_concat(reg, peer.classical_keys, peer.signing_pq_key(), sig_digest);
    return e;
}

inline Transaction assemble_transaction(const Registry& reg, const Node& client,
                                        TransactionProposal proposal,
                                        std::vector<Endorsement> endorsements,
                                        HashSpec sig_hash = HashSpec::sha384()) {
    Transaction tx;
    tx.proposal = std::move(proposal);
    tx.endorsements = std::move(endorsements);
    Bytes digest = hash(sig_hash, tx.signed_payload());
    tx.submitter_signature =
        sign_concat(reg, client.classical_keys, client.signing_pq_key(), digest);
    return tx;
}

namespace detail {

// Shared by the orderer and the committing peers; the error code names the
// complaining role.
inline void verify_transaction_signatures(const Registry& reg, const Node& verifier,
                                          const Ledger& ledger, const Transaction& tx,
                                          Errc errc) {
    const PipelineConfig& cfg = ledger.config();
    if (!node_trusts_certificate(reg, verifier, tx.proposal.creator_cert, ledger.ca_cert()))
        fail(errc, tx.proposal.tx_id + ": creator certificate failed");
    Bytes proposal_digest = hash(cfg.sig_hash_spec, tx.proposal.signed_payload());
    if (!node_accepts_signature(reg, verifier, tx.proposal.creator_cert, proposal_digest,
                                tx.proposal.client_signature))
        fail(errc, tx.proposal.tx_id + ": client signature rejected");
    for (const Endorsement& e : tx.endorsements) {
        if (!node_trusts_certificate(reg, verifier, e.endorser_cert, ledger.ca_cert()))
            fail(errc, tx.proposal.tx_id + ": endorser certificate failed");
        Bytes digest =
            hash(cfg.sig_hash_spec, Endorsement::signed_payload(tx.proposal, e.result_digest));
        if (!node_accepts_signature(reg, verifier, e.endorser_cert, digest, e.signature))
            fail(errc, tx.proposal.tx_id + ": endorsement signature rejected");
    }
    Bytes tx_digest = hash(cfg.sig_hash_spec, tx.signed_payload());
    if (!node_accepts_signature(reg, verifier, tx.proposal.creator_cert, tx_digest,
                                tx.submitter_signature))
        fail(errc, tx.proposal.tx_id + ": submitter signature rejected");
}

} // namespace detail

// Single FIFO orderer: verifies client, endorsement and submitter signatures,
// then numbers, chains and signs the block.
inline Block order(const Registry& reg, const Node& orderer, const Ledger& ledger,
                   std::vector<Transaction> txs) {
    const PipelineConfig& cfg = ledger.config();
    if (txs.empty()) fail(Errc::EmptyBatch, "cannot order an empty transaction batch");
    if (txs.size() > cfg.block_size)
        fail(Errc::ConfigInvalid, "batch exceeds block_size");
    for (const Transaction& tx : txs)
        detail::verify_transaction_signatures(reg, orderer, ledger, tx, Errc::BadEndorsement);

    Block b;
    b.number = ledger.height();
    b.prev_hash = ledger.tip_hash();
    b.data_hash = Block::compute_data_hash(cfg.block_hash_spec, txs);
    b.transactions = std::move(txs);
    b.orderer_cert = orderer.certificate;
    Bytes digest = b.header_digest(cfg.sig_hash_spec);
    b.orderer_signature =
        sign_concat(reg, orderer.classical_keys, orderer.signing_pq_key(), digest);
    return b;
}

struct CommitReport {
    std::size_t applied = 0;
    std::vector<std::string> rejected_tx_ids;
};

// Validates the block wholesale (orderer signature, chain position, data
// hash), then each transaction individually: invalid or conflicting
// transactions are rejected one by one while the rest are applied
// atomically. The block is appended either way.
inline CommitReport validate_and_commit(const Registry& reg, const Node& committer,
                                        Ledger& ledger, const Block& block) {
    const PipelineConfig& cfg = ledger.config();

    if (block.number != ledger.height())
        fail(Errc::ChainBreak, "block number " + std::to_string(block.number) +
                                   " at height " + std::to_string(ledger.height()));
    if (block.prev_hash != ledger.tip_hash())
        fail(Errc::ChainBreak, "prev hash mismatch at block " + std::to_string(block.number));
    if (block.data_hash != Block::compute_data_hash(cfg.block_hash_spec, block.transactions))
        fail(Errc::ChainBreak, "data hash mismatch at block " + std::to_string(block.number));

    if (!node_trusts_certificate(reg, committer, block.orderer_cert, ledger.ca_cert()))
        fail(Errc::BadOrdererSignature, "orderer certificate failed verification");
    Bytes header = block.header_digest(cfg.sig_hash_spec);
    if (!node_accepts_signature(reg, committer, block.orderer_cert, header,
                                block.orderer_signature))
        fail(Errc::BadOrdererSignature, "orderer signature rejected");

    CommitReport report;
    std::unique_lock lock(CommitAccess::mu(ledger));
    auto& balances = CommitAccess::balances(ledger);
    auto& seen = CommitAccess::seen(ledger);
    for (const Transaction& tx : block.transactions) {
        const std::string& id = tx.proposal.tx_id;
        bool ok = tx.endorsements.size() >= cfg.endorsement_threshold &&
                  !seen.contains(id) && tx.proposal.op.from != tx.proposal.op.to &&
                  tx.proposal.op.amount > 0;
        if (ok) {
            try {
                detail::verify_transaction_signatures(reg, committer, ledger, tx,
                                                      Errc::BadEndorsement);
            } catch (const Error&) {
                ok = false;
            }
        }
        if (ok) {
            auto from_it = balances.find(tx.proposal.op.from);
            if (from_it == balances.end() || from_it->second < tx.proposal.op.amount)
                ok = false;
            else {
                from_it->second -= tx.proposal.op.amount;
                balances[tx.proposal.op.to] += tx.proposal.op.amount;
            }
        }
        if (ok) {
            seen.insert(id);
            ++report.applied;
        } else {
            report.rejected_tx_ids.push_back(id);
        }
    }

    CommitAccess::blocks(ledger).push_back(block);
    CommitAccess::tip(ledger) = hash(cfg.block_hash_spec, block.encode());
    return report;
}

// ============================================================================
// Chain verification and persistence
// ============================================================================

// Recomputes every data hash and every prev-hash link, and checks each
// orderer signature against the certificate embedded in its block, so a
// mutation anywhere in any block is caught without external state.
inline bool verify_chain(const Registry& reg, const std::vector<Block>& blocks,
                         const PipelineConfig& cfg = {}) {
    Bytes expected_prev(cfg.block_hash_spec.digest_size(), 0);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Block& b = blocks[i];
        if (b.number != i) return false;
        if (b.prev_hash != expected_prev) return false;
        if (b.data_hash != Block::compute_data_hash(cfg.block_hash_spec, b.transactions))
            return false;
        VerificationContext ctx = extract_verification_context(b.orderer_cert);
        if (!verify_concat(reg, ctx, b.header_digest(cfg.sig_hash_spec),
                           b.orderer_signature))
            return false;
        expected_prev = hash(cfg.block_hash_spec, b.encode());
    }
    return true;
}

inline constexpr std::uint8_t kLedgerFormatVersion = 1;

inline Bytes encode_ledger_header(const PipelineConfig& cfg) {
    tlv::Writer w;
    Bytes v;
    v.push_back(kLedgerFormatVersion);
    v.push_back(cfg.block_hash_spec.algorithm == HashSpec::Alg::Sha256 ? 0 : 1);
    v.push_back(cfg.sig_hash_spec.algorithm == HashSpec::Alg::Sha256 ? 0 : 1);
    w.record(tag::kLedgerHeader, v);
    return w.take();
}

// Append-only block file: a header record, then per block the block record
// followed by a SHA-256 checksum of that record's bytes. The checksum makes
// a mutation of the newest block detectable even before a successor chains
// over it.
inline void save_ledger(const std::string& path, const Ledger& ledger) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoFailure, "cannot write " + path);
    Bytes header = encode_ledger_header(ledger.config());
    out.write(reinterpret_cast<const char*>(header.data()),
              static_cast<std::streamsize>(header.size()));
    for (const Block& b : ledger.blocks()) {
        Bytes rec = b.encode();
        tlv::Writer w;
        w.record(tag::kBlockChecksum, hash(HashSpec::sha256(), rec));
        Bytes check = w.take();
        out.write(reinterpret_cast<const char*>(rec.data()),
                  static_cast<std::streamsize>(rec.size()));
        out.write(reinterpret_cast<const char*>(check.data()),
                  static_cast<std::streamsize>(check.size()));
    }
    if (!out) fail(Errc::IoFailure, "short write to " + path);
}

struct LoadedLedger {
    PipelineConfig config;
    std::vector<Block> blocks;
};

inline LoadedLedger load_ledger_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::IoFailure, "cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ByteView buf = view(std::string_view(data));

    LoadedLedger out;
    tlv::Reader r(buf);
    tlv::Record header = r.expect(tag::kLedgerHeader, "ledger header");
    if (header.value.size() != 3 || header.value[0] != kLedgerFormatVersion)
        fail_malformed(header.offset, "unsupported ledger header");
    out.config.block_hash_spec =
        header.value[1] == 0 ? HashSpec::sha256() : HashSpec::sha384();
    out.config.sig_hash_spec =
        header.value[2] == 0 ? HashSpec::sha256() : HashSpec::sha384();

    while (!r.done()) {
        std::size_t rec_start = r.offset();
        tlv::Record block_rec = r.expect(tag::kBlock, "block record");
        std::size_t rec_end = r.offset();
        tlv::Record check = r.expect(tag::kBlockChecksum, "block checksum");
        Bytes actual = hash(HashSpec::sha256(),
                            buf.subspan(rec_start, rec_end - rec_start));
        if (check.value.size() != actual.size() ||
            !std::equal(actual.begin(), actual.end(), check.value.begin()))
            fail_malformed(rec_start, "block checksum mismatch");
        out.blocks.push_back(Block::decode_record(block_rec));
    }
    return out;
}

// File-level verdict: malformed records, checksum mismatches, broken links
// and bad signatures are all a reject.
inline bool verify_chain_file(const Registry& reg, const std::string& path,
                              std::string* reason = nullptr) {
    try {
        LoadedLedger loaded = load_ledger_file(path);
        if (!verify_chain(reg, loaded.blocks, loaded.config)) {
            if (reason) *reason = "hash chain or signature verification failed";
            return false;
        }
        return true;
    } catch (const Error& e) {
        if (reason) *reason = e.what();
        if (e.code() == Errc::IoFailure) throw;
        return false;
    }
}

} // namespace pqledger

#endif // PQLEDGER_LEDGER_HPP
