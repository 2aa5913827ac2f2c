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

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "pqledger/ledger.hpp"

using namespace pqledger;

namespace {

struct Net {
    Registry reg = builtin_registry();
    CertAuthority ca;
    Node client, peer, orderer;
    Bytes seed = Bytes(kSeedSize, 0x77);

    explicit Net(std::optional<std::string> pq_scheme = std::string("falcon-512")) {
        ca = make_authority(reg, "root-ca", "ecdsa-p256", pq_scheme, seed);
        client = make_node(reg, ca, "client-0", "ecdsa-p256", pq_scheme, seed);
        peer = make_node(reg, ca, "peer-0", "ecdsa-p256", pq_scheme, seed);
        orderer = make_node(reg, ca, "orderer-0", "ecdsa-p256", pq_scheme, seed);
    }

    Ledger fresh_ledger(std::size_t accounts = 64, std::uint64_t balance = 100,
                        PipelineConfig cfg = {}) const {
        std::map<std::uint64_t, std::uint64_t> init;
        for (std::uint64_t i = 0; i < accounts; ++i) init[i] = balance;
        return Ledger(cfg, ca.self_certificate, std::move(init));
    }

    Transaction make_tx(const Ledger& ledger, std::uint64_t from, std::uint64_t to,
                        std::uint64_t amount, const std::string& id) const {
        TransactionProposal p = propose(reg, client, from, to, amount, id);
        Endorsement e = endorse(reg, peer, ledger, p);
        return assemble_transaction(reg, client, std::move(p), {std::move(e)});
    }
};

} // namespace

TEST_CASE("proposals are signed and validated; bad transfers rejected up front",
          "[ledger]") {
    Net net;
    Ledger ledger = net.fresh_ledger();

    TransactionProposal p = propose(net.reg, net.client, 1, 2, 10, "tx-0");
    Bytes digest = hash(HashSpec::sha384(), p.signed_payload());
    REQUIRE(node_accepts_signature(net.reg, net.peer, p.creator_cert, digest,
                                   p.client_signature));
    // hybrid client: the proposal carries a two-component signature
    REQUIRE(p.client_signature.pq.has_value());

    try {
        propose(net.reg, net.client, 1, 1, 10, "tx-self");
        FAIL("expected InvalidTransfer");
    } catch (const Error& e) {
        REQUIRE(e.code() == Errc::InvalidTransfer);
    }
    REQUIRE_THROWS_AS(propose(net.reg, net.client, 1, 2, 0, "tx-zero"), Error);
}

TEST_CASE("endorsement verifies the client, simulates the transfer and signs",
          "[ledger]") {
    Net net;
    Ledger ledger = net.fresh_ledger();
    TransactionProposal p = propose(net.reg, net.client, 1, 2, 10, "tx-0");

    Endorsement e = endorse(net.reg, net.peer, ledger, p);
    Bytes digest = hash(HashSpec::sha384(), Endorsement::signed_payload(p, e.result_digest));
    REQUIRE(node_accepts_signature(net.reg, net.orderer, e.endorser_cert, digest,
                                   e.signature));

    SECTION("a tampered client signature is BadClientSignature") {
        TransactionProposal bad = p;
        bad.client_signature.classical.bytes[0] ^= 0x01;
        try {
            endorse(net.reg, net.peer, ledger, bad);
            FAIL("expected BadClientSignature");
        } catch (const Error& err) {
            REQUIRE(err.code() == Errc::BadClientSignature);
        }
    }
    SECTION("insufficient funds surface at simulation time") {
        TransactionProposal rich = propose(net.reg, net.client, 1, 2, 1000000, "tx-big");
        try {
            endorse(net.reg, net.peer, ledger, rich);
            FAIL("expected InsufficientFunds");
        } catch (const Error& err) {
            REQUIRE(err.code() == Errc::InsufficientFunds);
        }
    }
}

TEST_CASE("an oversized creator certificate trips the payload cap", "[ledger]") {
    Net picnic{std::string("picnic-L1-FS")};
    Ledger ledger = picnic.fresh_ledger();
    TransactionProposal p = propose(picnic.reg, picnic.client, 1, 2, 10, "tx-0");
    REQUIRE(p.encode().size() > ledger.config().payload_cap);
    try {
        endorse(picnic.reg, picnic.peer, ledger, p);
        FAIL("expected PayloadTooLarge");
    } catch (const Error& e) {
        REQUIRE(e.code() == Errc::PayloadTooLarge);
    }
    // qTesla-p-I, the largest runnable scheme, stays under the default cap.
    Net qtesla{std::string("qtesla-p-I")};
    Ledger ql = qtesla.fresh_ledger();
    TransactionProposal qp = propose(qtesla.reg, qtesla.client, 1, 2, 10, "tx-0");
    REQUIRE(qp.encode().size() <= ql.config().payload_cap);
    REQUIRE_NOTHROW(endorse(qtesla.reg, qtesla.peer, ql, qp));
}

TEST_CASE("ordering verifies everything and chains the block", "[ledger]") {
    Net net;
    Ledger ledger = net.fresh_ledger();
    std::vector<Transaction> txs;
    for (int i = 0; i < 4; ++i)
        txs.push_back(net.make_tx(ledger, 2 * i, 2 * i + 1, 5, "tx-" + std::to_string(i)));

    Block b = order(net.reg, net.orderer, ledger, txs);
    REQUIRE(b.number == 0);
    REQUIRE(b.prev_hash == Bytes(32, 0));
    REQUIRE(b.data_hash == Block::compute_data_hash(HashSpec::sha256(), b.transactions));
    VerificationContext ctx = extract_verification_context(b.orderer_cert);
    REQUIRE(verify_concat(net.reg, ctx, b.header_digest(HashSpec::sha384()),
                          b.orderer_signature));

    SECTION("empty batches are rejected") {
        try {
            order(net.reg, net.orderer, ledger, {});
            FAIL("expected EmptyBatch");
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::EmptyBatch);
        }
    }
    SECTION("a batch larger than the block size is rejected") {
        PipelineConfig tiny;
        tiny.block_size = 2;
        std::map<std::uint64_t, std::uint64_t> init;
        for (std::uint64_t i = 0; i < 16; ++i) init[i] = 100;
        Ledger small(tiny, net.ca.self_certificate, std::move(init));
        std::vector<Transaction> three;
        for (int i = 0; i < 3; ++i)
            three.push_back(net.make_tx(small, 2 * i, 2 * i + 1, 1, "t" + std::to_string(i)));
        REQUIRE_THROWS_AS(order(net.reg, net.orderer, small, three), Error);
    }
    SECTION("a forged endorsement is BadEndorsement") {
        txs[1].endorsements[0].signature.classical.bytes[3] ^= 0x40;
        try {
            order(net.reg, net.orderer, ledger, txs);
            FAIL("expected BadEndorsement");
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::BadEndorsement);
        }
    }
}

TEST_CASE("commit applies transfers, conserves balances and rejects per transaction",
          "[ledger]") {
    Net net;
    Ledger ledger = net.fresh_ledger(64, 100);
    std::uint64_t initial_total = ledger.total_balance();

    std::vector<Transaction> txs;
    for (int i = 0; i < 10; ++i)
        txs.push_back(net.make_tx(ledger, 2 * i, 2 * i + 1, 7, "tx-" + std::to_string(i)));

    // one transaction with zero endorsements, below the threshold of 1
    txs[4].endorsements.clear();
    txs[4] = assemble_transaction(net.reg, net.client, txs[4].proposal, {});

    Block b = order(net.reg, net.orderer, ledger, txs);
    CommitReport report = validate_and_commit(net.reg, net.peer, ledger, b);
    REQUIRE(report.applied == 9);
    REQUIRE(report.rejected_tx_ids == std::vector<std::string>{"tx-4"});
    REQUIRE(ledger.total_balance() == initial_total);
    REQUIRE(ledger.height() == 1);

    // Oracle: replay the nine applied transfers sequentially over a fresh
    // state and compare the final balances.
    std::map<std::uint64_t, std::uint64_t> expected;
    for (std::uint64_t i = 0; i < 64; ++i) expected[i] = 100;
    for (int i = 0; i < 10; ++i) {
        if (i == 4) continue;
        expected[2 * i] -= 7;
        expected[2 * i + 1] += 7;
    }
    REQUIRE(ledger.snapshot_balances() == expected);

    SECTION("wrong chain position is ChainBreak") {
        Block again = b; // stale block: height moved past it
        try {
            validate_and_commit(net.reg, net.peer, ledger, again);
            FAIL("expected ChainBreak");
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::ChainBreak);
        }
    }
}

TEST_CASE("a block claiming genesis prev-hash at height 5 is a chain break",
          "[ledger]") {
    Net net;
    Ledger ledger = net.fresh_ledger(256, 1000);
    for (int blk = 0; blk < 5; ++blk) {
        std::vector<Transaction> txs;
        for (int i = 0; i < 3; ++i) {
            int acct = blk * 6 + i * 2;
            txs.push_back(
                net.make_tx(ledger, acct, acct + 1, 1,
                            "tx-" + std::to_string(blk) + "-" + std::to_string(i)));
        }
        validate_and_commit(net.reg, net.peer, ledger,
                            order(net.reg, net.orderer, ledger, txs));
    }
    REQUIRE(ledger.height() == 5);

    std::vector<Transaction> txs{net.make_tx(ledger, 100, 101, 1, "tx-final")};
    Block b = order(net.reg, net.orderer, ledger, txs);
    b.prev_hash.assign(b.prev_hash.size(), 0);
    Bytes digest = b.header_digest(HashSpec::sha384());
    b.orderer_signature = sign_concat(net.reg, net.orderer.classical_keys,
                                      net.orderer.signing_pq_key(), digest);
    try {
        validate_and_commit(net.reg, net.peer, ledger, b);
        FAIL("expected ChainBreak");
    } catch (const Error& e) {
        REQUIRE(e.code() == Errc::ChainBreak);
    }
}

TEST_CASE("hybrid enforcement end to end: classical-only parts never commit",
          "[ledger]") {
    Net net;
    Ledger ledger = net.fresh_ledger();

    // Client with a hybrid certificate signs classical-only: the downgrade
    // is rejected at the first verifying hop.
    TransactionProposal p;
    p.tx_id = "tx-downgrade";
    p.op = TransferOp{1, 2, 5};
    p.creator_cert = net.client.certificate;
    Bytes digest = hash(HashSpec::sha384(), p.signed_payload());
    p.client_signature = sign_concat(net.reg, net.client.classical_keys, std::nullopt, digest);
    try {
        endorse(net.reg, net.peer, ledger, p);
        FAIL("expected BadClientSignature");
    } catch (const Error& e) {
        REQUIRE(e.code() == Errc::BadClientSignature);
    }
}

TEST_CASE("transaction and block encodings round trip byte-identically", "[ledger]") {
    Net net;
    Ledger ledger = net.fresh_ledger();
    std::vector<Transaction> txs{net.make_tx(ledger, 1, 2, 3, "tx-rt")};
    Block b = order(net.reg, net.orderer, ledger, txs);

    Bytes tx_bytes = txs[0].encode();
    Transaction tx2 = Transaction::decode_record(tlv::Reader(view(tx_bytes)).next());
    REQUIRE(tx2.encode() == tx_bytes);

    Bytes block_bytes = b.encode();
    Block b2 = Block::decode(block_bytes);
    REQUIRE(b2.encode() == block_bytes);
    REQUIRE(b2.transactions.size() == 1);
    REQUIRE(b2.transactions[0].proposal.tx_id == "tx-rt");
}

TEST_CASE("chain verification accepts committed ledgers and detects tampering",
          "[ledger]") {
    Net net;
    Ledger ledger = net.fresh_ledger(256, 100);
    for (int blk = 0; blk < 8; ++blk) {
        std::vector<Transaction> txs;
        for (int i = 0; i < 4; ++i) {
            int acct = blk * 8 + i * 2;
            txs.push_back(
                net.make_tx(ledger, acct, acct + 1, 2,
                            "tx-" + std::to_string(blk) + "-" + std::to_string(i)));
        }
        validate_and_commit(net.reg, net.peer, ledger,
                            order(net.reg, net.orderer, ledger, txs));
    }
    REQUIRE(verify_chain(net.reg, ledger.blocks()));

    SECTION("flipping one byte inside a transaction is detected") {
        std::vector<Block> tampered = ledger.blocks();
        tampered[5].transactions[2].proposal.tx_id[0] = 'X';
        REQUIRE_FALSE(verify_chain(net.reg, tampered));
    }
    SECTION("reordering two blocks is detected") {
        std::vector<Block> tampered = ledger.blocks();
        std::swap(tampered[2], tampered[3]);
        REQUIRE_FALSE(verify_chain(net.reg, tampered));
    }
    SECTION("the persisted file round trips and detects byte mutations") {
        std::string path =
            (std::filesystem::temp_directory_path() / "pqledger-test-chain.bin").string();
        save_ledger(path, ledger);
        REQUIRE(verify_chain_file(net.reg, path));

        // flip one byte somewhere in the middle of the file
        std::ifstream in(path, std::ios::binary);
        std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        data[data.size() / 2] ^= 0x01;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << data;
        out.close();
        std::string reason;
        REQUIRE_FALSE(verify_chain_file(net.reg, path, &reason));
        REQUIRE_FALSE(reason.empty());
        std::filesystem::remove(path);
    }
}

TEST_CASE("single-threaded runs with a fixed seed produce identical ledger bytes",
          "[ledger]") {
    auto run_once = [] {
        Net net;
        Ledger ledger = net.fresh_ledger(64, 100);
        for (int blk = 0; blk < 3; ++blk) {
            std::vector<Transaction> txs;
            for (int i = 0; i < 4; ++i) {
                int acct = blk * 8 + i * 2;
                txs.push_back(
                    net.make_tx(ledger, acct, acct + 1, 3,
                                "tx-" + std::to_string(blk) + "-" + std::to_string(i)));
            }
            validate_and_commit(net.reg, net.peer, ledger,
                                order(net.reg, net.orderer, ledger, txs));
        }
        std::string path = (std::filesystem::temp_directory_path() /
                            ("pqledger-det-" + std::to_string(::getpid()) + ".bin"))
                               .string();
        save_ledger(path, ledger);
        std::ifstream in(path, std::ios::binary);
        std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::filesystem::remove(path);
        return data;
    };
    REQUIRE(run_once() == run_once());
}

TEST_CASE("the pipeline runs end to end over the real ed25519 classical backend",
          "[ledger]") {
    Registry reg;
    reg.register_profile(SchemeProfile{SchemeId{"ed25519", SchemeKind::Classical}, 32, 64},
                         ed25519_backend());
    reg.register_profile(
        SchemeProfile{SchemeId{"falcon-512", SchemeKind::PostQuantum}, 897, 666});

    Bytes seed(kSeedSize, 0x3E);
    CertAuthority ca =
        make_authority(reg, "root-ca", "ed25519", std::string("falcon-512"), view(seed));
    Node client = make_node(reg, ca, "client-0", "ed25519", std::string("falcon-512"),
                            view(seed));
    Node peer = make_node(reg, ca, "peer-0", "ed25519", std::string("falcon-512"), view(seed));
    Node orderer =
        make_node(reg, ca, "orderer-0", "ed25519", std::string("falcon-512"), view(seed));

    std::map<std::uint64_t, std::uint64_t> init;
    for (std::uint64_t i = 0; i < 16; ++i) init[i] = 100;
    Ledger ledger(PipelineConfig{}, ca.self_certificate, std::move(init));

    std::vector<Transaction> txs;
    for (int i = 0; i < 4; ++i) {
        TransactionProposal p =
            propose(reg, client, 2 * i, 2 * i + 1, 5, "tx-" + std::to_string(i));
        Endorsement e = endorse(reg, peer, ledger, p);
        txs.push_back(assemble_transaction(reg, client, std::move(p), {std::move(e)}));
    }
    Block b = order(reg, orderer, ledger, txs);
    CommitReport r = validate_and_commit(reg, peer, ledger, b);
    REQUIRE(r.applied == 4);
    REQUIRE(verify_chain(reg, ledger.blocks()));
    // real signatures, still hybrid: both components present everywhere
    REQUIRE(b.transactions[0].proposal.client_signature.pq.has_value());
    REQUIRE(b.transactions[0].proposal.client_signature.classical.bytes.size() == 64);
}

TEST_CASE("endorsement stays safe under concurrent client threads", "[ledger]") {
    Net net;
    Ledger ledger = net.fresh_ledger(512, 100);

    std::vector<std::thread> workers;
    std::mutex out_mu;
    std::vector<Transaction> out;
    std::atomic<int> failures{0};
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&, t] {
            for (int i = 0; i < 16; ++i) {
                int acct = (t * 16 + i) * 2;
                try {
                    TransactionProposal p =
                        propose(net.reg, net.client, acct, acct + 1, 3,
                                "tx-" + std::to_string(t) + "-" + std::to_string(i));
                    Endorsement e = endorse(net.reg, net.peer, ledger, p);
                    Transaction tx = assemble_transaction(net.reg, net.client, std::move(p),
                                                          {std::move(e)});
                    std::lock_guard lock(out_mu);
                    out.push_back(std::move(tx));
                } catch (const Error&) {
                    ++failures;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    REQUIRE(failures == 0);
    REQUIRE(out.size() == 64);

    std::uint64_t before = ledger.total_balance();
    std::size_t applied = 0;
    for (std::size_t at = 0; at < out.size(); at += 16) {
        std::vector<Transaction> batch(out.begin() + at, out.begin() + at + 16);
        applied +=
            validate_and_commit(net.reg, net.peer, ledger,
                                order(net.reg, net.orderer, ledger, std::move(batch)))
                .applied;
    }
    REQUIRE(applied == 64);
    REQUIRE(ledger.total_balance() == before);
}

TEST_CASE("classical baseline network commits with single-component signatures",
          "[ledger]") {
    Net net{std::nullopt};
    REQUIRE(net.ca.self_certificate.kind() == CertKind::ClassicalOnly);
    Ledger ledger = net.fresh_ledger();
    Transaction tx = net.make_tx(ledger, 1, 2, 5, "tx-cls");
    REQUIRE_FALSE(tx.proposal.client_signature.pq.has_value());
    Block b = order(net.reg, net.orderer, ledger, {tx});
    CommitReport r = validate_and_commit(net.reg, net.peer, ledger, b);
    REQUIRE(r.applied == 1);
}
