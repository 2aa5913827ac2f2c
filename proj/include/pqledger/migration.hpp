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
// Live-migration state machine. Each node walks six stages, one step at a
// time, and the network stays mutually verifiable at every reachable mix:
//
//   S0  vanilla: classical signing/verification only, cannot unpack hybrids
//   S1  software update: can decode and verify hybrid signatures (no-op
//       otherwise, rollback-safe)
//   S2  certificate reissued by the post-quantum-capable authority (the
//       authority's own S1->S2 step is the key rollover itself)
//   S3  verifies the alternate extensions in certificates
//   S4  owns a post-quantum keypair and a hybrid certificate; signs hybrid
//   S5  rollout-complete marker, identical behavior to S4 (the client
//       hybrid milestone)
//
// Preconditions:
//   * reaching S2 needs the authority's rollover done first
//   * reaching S4 needs every verifying core node (peer, orderer) at S1+
//     and the authority at S2+
//   * S4 and S5 cannot be rolled back
//   * a verifying core node cannot drop below S1 while any hybrid signer
//     (stage S4+, any role) exists
//
// check_liveness replays transactions through the ledger pipeline with the
// current mixed stages; every peer endorses and every peer commits its own
// replica, so one incompatible verifier anywhere surfaces as a failed
// transaction.

#ifndef PQLEDGER_MIGRATION_HPP
#define PQLEDGER_MIGRATION_HPP

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pqledger/identity.hpp"
#include "pqledger/ledger.hpp"

namespace pqledger {

enum class Stage : std::uint8_t {
    S0_Vanilla = 0,
    S1_PqSoftware = 1,
    S2_CaHybridCert = 2,
    S3_VerifyAlt = 3,
    S4_HybridSign = 4,
    S5_ClientHybrid = 5,
};

inline const char* stage_name(Stage s) {
    switch (s) {
        case Stage::S0_Vanilla: return "S0-vanilla";
        case Stage::S1_PqSoftware: return "S1-pq-software";
        case Stage::S2_CaHybridCert: return "S2-ca-hybrid-cert";
        case Stage::S3_VerifyAlt: return "S3-verify-alt";
        case Stage::S4_HybridSign: return "S4-hybrid-sign";
        case Stage::S5_ClientHybrid: return "S5-client-hybrid";
    }
    return "unknown";
}

enum class Role { Client, Peer, Orderer, CA };

inline const char* role_name(Role r) {
    switch (r) {
        case Role::Client: return "client";
        case Role::Peer: return "peer";
        case Role::Orderer: return "orderer";
        case Role::CA: return "ca";
    }
    return "unknown";
}

inline std::optional<Role> parse_role(std::string_view s) {
    if (s == "client" || s == "Client") return Role::Client;
    if (s == "peer" || s == "Peer") return Role::Peer;
    if (s == "orderer" || s == "Orderer") return Role::Orderer;
    if (s == "ca" || s == "CA") return Role::CA;
    return std::nullopt;
}

struct NodeState {
    std::string id;
    Role role = Role::Client;
    Stage stage = Stage::S0_Vanilla;
    KeyPair classical_keys;
    std::optional<KeyPair> pq_keys;
    HybridCertificate certificate;
    std::vector<HybridCertificate> cert_history; // for rollback of S2

    bool is_core_verifier() const { return role == Role::Peer || role == Role::Orderer; }
    bool signs_hybrid() const { return stage >= Stage::S4_HybridSign; }

    // Projection onto a pipeline node with stage-appropriate capabilities.
    Node pipeline_node() const {
        Node n;
        n.id = id;
        n.classical_keys = classical_keys;
        n.pq_keys = signs_hybrid() ? pq_keys : std::nullopt;
        n.certificate = certificate;
        n.decode_hybrid = stage >= Stage::S1_PqSoftware;
        n.check_alt = stage >= Stage::S3_VerifyAlt;
        return n;
    }
};

struct LivenessReport {
    std::size_t committed = 0;
    std::size_t failed = 0;
    std::vector<std::pair<std::string, std::string>> failures; // tx id -> error

    bool all_committed() const { return failed == 0; }
};

class Network {
public:
    static Network create(const Registry& reg,
                          const std::vector<std::pair<std::string, Role>>& spec,
                          const std::string& classical_scheme,
                          const std::string& pq_scheme, ByteView master_seed) {
        Network net;
        net.classical_scheme_ = classical_scheme;
        net.pq_scheme_ = pq_scheme;
        net.master_seed_ = Bytes(master_seed.begin(), master_seed.end());
        // Starts classical: the pre-rollover authority has no PQ key.
        net.ca_ = make_authority(reg, "root-ca", classical_scheme, std::nullopt,
                                 master_seed);
        for (const auto& [id, role] : spec) {
            if (net.nodes_.contains(id))
                fail(Errc::ConfigInvalid, "duplicate node id " + id);
            if (role == Role::CA) {
                if (!net.ca_node_id_.empty())
                    fail(Errc::ConfigInvalid, "a network has exactly one certifying authority");
                net.ca_node_id_ = id;
                NodeState ca_node;
                ca_node.id = id;
                ca_node.role = Role::CA;
                ca_node.classical_keys = net.ca_.classical_keys;
                ca_node.certificate = net.ca_.self_certificate;
                net.nodes_.emplace(id, std::move(ca_node));
                continue;
            }
            NodeState n;
            n.id = id;
            n.role = role;
            n.classical_keys = reg.keygen(
                classical_scheme, detail::derive_seed(view(net.master_seed_), id + "/c"));
            n.certificate = issue_certificate(
                reg, net.ca_, id, SigPart{classical_scheme, n.classical_keys.public_key},
                std::nullopt);
            net.nodes_.emplace(id, std::move(n));
        }
        if (net.ca_node_id_.empty())
            fail(Errc::ConfigInvalid, "network needs a certifying authority node");
        return net;
    }

    Stage stage(const std::string& id) const { return node(id).stage; }
    Role role(const std::string& id) const { return node(id).role; }
    const CertAuthority& authority() const { return ca_; }

    std::vector<std::string> node_ids() const {
        std::vector<std::string> out;
        for (const auto& [id, n] : nodes_) out.push_back(id);
        return out;
    }

    const NodeState& node(const std::string& id) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) fail(Errc::ConfigInvalid, "unknown node " + id);
        return it->second;
    }

    // One stage forward, enforcing the rollout preconditions.
    void advance(const Registry& reg, const std::string& id) {
        NodeState& n = mutable_node(id);
        if (n.stage == Stage::S5_ClientHybrid)
            fail(Errc::PreconditionViolated, id + " is already at the final stage");
        Stage next = static_cast<Stage>(static_cast<std::uint8_t>(n.stage) + 1);

        switch (next) {
            case Stage::S2_CaHybridCert:
                if (n.role == Role::CA) {
                    // the key rollover itself
                    authority_enable_pq(reg, ca_, pq_scheme_, view(master_seed_));
                    n.pq_keys = ca_.pq_keys;
                    n.cert_history.push_back(n.certificate);
                    n.certificate = ca_.self_certificate;
                } else {
                    if (ca_stage() < Stage::S2_CaHybridCert)
                        fail(Errc::PreconditionViolated,
                             id + " cannot re-enroll before the certifying authority "
                                  "key rollover");
                    n.cert_history.push_back(n.certificate);
                    n.certificate = issue_certificate(
                        reg, ca_, n.id,
                        SigPart{classical_scheme_, n.classical_keys.public_key},
                        std::nullopt);
                }
                break;
            case Stage::S4_HybridSign: {
                for (const auto& [other_id, other] : nodes_) {
                    if (other.is_core_verifier() && other.stage < Stage::S1_PqSoftware)
                        fail(Errc::PreconditionViolated,
                             id + " cannot sign hybrid while core node " + other_id +
                                 " cannot verify hybrid signatures");
                }
                if (ca_stage() < Stage::S2_CaHybridCert)
                    fail(Errc::PreconditionViolated,
                         id + " cannot obtain a hybrid certificate before the "
                              "certifying authority key rollover");
                if (n.role != Role::CA) {
                    n.pq_keys = reg.keygen(
                        pq_scheme_, detail::derive_seed(view(master_seed_), n.id + "/q"));
                    n.cert_history.push_back(n.certificate);
                    n.certificate = issue_certificate(
                        reg, ca_, n.id,
                        SigPart{classical_scheme_, n.classical_keys.public_key},
                        SigPart{pq_scheme_, n.pq_keys->public_key});
                }
                break;
            }
            default:
                break; // S1, S3, S5 are software/marker switches
        }
        n.stage = next;
    }

    // One stage back. The window closes at S4; a verifying core node cannot
    // drop below S1 while any hybrid signer exists.
    void rollback(const Registry& reg, const std::string& id) {
        NodeState& n = mutable_node(id);
        if (n.stage == Stage::S0_Vanilla)
            fail(Errc::RollbackForbidden, id + " is already at the initial stage");
        if (n.stage >= Stage::S4_HybridSign)
            fail(Errc::RollbackForbidden,
                 id + " signs hybrid; the rollback window closed at that rollout step");
        if (n.stage == Stage::S1_PqSoftware && n.is_core_verifier()) {
            for (const auto& [other_id, other] : nodes_) {
                if (other.signs_hybrid())
                    fail(Errc::RollbackForbidden,
                         id + " must keep verifying hybrid signatures while " + other_id +
                             " signs them");
            }
        }

        Stage prev = static_cast<Stage>(static_cast<std::uint8_t>(n.stage) - 1);
        if (n.stage == Stage::S2_CaHybridCert) {
            if (n.role == Role::CA) {
                authority_disable_pq(reg, ca_);
                n.pq_keys.reset();
                n.certificate = ca_.self_certificate;
                if (!n.cert_history.empty()) n.cert_history.pop_back();
            } else if (!n.cert_history.empty()) {
                n.certificate = n.cert_history.back();
                n.cert_history.pop_back();
            }
        }
        n.stage = prev;
    }

    // Replays tx_count transfers through the pipeline at the current mixed
    // stages. Every peer endorses, a single orderer orders, and every peer
    // commits its own replica; a transaction counts as committed only if
    // every replica applied it. Failures are data, not errors.
    LivenessReport check_liveness(const Registry& reg, std::size_t tx_count) const {
        std::vector<Node> clients, peers;
        std::optional<Node> orderer;
        for (const auto& [id, n] : nodes_) {
            switch (n.role) {
                case Role::Client: clients.push_back(n.pipeline_node()); break;
                case Role::Peer: peers.push_back(n.pipeline_node()); break;
                case Role::Orderer:
                    if (!orderer) orderer = n.pipeline_node();
                    break;
                case Role::CA: break;
            }
        }
        if (clients.empty() || peers.empty() || !orderer)
            fail(Errc::ConfigInvalid, "liveness needs a client, a peer and an orderer");

        PipelineConfig cfg;
        std::map<std::uint64_t, std::uint64_t> init;
        for (std::uint64_t i = 0; i < 2 * tx_count; ++i) init[i] = 100;
        std::deque<Ledger> replicas;
        for (std::size_t i = 0; i < peers.size(); ++i)
            replicas.emplace_back(cfg, ca_.self_certificate, init);

        LivenessReport report;
        for (std::size_t i = 0; i < tx_count; ++i) {
            const Node& client = clients[i % clients.size()];
            std::string tx_id = "live-" + std::to_string(i);
            try {
                TransactionProposal p =
                    propose(reg, client, 2 * i, 2 * i + 1, 1, tx_id, cfg.sig_hash_spec);
                std::vector<Endorsement> endorsements;
                for (const Node& peer : peers)
                    endorsements.push_back(endorse(reg, peer, replicas[0], p));
                Transaction tx = assemble_transaction(reg, client, std::move(p),
                                                      std::move(endorsements),
                                                      cfg.sig_hash_spec);
                Block block = order(reg, *orderer, replicas[0], {std::move(tx)});
                bool all_applied = true;
                for (std::size_t r = 0; r < replicas.size(); ++r) {
                    CommitReport cr =
                        validate_and_commit(reg, peers[r], replicas[r], block);
                    if (cr.applied != 1) all_applied = false;
                }
                if (all_applied) {
                    ++report.committed;
                } else {
                    ++report.failed;
                    report.failures.emplace_back(tx_id, "rejected at commit");
                }
            } catch (const Error& e) {
                ++report.failed;
                report.failures.emplace_back(tx_id, e.name());
            }
        }
        return report;
    }

    std::vector<Stage> stage_vector() const {
        std::vector<Stage> out;
        for (const auto& [id, n] : nodes_) out.push_back(n.stage);
        return out;
    }

private:
    NodeState& mutable_node(const std::string& id) {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) fail(Errc::ConfigInvalid, "unknown node " + id);
        return it->second;
    }

    Stage ca_stage() const { return nodes_.at(ca_node_id_).stage; }

    std::string classical_scheme_;
    std::string pq_scheme_;
    Bytes master_seed_;
    CertAuthority ca_;
    std::string ca_node_id_;
    std::map<std::string, NodeState> nodes_;
};

// ============================================================================
// Scenario files
// ============================================================================

// Plain-text scenario format, one directive per line:
//
//   node <id> <client|peer|orderer|ca>   declarations, first
//   scheme <pq-scheme>                   optional, default falcon-512
//   advance <id> | rollback <id>         apply a step (must succeed)
//   expect-fail advance <id>             assert the step is rejected
//   check <tx-count>                     run liveness, require 100% commit
struct ScenarioStep {
    enum class Kind { Advance, Rollback, Check };
    Kind kind;
    std::string node_id;
    std::size_t tx_count = 0;
    bool expect_fail = false;
};

struct Scenario {
    std::vector<std::pair<std::string, Role>> nodes;
    std::string pq_scheme = "falcon-512";
    std::vector<ScenarioStep> steps;
};

inline Scenario parse_scenario(std::string_view text) {
    Scenario sc;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;

        auto bad = [&](const std::string& why) {
            fail(Errc::ConfigInvalid, "scenario line " + std::to_string(lineno) + ": " + why);
        };
        bool expect_fail = false;
        if (word == "expect-fail") {
            expect_fail = true;
            if (!(ls >> word)) bad("expect-fail needs an action");
        }
        if (word == "node") {
            std::string id, role_word;
            if (!(ls >> id >> role_word)) bad("node needs an id and a role");
            auto role = parse_role(role_word);
            if (!role) bad("unknown role " + role_word);
            sc.nodes.emplace_back(id, *role);
        } else if (word == "scheme") {
            if (!(ls >> sc.pq_scheme)) bad("scheme needs a name");
        } else if (word == "advance" || word == "rollback") {
            ScenarioStep step;
            step.kind = word == "advance" ? ScenarioStep::Kind::Advance
                                          : ScenarioStep::Kind::Rollback;
            step.expect_fail = expect_fail;
            if (!(ls >> step.node_id)) bad(word + " needs a node id");
            sc.steps.push_back(std::move(step));
        } else if (word == "check") {
            ScenarioStep step;
            step.kind = ScenarioStep::Kind::Check;
            if (!(ls >> step.tx_count)) bad("check needs a transaction count");
            sc.steps.push_back(std::move(step));
        } else {
            bad("unknown directive " + word);
        }
    }
    if (sc.nodes.empty()) fail(Errc::ConfigInvalid, "scenario declares no nodes");
    return sc;
}

struct ScenarioStepResult {
    std::string description;
    bool ok = false;
    std::string detail;
};

struct ScenarioReport {
    std::vector<ScenarioStepResult> steps;
    bool all_ok() const {
        for (const auto& s : steps)
            if (!s.ok) return false;
        return true;
    }
};

inline ScenarioReport run_scenario(const Registry& reg, const Scenario& sc,
                                   ByteView master_seed) {
    Network net = Network::create(reg, sc.nodes, "ecdsa-p256", sc.pq_scheme, master_seed);
    ScenarioReport report;
    for (const ScenarioStep& step : sc.steps) {
        ScenarioStepResult res;
        switch (step.kind) {
            case ScenarioStep::Kind::Advance:
            case ScenarioStep::Kind::Rollback: {
                bool is_advance = step.kind == ScenarioStep::Kind::Advance;
                res.description = std::string(step.expect_fail ? "expect-fail " : "") +
                                  (is_advance ? "advance " : "rollback ") + step.node_id;
                try {
                    if (is_advance)
                        net.advance(reg, step.node_id);
                    else
                        net.rollback(reg, step.node_id);
                    res.ok = !step.expect_fail;
                    res.detail = stage_name(net.stage(step.node_id));
                    if (step.expect_fail) res.detail += " (expected a rejection)";
                } catch (const Error& e) {
                    res.ok = step.expect_fail;
                    res.detail = e.name();
                }
                break;
            }
            case ScenarioStep::Kind::Check: {
                res.description = "check " + std::to_string(step.tx_count);
                LivenessReport live = net.check_liveness(reg, step.tx_count);
                res.ok = live.all_committed();
                res.detail = std::to_string(live.committed) + "/" +
                             std::to_string(live.committed + live.failed) + " committed";
                if (!live.failures.empty())
                    res.detail += " (first failure: " + live.failures.front().second + ")";
                break;
            }
        }
        report.steps.push_back(std::move(res));
    }
    return report;
}

} // namespace pqledger

#endif // PQLEDGER_MIGRATION_HPP
