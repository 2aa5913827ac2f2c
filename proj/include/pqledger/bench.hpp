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
// Benchmark harness: client threads propose/endorse/assemble transfers over
// disjoint account pairs, a single FIFO orderer batches them, and one
// committing peer validates and commits while its wall time is split into
// sign / verify / hash / other buckets per block. The first and last
// trim_blocks blocks are excluded from every aggregate.
//
// Reports emit as CSV (per-block rows plus `# key = value` metadata lines)
// or JSON lines (one record per measured block), byte-stable across
// re-emission. compare_runs lines several reports of identical workload
// shape up against the first as baseline.

#ifndef PQLEDGER_BENCH_HPP
#define PQLEDGER_BENCH_HPP

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pqledger/config.hpp"
#include "pqledger/ledger.hpp"
#include "pqledger/metrics.hpp"

namespace pqledger {

struct BenchConfig {
    std::size_t accounts = 20000;
    std::size_t total_txs = 10000;
    std::size_t block_size = 100;
    std::size_t client_threads = 10;
    std::size_t trim_blocks = 5;
    std::uint64_t seed = 1;
    std::optional<std::string> scheme; // PQ component; nullopt = classical baseline
    std::size_t payload_cap = 32768;
    std::size_t endorsement_threshold = 1;

    static BenchConfig from_file(const ConfigFile& file) {
        const auto& top = file.top();
        BenchConfig cfg;
        cfg.accounts = top.get_u64("accounts", cfg.accounts);
        cfg.total_txs = top.get_u64("total_txs", cfg.total_txs);
        cfg.block_size = top.get_u64("block_size", cfg.block_size);
        cfg.client_threads = top.get_u64("client_threads", cfg.client_threads);
        cfg.trim_blocks = top.get_u64("trim_blocks", cfg.trim_blocks);
        cfg.seed = top.get_u64("seed", cfg.seed);
        cfg.payload_cap = top.get_u64("payload_cap", cfg.payload_cap);
        cfg.endorsement_threshold =
            top.get_u64("endorsement_threshold", cfg.endorsement_threshold);
        std::string scheme = top.get_string("scheme");
        if (!scheme.empty() && scheme != "none") cfg.scheme = scheme;
        return cfg;
    }

    void validate() const {
        if (block_size == 0 || total_txs == 0 || client_threads == 0)
            fail(Errc::ConfigInvalid, "counts must be positive");
        if (total_txs % block_size != 0)
            fail(Errc::ConfigInvalid, "total_txs must be divisible by block_size");
        if (accounts < 2 * total_txs)
            fail(Errc::ConfigInvalid,
                 "need at least 2*total_txs accounts for a disjoint workload (" +
                     std::to_string(accounts) + " < " + std::to_string(2 * total_txs) + ")");
        if (total_txs / block_size <= 2 * trim_blocks)
            fail(Errc::ConfigInvalid,
                 "trimming " + std::to_string(trim_blocks) +
                     " blocks per side leaves no measured blocks");
    }

    std::string scheme_label() const { return scheme ? *scheme : "classical-baseline"; }

    bool same_shape(const BenchConfig& other) const {
        return accounts == other.accounts && total_txs == other.total_txs &&
               block_size == other.block_size && client_threads == other.client_threads &&
               trim_blocks == other.trim_blocks;
    }
};

struct BlockTiming {
    std::uint64_t number = 0;
    double wall_ms = 0;
    double sign_ms = 0;
    double verify_ms = 0;
    double hash_ms = 0;
    double other_ms = 0;
    std::uint64_t block_bytes = 0;
    std::uint64_t hashed_bytes = 0;
    std::size_t applied = 0;
    bool trimmed = false;
};

struct BenchReport {
    BenchConfig config;
    std::vector<BlockTiming> blocks;
    std::size_t committed = 0;
    std::size_t failed = 0;
    std::map<std::string, std::size_t> failure_counts;

    std::uint64_t total_block_bytes = 0;
    std::uint64_t pq_component_bytes = 0;
    std::size_t hybrid_signatures = 0;
    std::size_t classical_only_signatures = 0;

    // aggregates over measured (untrimmed) blocks
    std::size_t blocks_measured = 0;
    double median_wall_ms = 0;
    double mean_wall_ms = 0;
    double stddev_wall_ms = 0;
    double median_hash_ms = 0;
    double throughput_tx_s = 0;
    std::uint64_t median_block_bytes = 0;
    std::uint64_t median_hashed_bytes = 0;
    double bucket_sign_ms = 0;
    double bucket_verify_ms = 0;
    double bucket_hash_ms = 0;

    void finalize() {
        auto median_of = [](std::vector<double> v) {
            if (v.empty()) return 0.0;
            std::sort(v.begin(), v.end());
            std::size_t mid = v.size() / 2;
            return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
        };
        std::vector<double> walls, hashes, bytes, hashed;
        double sign = 0, verify = 0, hash_total = 0, wall_total = 0;
        std::size_t applied_measured = 0;
        for (const BlockTiming& b : blocks) {
            total_block_bytes += b.block_bytes;
            if (b.trimmed) continue;
            walls.push_back(b.wall_ms);
            hashes.push_back(b.hash_ms);
            bytes.push_back(double(b.block_bytes));
            hashed.push_back(double(b.hashed_bytes));
            sign += b.sign_ms;
            verify += b.verify_ms;
            hash_total += b.hash_ms;
            wall_total += b.wall_ms;
            applied_measured += b.applied;
        }
        blocks_measured = walls.size();
        median_wall_ms = median_of(walls);
        median_hash_ms = median_of(hashes);
        median_block_bytes = static_cast<std::uint64_t>(median_of(bytes));
        median_hashed_bytes = static_cast<std::uint64_t>(median_of(hashed));
        mean_wall_ms = walls.empty() ? 0 : wall_total / double(walls.size());
        double var = 0;
        for (double w : walls) var += (w - mean_wall_ms) * (w - mean_wall_ms);
        stddev_wall_ms = walls.empty() ? 0 : std::sqrt(var / double(walls.size()));
        bucket_sign_ms = sign;
        bucket_verify_ms = verify;
        bucket_hash_ms = hash_total;
        throughput_tx_s =
            wall_total > 0 ? double(applied_measured) / (wall_total / 1000.0) : 0;
    }
};

// ============================================================================
// Workload
// ============================================================================

// Disjoint transfer pairs: every account is touched by at most one
// transaction, so database contention never competes with crypto cost.
inline std::vector<TransferOp> generate_workload(const BenchConfig& cfg) {
    std::vector<std::uint64_t> ids(2 * cfg.total_txs);
    std::iota(ids.begin(), ids.end(), 0);
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<TransferOp> ops;
    ops.reserve(cfg.total_txs);
    for (std::size_t i = 0; i < cfg.total_txs; ++i)
        ops.push_back(TransferOp{ids[2 * i], ids[2 * i + 1], 1 + (rng() % 50)});
    return ops;
}

// ============================================================================
// Run
// ============================================================================

inline BenchReport run_benchmark(const Registry& reg, const BenchConfig& cfg,
                                 const std::optional<std::string>& ledger_out = {}) {
    cfg.validate();
    if (cfg.scheme && !reg.has(*cfg.scheme))
        fail(Errc::UnknownScheme, "scheme " + *cfg.scheme + " not registered");

    Bytes master_seed = xof_expand(u64be(cfg.seed), kSeedSize);
    CertAuthority ca =
        make_authority(reg, "bench-ca", "ecdsa-p256", cfg.scheme, view(master_seed));
    Node client = make_node(reg, ca, "client-0", "ecdsa-p256", cfg.scheme, view(master_seed));
    Node peer = make_node(reg, ca, "peer-0", "ecdsa-p256", cfg.scheme, view(master_seed));
    Node orderer =
        make_node(reg, ca, "orderer-0", "ecdsa-p256", cfg.scheme, view(master_seed));

    PipelineConfig pipeline;
    pipeline.block_size = cfg.block_size;
    pipeline.payload_cap = cfg.payload_cap;
    pipeline.endorsement_threshold = cfg.endorsement_threshold;
    std::map<std::uint64_t, std::uint64_t> init;
    for (std::uint64_t i = 0; i < cfg.accounts; ++i) init[i] = 100;
    Ledger ledger(pipeline, ca.self_certificate, std::move(init));

    std::vector<TransferOp> ops = generate_workload(cfg);

    std::mutex queue_mu;
    std::condition_variable queue_cv;
    std::deque<Transaction> queue;
    std::size_t producers_done = 0;
    std::map<std::string, std::size_t> failure_counts;
    std::size_t failed = 0;

    auto producer = [&](std::size_t thread_index) {
        std::size_t chunk = (cfg.total_txs + cfg.client_threads - 1) / cfg.client_threads;
        std::size_t begin = thread_index * chunk;
        std::size_t end = std::min(cfg.total_txs, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) {
            try {
                TransactionProposal p =
                    propose(reg, client, ops[i].from, ops[i].to, ops[i].amount,
                            "tx-" + std::to_string(i), pipeline.sig_hash_spec);
                Endorsement e = endorse(reg, peer, ledger, p);
                Transaction tx = assemble_transaction(reg, client, std::move(p), {std::move(e)},
                                                      pipeline.sig_hash_spec);
                std::lock_guard lock(queue_mu);
                queue.push_back(std::move(tx));
            } catch (const Error& err) {
                std::lock_guard lock(queue_mu);
                ++failed;
                ++failure_counts[err.name()];
            }
            queue_cv.notify_one();
        }
        std::lock_guard lock(queue_mu);
        ++producers_done;
        queue_cv.notify_one();
    };

    std::vector<std::thread> threads;
    threads.reserve(cfg.client_threads);
    for (std::size_t t = 0; t < cfg.client_threads; ++t) threads.emplace_back(producer, t);

    BenchReport report;
    report.config = cfg;
    std::size_t committed = 0;
    std::size_t rejected_at_commit = 0;

    // Single committer: drain the queue into blocks in arrival order,
    // measure wall time from block receipt to commit.
    for (;;) {
        std::vector<Transaction> batch;
        {
            std::unique_lock lock(queue_mu);
            queue_cv.wait(lock, [&] {
                return queue.size() >= cfg.block_size ||
                       producers_done == cfg.client_threads;
            });
            if (queue.empty() && producers_done == cfg.client_threads) break;
            std::size_t take = std::min(cfg.block_size, queue.size());
            for (std::size_t i = 0; i < take; ++i) {
                batch.push_back(std::move(queue.front()));
                queue.pop_front();
            }
        }
        Block block = order(reg, orderer, ledger, std::move(batch));

        metrics::Buckets buckets;
        auto t0 = metrics::Clock::now();
        CommitReport cr;
        {
            metrics::Collect collect(buckets);
            cr = validate_and_commit(reg, peer, ledger, block);
        }
        double wall_ms = double(metrics::elapsed_ns(t0)) / 1e6;

        BlockTiming t;
        t.number = block.number;
        t.wall_ms = wall_ms;
        t.sign_ms = double(buckets.sign_ns) / 1e6;
        t.verify_ms = double(buckets.verify_ns) / 1e6;
        t.hash_ms = double(buckets.hash_ns) / 1e6;
        t.other_ms = std::max(0.0, wall_ms - t.sign_ms - t.verify_ms - t.hash_ms);
        t.block_bytes = block.encode().size();
        t.hashed_bytes = buckets.hashed_bytes;
        t.applied = cr.applied;
        report.blocks.push_back(t);

        committed += cr.applied;
        rejected_at_commit += cr.rejected_tx_ids.size();
    }
    for (auto& th : threads) th.join();
    if (rejected_at_commit > 0) {
        failed += rejected_at_commit;
        failure_counts["RejectedAtCommit"] += rejected_at_commit;
    }

    // trim first and last trim_blocks blocks from aggregates
    for (std::size_t i = 0; i < report.blocks.size(); ++i)
        report.blocks[i].trimmed =
            i < cfg.trim_blocks || i + cfg.trim_blocks >= report.blocks.size();

    report.committed = committed;
    report.failed = failed;
    report.failure_counts = std::move(failure_counts);

    // signature census over the committed chain
    auto count_sig = [&](const HybridSignature& s) {
        if (s.pq) {
            ++report.hybrid_signatures;
            report.pq_component_bytes += s.pq->bytes.size();
        } else {
            ++report.classical_only_signatures;
        }
    };
    for (const Block& b : ledger.blocks()) {
        count_sig(b.orderer_signature);
        for (const Transaction& tx : b.transactions) {
            count_sig(tx.proposal.client_signature);
            count_sig(tx.submitter_signature);
            for (const Endorsement& e : tx.endorsements) count_sig(e.signature);
        }
    }

    report.finalize();
    if (ledger_out) save_ledger(*ledger_out, ledger);
    return report;
}

// ============================================================================
// Emission
// ============================================================================

enum class ReportFormat { Csv, JsonLines };

namespace detail {

inline std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace detail

inline std::string render_report(const BenchReport& r, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::Csv) {
        out << "# pqledger-bench-report-v1\n";
        out << "# scheme = " << r.config.scheme_label() << "\n";
        out << "# accounts = " << r.config.accounts << "\n";
        out << "# total_txs = " << r.config.total_txs << "\n";
        out << "# block_size = " << r.config.block_size << "\n";
        out << "# client_threads = " << r.config.client_threads << "\n";
        out << "# trim_blocks = " << r.config.trim_blocks << "\n";
        out << "# seed = " << r.config.seed << "\n";
        out << "# payload_cap = " << r.config.payload_cap << "\n";
        out << "# committed = " << r.committed << "\n";
        out << "# failed = " << r.failed << "\n";
        std::string failures;
        for (const auto& [name, count] : r.failure_counts) {
            if (!failures.empty()) failures += ",";
            failures += name + ":" + std::to_string(count);
        }
        out << "# failures = " << failures << "\n";
        out << "# blocks_total = " << r.blocks.size() << "\n";
        out << "# blocks_measured = " << r.blocks_measured << "\n";
        out << "# total_block_bytes = " << r.total_block_bytes << "\n";
        out << "# median_block_bytes = " << r.median_block_bytes << "\n";
        out << "# median_hashed_bytes = " << r.median_hashed_bytes << "\n";
        out << "# pq_component_bytes = " << r.pq_component_bytes << "\n";
        out << "# hybrid_signatures = " << r.hybrid_signatures << "\n";
        out << "# classical_only_signatures = " << r.classical_only_signatures << "\n";
        out << "# median_wall_ms = " << detail::fixed3(r.median_wall_ms) << "\n";
        out << "# mean_wall_ms = " << detail::fixed3(r.mean_wall_ms) << "\n";
        out << "# stddev_wall_ms = " << detail::fixed3(r.stddev_wall_ms) << "\n";
        out << "# median_hash_ms = " << detail::fixed3(r.median_hash_ms) << "\n";
        out << "# throughput_tx_s = " << detail::fixed3(r.throughput_tx_s) << "\n";
        out << "# bucket_sign_ms = " << detail::fixed3(r.bucket_sign_ms) << "\n";
        out << "# bucket_verify_ms = " << detail::fixed3(r.bucket_verify_ms) << "\n";
        out << "# bucket_hash_ms = " << detail::fixed3(r.bucket_hash_ms) << "\n";
        out << "block,wall_ms,sign_ms,verify_ms,hash_ms,other_ms\n";
        for (const BlockTiming& b : r.blocks) {
            if (b.trimmed) continue;
            out << b.number << ',' << detail::fixed3(b.wall_ms) << ','
                << detail::fixed3(b.sign_ms) << ',' << detail::fixed3(b.verify_ms) << ','
                << detail::fixed3(b.hash_ms) << ',' << detail::fixed3(b.other_ms) << "\n";
        }
    } else {
        for (const BlockTiming& b : r.blocks) {
            if (b.trimmed) continue;
            out << "{\"block\":" << b.number << ",\"wall_ms\":" << detail::fixed3(b.wall_ms)
                << ",\"sign_ms\":" << detail::fixed3(b.sign_ms)
                << ",\"verify_ms\":" << detail::fixed3(b.verify_ms)
                << ",\"hash_ms\":" << detail::fixed3(b.hash_ms)
                << ",\"other_ms\":" << detail::fixed3(b.other_ms) << "}\n";
        }
    }
    return out.str();
}

inline void emit_report(const BenchReport& r, ReportFormat format,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoFailure, "cannot write " + path);
    std::string text = render_report(r, format);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(Errc::IoFailure, "short write to " + path);
}

// Reads back an emitted CSV report (metadata lines + block rows).
inline BenchReport parse_report_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::IoFailure, "cannot open " + path);
    try {
    BenchReport r;
    std::string line;
    bool in_rows = false;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            std::size_t eq = line.find(" = ");
            if (eq == std::string::npos) continue;
            std::string key = line.substr(2, eq - 2);
            std::string value = line.substr(eq + 3);
            auto as_u64 = [&] { return std::stoull(value); };
            auto as_f = [&] { return std::stod(value); };
            if (key == "scheme")
                r.config.scheme =
                    value == "classical-baseline" ? std::nullopt : std::optional(value);
            else if (key == "accounts") r.config.accounts = as_u64();
            else if (key == "total_txs") r.config.total_txs = as_u64();
            else if (key == "block_size") r.config.block_size = as_u64();
            else if (key == "client_threads") r.config.client_threads = as_u64();
            else if (key == "trim_blocks") r.config.trim_blocks = as_u64();
            else if (key == "seed") r.config.seed = as_u64();
            else if (key == "payload_cap") r.config.payload_cap = as_u64();
            else if (key == "committed") r.committed = as_u64();
            else if (key == "failed") r.failed = as_u64();
            else if (key == "blocks_measured") r.blocks_measured = as_u64();
            else if (key == "total_block_bytes") r.total_block_bytes = as_u64();
            else if (key == "median_block_bytes") r.median_block_bytes = as_u64();
            else if (key == "median_hashed_bytes") r.median_hashed_bytes = as_u64();
            else if (key == "pq_component_bytes") r.pq_component_bytes = as_u64();
            else if (key == "hybrid_signatures") r.hybrid_signatures = as_u64();
            else if (key == "classical_only_signatures")
                r.classical_only_signatures = as_u64();
            else if (key == "median_wall_ms") r.median_wall_ms = as_f();
            else if (key == "mean_wall_ms") r.mean_wall_ms = as_f();
            else if (key == "stddev_wall_ms") r.stddev_wall_ms = as_f();
            else if (key == "median_hash_ms") r.median_hash_ms = as_f();
            else if (key == "throughput_tx_s") r.throughput_tx_s = as_f();
            else if (key == "bucket_sign_ms") r.bucket_sign_ms = as_f();
            else if (key == "bucket_verify_ms") r.bucket_verify_ms = as_f();
            else if (key == "bucket_hash_ms") r.bucket_hash_ms = as_f();
        } else if (line.rfind("block,", 0) == 0) {
            in_rows = true;
        } else if (in_rows && !line.empty()) {
            BlockTiming b;
            unsigned long long number = 0;
            if (std::sscanf(line.c_str(), "%llu,%lf,%lf,%lf,%lf,%lf", &number, &b.wall_ms,
                            &b.sign_ms, &b.verify_ms, &b.hash_ms, &b.other_ms) != 6)
                fail(Errc::MalformedEncoding, "bad report row: " + line);
            b.number = number;
            r.blocks.push_back(b);
        }
    }
    return r;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(Errc::MalformedEncoding, "unparseable report " + path + ": " + e.what());
    }
}

// ============================================================================
// Comparison
// ============================================================================

struct Comparison {
    struct Row {
        std::string scheme;
        double median_wall_ms = 0;
        double delta_wall_ms = 0;
        double median_hash_ms = 0;
        double delta_hash_ms = 0;
        double bucket_sign_ms = 0;
        double delta_sign_ms = 0;
        double bucket_verify_ms = 0;
        double delta_verify_ms = 0;
        double throughput_tx_s = 0;
        std::uint64_t median_block_bytes = 0;
    };
    std::vector<Row> rows; // rows[0] is the baseline
};

inline Comparison compare_runs(const std::vector<BenchReport>& reports) {
    if (reports.size() < 2)
        fail(Errc::ShapeMismatch, "need at least two reports to compare");
    for (std::size_t i = 1; i < reports.size(); ++i)
        if (!reports[0].config.same_shape(reports[i].config))
            fail(Errc::ShapeMismatch,
                 "report " + std::to_string(i) + " has a different workload shape");

    Comparison cmp;
    const BenchReport& base = reports[0];
    for (const BenchReport& r : reports) {
        Comparison::Row row;
        row.scheme = r.config.scheme_label();
        row.median_wall_ms = r.median_wall_ms;
        row.delta_wall_ms = r.median_wall_ms - base.median_wall_ms;
        row.median_hash_ms = r.median_hash_ms;
        row.delta_hash_ms = r.median_hash_ms - base.median_hash_ms;
        row.bucket_sign_ms = r.bucket_sign_ms;
        row.delta_sign_ms = r.bucket_sign_ms - base.bucket_sign_ms;
        row.bucket_verify_ms = r.bucket_verify_ms;
        row.delta_verify_ms = r.bucket_verify_ms - base.bucket_verify_ms;
        row.throughput_tx_s = r.throughput_tx_s;
        row.median_block_bytes = r.median_block_bytes;
        cmp.rows.push_back(row);
    }
    return cmp;
}

inline std::string format_comparison(const Comparison& cmp) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-22s %12s %12s %12s %12s %14s %14s\n", "scheme",
                  "wall_ms", "d_wall", "hash_ms", "d_hash", "tx/s", "block_bytes");
    out << buf;
    for (const auto& r : cmp.rows) {
        std::snprintf(buf, sizeof buf, "%-22s %12.3f %+12.3f %12.3f %+12.3f %14.1f %14lu\n",
                      r.scheme.c_str(), r.median_wall_ms, r.delta_wall_ms, r.median_hash_ms,
                      r.delta_hash_ms, r.throughput_tx_s,
                      static_cast<unsigned long>(r.median_block_bytes));
        out << buf;
    }
    return out.str();
}

} // namespace pqledger

#endif // PQLEDGER_BENCH_HPP
