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
// pqledger command line:
//
//   pqledger bench run --config <file> [--scheme <name>] [--out <path>]
//   pqledger bench compare <report.csv...>
//   pqledger issue --subject <name> [--subject-scheme <pq>] [--ca-scheme <pq>]
//   pqledger inspect <cert-file>
//   pqledger verify <cert-file> --ca <ca-cert-file> [--no-alt]
//   pqledger migrate --scenario <file>
//   pqledger verify-chain <ledger-file>
//
// Exit code 0 on success; on failure the structured error name goes to
// stderr and the exit code is nonzero.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pqledger/bench.hpp"
#include "pqledger/migration.hpp"

using namespace pqledger;

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::IoFailure, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoFailure, "cannot write " + path);
    out << text;
    if (!out) fail(Errc::IoFailure, "short write to " + path);
}

Registry load_registry(const std::string& profiles_path) {
    if (profiles_path.empty()) return builtin_registry();
    return registry_from_file(profiles_path);
}

Bytes seed_bytes(std::uint64_t seed) { return xof_expand(u64be(seed), kSeedSize); }

int cmd_bench_run(const std::string& config_path, const std::string& scheme,
                  const std::string& out_path, const std::string& format_name,
                  const std::string& profiles_path, const std::string& ledger_out) {
    Registry reg = load_registry(profiles_path);
    BenchConfig cfg = config_path.empty()
                          ? BenchConfig{}
                          : BenchConfig::from_file(ConfigFile::load(config_path));
    if (!scheme.empty()) cfg.scheme = scheme == "none" ? std::nullopt : std::optional(scheme);

    BenchReport report = run_benchmark(
        reg, cfg, ledger_out.empty() ? std::nullopt : std::optional(ledger_out));

    ReportFormat format =
        format_name == "jsonl" ? ReportFormat::JsonLines : ReportFormat::Csv;
    if (!out_path.empty()) emit_report(report, format, out_path);

    std::cout << "scheme            " << report.config.scheme_label() << "\n"
              << "committed         " << report.committed << " / " << cfg.total_txs << "\n"
              << "blocks            " << report.blocks.size() << " (" << report.blocks_measured
              << " measured)\n"
              << "median wall       " << detail::fixed3(report.median_wall_ms) << " ms\n"
              << "median hash       " << detail::fixed3(report.median_hash_ms) << " ms\n"
              << "throughput        " << detail::fixed3(report.throughput_tx_s) << " tx/s\n"
              << "block bytes       " << report.median_block_bytes << " (median)\n";
    if (!out_path.empty()) std::cout << "report written to " << out_path << "\n";
    if (!ledger_out.empty()) std::cout << "ledger written to " << ledger_out << "\n";

    if (report.failed > 0) {
        std::string dominant;
        std::size_t best = 0;
        for (const auto& [name, count] : report.failure_counts)
            if (count > best) dominant = name, best = count;
        std::cerr << "error: " << dominant << ": " << report.failed
                  << " transactions failed\n";
        return 3;
    }
    return 0;
}

int cmd_bench_compare(const std::vector<std::string>& files) {
    std::vector<BenchReport> reports;
    reports.reserve(files.size());
    for (const auto& f : files) reports.push_back(parse_report_csv(f));
    std::cout << format_comparison(compare_runs(reports));
    return 0;
}

int cmd_issue(const std::string& subject, const std::string& subject_scheme,
              const std::string& ca_scheme, std::uint64_t seed, const std::string& out,
              const std::string& ca_out, const std::string& profiles_path) {
    Registry reg = load_registry(profiles_path);
    Bytes master = seed_bytes(seed);

    std::optional<std::string> ca_pq =
        ca_scheme.empty() || ca_scheme == "none" ? std::nullopt : std::optional(ca_scheme);
    CertAuthority ca = make_authority(reg, "root-ca", "ecdsa-p256", ca_pq, view(master));

    KeyPair subject_cls =
        reg.keygen("ecdsa-p256", detail::derive_seed(view(master), subject + "/c"));
    std::optional<SigPart> subject_pq;
    if (!subject_scheme.empty() && subject_scheme != "none") {
        KeyPair kp =
            reg.keygen(subject_scheme, detail::derive_seed(view(master), subject + "/q"));
        subject_pq = SigPart{subject_scheme, kp.public_key};
    }

    HybridCertificate cert = issue_certificate(
        reg, ca, subject, SigPart{"ecdsa-p256", subject_cls.public_key}, subject_pq);
    std::string armored = armor(cert);
    if (out.empty())
        std::cout << armored;
    else
        write_text_file(out, armored);
    if (!ca_out.empty()) write_text_file(ca_out, armor(ca.self_certificate));

    std::cerr << "issued " << cert_kind_name(cert.kind()) << " certificate for '" << subject
              << "' (" << armored.size() << " bytes armored)\n";
    return 0;
}

int cmd_inspect(const std::string& cert_path) {
    std::string text = read_text_file(cert_path);
    HybridCertificate cert = dearmor(text);

    std::cout << "subject           " << cert.body.subject << "\n"
              << "issuer            " << cert.body.issuer << "\n"
              << "serial            " << cert.body.serial << "\n"
              << "kind              " << cert_kind_name(cert.kind()) << "\n"
              << "valid             " << cert.body.valid_from << " .. " << cert.body.valid_to
              << "\n"
              << "classical key     " << cert.body.classical_pk.scheme << " ("
              << cert.body.classical_pk.bytes.size() << " bytes)\n";
    if (auto pq = cert.subject_pq_pk())
        std::cout << "post-quantum key  " << pq->scheme << " (" << pq->bytes.size()
                  << " bytes)\n";
    for (const Extension& ext : cert.body.extensions)
        std::cout << "extension         " << extension_name(ext.id) << " ("
                  << ext.value.size() << " bytes"
                  << (ext.critical ? ", critical" : "") << ")\n";
    std::cout << "outer signature   " << cert.outer_signature.scheme << " ("
              << cert.outer_signature.bytes.size() << " bytes)\n"
              << "raw size          " << cert.encode().size() << " bytes\n"
              << "armored size      " << text.size() << " bytes\n";
    return 0;
}

int cmd_verify(const std::string& cert_path, const std::string& ca_path, bool no_alt,
               const std::string& profiles_path) {
    Registry reg = load_registry(profiles_path);
    HybridCertificate cert = dearmor(read_text_file(cert_path));
    HybridCertificate ca_cert = dearmor(read_text_file(ca_path));

    CertVerdict v = verify_certificate(reg, cert, ca_cert, !no_alt);
    const char* alt = v.alt_ok == CertVerdict::Alt::Accept   ? "accept"
                      : v.alt_ok == CertVerdict::Alt::Reject ? "reject"
                                                             : "skipped";
    std::cout << "kind              " << cert_kind_name(v.kind) << "\n"
              << "classical         " << (v.classical_ok ? "accept" : "reject") << "\n"
              << "alternate         " << alt << "\n";
    if (!v.classical_ok || v.alt_ok == CertVerdict::Alt::Reject) {
        std::cerr << "error: BadClientSignature: certificate failed verification\n";
        return 4;
    }
    return 0;
}

int cmd_migrate(const std::string& scenario_path, std::uint64_t seed,
                const std::string& profiles_path) {
    Registry reg = load_registry(profiles_path);
    Scenario sc = parse_scenario(read_text_file(scenario_path));
    ScenarioReport report = run_scenario(reg, sc, view(seed_bytes(seed)));
    for (const auto& step : report.steps)
        std::cout << (step.ok ? "ok   " : "FAIL ") << step.description << "  -> "
                  << step.detail << "\n";
    if (!report.all_ok()) {
        std::cerr << "error: PreconditionViolated: scenario had failing steps\n";
        return 5;
    }
    return 0;
}

int cmd_verify_chain(const std::string& ledger_path, const std::string& profiles_path) {
    Registry reg = load_registry(profiles_path);
    std::string reason;
    bool ok = verify_chain_file(reg, ledger_path, &reason);
    if (ok) {
        LoadedLedger loaded = load_ledger_file(ledger_path);
        std::size_t txs = 0;
        for (const Block& b : loaded.blocks) txs += b.transactions.size();
        std::cout << "accept: " << loaded.blocks.size() << " blocks, " << txs
                  << " transactions, chain intact\n";
        return 0;
    }
    std::cout << "reject: " << reason << "\n";
    std::cerr << "error: ChainBreak: " << reason << "\n";
    return 6;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid post-quantum signature ledger simulator"};
    app.require_subcommand(1);

    std::string profiles_path;
    app.add_option("--profiles", profiles_path,
                   "scheme profile file (default: built-in table)");

    // bench
    auto* bench = app.add_subcommand("bench", "benchmark harness");
    bench->require_subcommand(1);
    auto* run = bench->add_subcommand("run", "run the pipeline benchmark");
    std::string run_config, run_scheme, run_out, run_format = "csv", run_ledger_out;
    run->add_option("--config", run_config, "bench config file (key = value)");
    run->add_option("--scheme", run_scheme, "post-quantum scheme (or 'none')");
    run->add_option("--out", run_out, "report output path");
    run->add_option("--format", run_format, "csv | jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    run->add_option("--ledger-out", run_ledger_out, "persist the committed chain here");

    auto* compare = bench->add_subcommand("compare", "compare emitted CSV reports");
    std::vector<std::string> compare_files;
    compare->add_option("files", compare_files, "reports (first is the baseline)")
        ->required()
        ->expected(-2);

    // issue
    auto* issue = app.add_subcommand("issue", "issue a certificate");
    std::string issue_subject, issue_subject_scheme, issue_ca_scheme = "falcon-512";
    std::string issue_out, issue_ca_out;
    std::uint64_t issue_seed = 1;
    issue->add_option("--subject", issue_subject, "subject name")->required();
    issue->add_option("--subject-scheme", issue_subject_scheme,
                      "subject post-quantum scheme (or 'none')");
    issue->add_option("--ca-scheme", issue_ca_scheme,
                      "authority post-quantum scheme (or 'none')");
    issue->add_option("--seed", issue_seed, "deterministic key seed");
    issue->add_option("--out", issue_out, "armored certificate path (default: stdout)");
    issue->add_option("--ca-out", issue_ca_out, "also write the authority certificate");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "print certificate contents");
    std::string inspect_path;
    inspect->add_option("cert", inspect_path, "armored certificate file")->required();

    // verify
    auto* verify = app.add_subcommand("verify", "verify a certificate against a CA");
    std::string verify_cert, verify_ca;
    bool verify_no_alt = false;
    verify->add_option("cert", verify_cert, "armored certificate file")->required();
    verify->add_option("--ca", verify_ca, "armored authority certificate")->required();
    verify->add_flag("--no-alt", verify_no_alt, "skip alternate-signature verification");

    // migrate
    auto* migrate = app.add_subcommand("migrate", "replay a migration scenario");
    std::string migrate_scenario;
    std::uint64_t migrate_seed = 1;
    migrate->add_option("--scenario", migrate_scenario, "scenario file")->required();
    migrate->add_option("--seed", migrate_seed, "deterministic key seed");

    // verify-chain
    auto* vchain = app.add_subcommand("verify-chain", "check a persisted ledger file");
    std::string chain_path;
    vchain->add_option("ledger", chain_path, "ledger file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_bench_run(run_config, run_scheme, run_out, run_format, profiles_path,
                                 run_ledger_out);
        if (compare->parsed()) return cmd_bench_compare(compare_files);
        if (issue->parsed())
            return cmd_issue(issue_subject, issue_subject_scheme, issue_ca_scheme,
                             issue_seed, issue_out, issue_ca_out, profiles_path);
        if (inspect->parsed()) return cmd_inspect(inspect_path);
        if (verify->parsed())
            return cmd_verify(verify_cert, verify_ca, verify_no_alt, profiles_path);
        if (migrate->parsed())
            return cmd_migrate(migrate_scenario, migrate_seed, profiles_path);
        if (vchain->parsed()) return cmd_verify_chain(chain_path, profiles_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
