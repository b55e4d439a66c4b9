// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "blockmark/sim.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace blockmark;

std::uint64_t env_seed_fallback(std::uint64_t flag_seed, bool seed_set) {
    if (seed_set) {
        return flag_seed;
    }
    if (const char* env = std::getenv("BLOCKMARK_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return flag_seed;
}

/// Accepts "1024,2048" and "2^10..2^24" (doubling) size lists, in bits.
std::vector<std::uint64_t> parse_sizes(const std::string& text) {
    std::vector<std::uint64_t> sizes;
    const auto parse_one = [](const std::string& tok) -> std::uint64_t {
        if (tok.rfind("2^", 0) == 0) {
            return 1ULL << std::stoul(tok.substr(2));
        }
        return std::stoull(tok);
    };
    const auto range = text.find("..");
    if (range != std::string::npos) {
        std::uint64_t lo = parse_one(text.substr(0, range));
        const std::uint64_t hi = parse_one(text.substr(range + 2));
        for (; lo <= hi; lo *= 2) {
            sizes.push_back(lo);
        }
        return sizes;
    }
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (!tok.empty()) {
            sizes.push_back(parse_one(tok));
        }
    }
    return sizes;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << content;
}

int cmd_run(const std::string& scenario_path, std::uint64_t seed, bool seed_set,
            const std::string& out_dir) {
    std::ifstream in(scenario_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read scenario file " << scenario_path << '\n';
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    sim::Scenario scenario = sim::Scenario::from_json(buf.str());
    scenario.seed = env_seed_fallback(seed_set ? seed : scenario.seed, seed_set);

    const sim::TradeOutcome outcome = sim::run(scenario);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(out_dir + "/transcript.jsonl", outcome.transcript);
        write_file(out_dir + "/outcome.json", outcome.summary_json() + "\n");
    }
    std::cout << outcome.summary_json() << '\n';
    return 0;  // protocol verdicts are data, not tool failures
}

int cmd_bench(const sim::Scenario& base, const std::string& sizes_text,
              const std::string& out_path) {
    const auto sizes = parse_sizes(sizes_text);
    if (sizes.empty()) {
        std::cerr << "error: empty size list\n";
        return 2;
    }
    const auto rows = sim::sweep(base, sizes);
    const std::string csv = sim::sweep_csv(base.scheme, rows);
    if (!out_path.empty()) {
        write_file(out_path, csv);
    }
    std::cout << csv;
    return 0;
}

int cmd_chunk_opt(std::uint32_t hash_bits, std::uint32_t alpha_num, std::uint32_t alpha_den,
                  std::uint64_t data_bits, const std::string& out_path) {
    const double alpha = static_cast<double>(alpha_num) / alpha_den;
    const double l_star = optimal_chunk_bits(hash_bits, alpha);

    // Byte-aligned candidates around the real-valued optimum.
    const std::uint64_t below = static_cast<std::uint64_t>(l_star / 8) * 8;
    const std::uint64_t above = below + 8;
    const double cost_below = dispute_cost_bits_continuous(data_bits, below, hash_bits, alpha);
    const double cost_above = dispute_cost_bits_continuous(data_bits, above, hash_bits, alpha);
    const std::uint64_t aligned = cost_below <= cost_above ? below : above;

    std::ostringstream os;
    os << "# scheme h=" << hash_bits << " alpha=" << alpha_num << "/" << alpha_den << '\n';
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "optimal_chunk_bits," << l_star << '\n';
    os << "byte_aligned_chunk_bits," << aligned << '\n';
    os << "data_bits," << data_bits << '\n';
    os << "chunk_bits,cost_bits_continuous,cost_bits_discrete\n";
    for (std::uint64_t l = 64; l <= 1024; l += 8) {
        os << l << ',' << dispute_cost_bits_continuous(data_bits, l, hash_bits, alpha) << ','
           << dispute_payload_bits(Variant::OLogN, data_bits, static_cast<std::uint32_t>(l),
                                   hash_bits, alpha_num, alpha_den, 0)
           << '\n';
    }
    const std::string report = os.str();
    if (!out_path.empty()) {
        write_file(out_path, report);
    }
    std::cout << report;
    return 0;
}

int cmd_matrix(const sim::Scenario& base) {
    using sim::BuyerBehavior;
    using sim::SellerBehavior;
    const std::vector<SellerBehavior> sellers = {
        SellerBehavior::Honest,          SellerBehavior::CorruptChunk,
        SellerBehavior::CorruptAllChunks, SellerBehavior::WrongKey,
        SellerBehavior::WrongCommitment,  SellerBehavior::SilentAfterFunding,
        SellerBehavior::ReplaySignedChunk};
    const std::vector<BuyerBehavior> buyers = {
        BuyerBehavior::Honest, BuyerBehavior::FalseDisputeFabricated,
        BuyerBehavior::FalseDisputeGenuineChunk, BuyerBehavior::NoThenAbort,
        BuyerBehavior::SilentAfterPayload};

    std::cout << "# scheme=" << base.scheme.to_string() << '\n';
    std::cout << "variant,seller,buyer,terminal_phase,verdict,oracle,agreement\n";
    bool all_agree = true;
    for (auto s : sellers) {
        for (auto b : buyers) {
            sim::Scenario sc = base;
            sc.seller = {s, 0};
            sc.buyer = {b, 0};
            const sim::TradeOutcome out = sim::run(sc);
            const auto scheme = make_scheme(sc.scheme);
            const auto oracle =
                sim::oracle_adjudicate(*scheme, sim::oracle_inputs_from(out, sc.variant));
            const bool agree =
                out.verdict.has_value() == oracle.has_value() &&
                (!out.verdict || out.verdict->dishonest == oracle->dishonest);
            all_agree = all_agree && agree;
            std::cout << variant_name(sc.variant) << ',' << sim::seller_behavior_name(s) << ','
                      << sim::buyer_behavior_name(b) << ',' << phase_name(out.terminal_phase)
                      << ',' << (out.verdict ? party_name(out.verdict->dishonest) : "none")
                      << ',' << (oracle ? party_name(oracle->dishonest) : "none") << ','
                      << (agree ? "ok" : "MISMATCH") << '\n';
        }
    }
    std::cout << (all_agree ? "# all verdicts agree with oracle\n"
                            : "# MISMATCH between contract and oracle\n");
    return all_agree ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair-exchange data market simulator: deterministic contract, "
                 "adversarial parties, exact cost accounting"};
    app.require_subcommand(1);

    std::string variant_text = "ologn";
    std::uint64_t size_bits = 1ULL << 15;
    std::uint32_t chunk_bits = 256;
    std::uint64_t seed = 1;
    std::uint32_t hash_bits = 256;
    std::pair<std::uint32_t, std::uint32_t> alpha{1, 1};
    std::uint32_t sig_bytes = 65;
    std::string scheme_name = "sha256-ed25519";
    std::string out_path;

    const auto add_scheme_flags = [&](CLI::App* cmd) {
        cmd->add_option("--hash-bits", hash_bits, "hash output width in bits");
        cmd->add_option("--alpha", alpha, "ciphertext expansion as NUM DEN");
        cmd->add_option("--sig-bytes", sig_bytes, "signature width in bytes");
        cmd->add_option("--scheme", scheme_name, "crypto scheme: sha256-ed25519 | toy");
    };
    const auto make_base = [&]() {
        sim::Scenario sc;
        const auto v = parse_variant(variant_text);
        if (!v) {
            throw CLI::ValidationError("--variant must be one of on|ologn|o1");
        }
        sc.variant = *v;
        sc.data_bytes = size_bits / 8;
        sc.chunk_bits = chunk_bits;
        sc.seed = seed;
        sc.scheme.name = scheme_name;
        sc.scheme.hash_bits = hash_bits;
        sc.scheme.alpha_num = alpha.first;
        sc.scheme.alpha_den = alpha.second;
        sc.scheme.signature_bytes = sig_bytes;
        return sc;
    };

    // run
    auto* run_cmd = app.add_subcommand("run", "execute one scenario file");
    std::string scenario_path;
    run_cmd->add_option("--scenario", scenario_path, "scenario JSON path")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "overrides the scenario seed");
    run_cmd->add_option("--out", out_path, "directory for transcript and outcome");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "cost table over a size sweep");
    std::string sizes_text = "2^10..2^20";
    bench_cmd->add_option("--variant", variant_text, "on | ologn | o1");
    bench_cmd->add_option("--sizes", sizes_text, "bits, e.g. 2^10..2^24 or 1024,4096");
    bench_cmd->add_option("--chunk-bits", chunk_bits, "chunk size L in bits");
    auto* bench_seed = bench_cmd->add_option("--seed", seed, "scenario seed");
    add_scheme_flags(bench_cmd);
    bench_cmd->add_option("--out", out_path, "CSV output path");

    // chunk-opt
    auto* opt_cmd = app.add_subcommand("chunk-opt", "chunk-size optimization report");
    std::uint64_t opt_data_bits = 1ULL << 20;
    opt_cmd->add_option("--hash-bits", hash_bits, "hash output width in bits");
    opt_cmd->add_option("--alpha", alpha, "ciphertext expansion as NUM DEN");
    opt_cmd->add_option("--size", opt_data_bits, "data size in bits for the cost curve");
    opt_cmd->add_option("--out", out_path, "report output path");

    // matrix
    auto* matrix_cmd = app.add_subcommand("matrix", "strategy-product verdicts vs oracle");
    matrix_cmd->add_option("--variant", variant_text, "on | ologn | o1");
    matrix_cmd->add_option("--size", size_bits, "data size in bits");
    matrix_cmd->add_option("--chunk-bits", chunk_bits, "chunk size L in bits");
    auto* matrix_seed = matrix_cmd->add_option("--seed", seed, "scenario seed");
    add_scheme_flags(matrix_cmd);

    CLI11_PARSE(app, argc, argv);

    // BLOCKMARK_SEED steps in whenever --seed is absent.
    if (bench_seed->count() == 0 && matrix_seed->count() == 0) {
        seed = env_seed_fallback(seed, false);
    }

    try {
        if (*run_cmd) {
            return cmd_run(scenario_path, seed, seed_opt->count() > 0, out_path);
        }
        if (*bench_cmd) {
            return cmd_bench(make_base(), sizes_text, out_path);
        }
        if (*opt_cmd) {
            return cmd_chunk_opt(hash_bits, alpha.first, alpha.second, opt_data_bits, out_path);
        }
        if (*matrix_cmd) {
            sim::Scenario base = make_base();
            base.data_bytes = size_bits / 8;
            return cmd_matrix(base);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
