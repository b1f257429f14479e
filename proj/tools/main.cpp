// Command-line front end for the sm2batch shared library: key generation,
// batch signing/verification, ECDH derivation, benchmarks, and the
// batching break-even analysis. File formats follow the library's wire
// formats; digests are hex text, one 64-character line per digest.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sm2batch.h"

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    std::exit(1);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) fail("short write to " + path);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail("cannot write " + path);
    out << text;
}

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// One 32-byte digest per line of hex text; blank lines are skipped.
std::vector<std::uint8_t> read_digest_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    std::vector<std::uint8_t> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (line.empty()) continue;
        if (line.size() != 64)
            fail(path + ":" + std::to_string(lineno) +
                 ": digest must be 64 hex characters");
        for (std::size_t i = 0; i < 64; i += 2) {
            int hi = hex_nibble(line[i]), lo = hex_nibble(line[i + 1]);
            if (hi < 0 || lo < 0)
                fail(path + ":" + std::to_string(lineno) + ": bad hex digit");
            out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
        }
    }
    return out;
}

std::size_t record_count(const std::vector<std::uint8_t>& data,
                         std::size_t record, const std::string& what) {
    if (record == 0 || data.size() % record != 0)
        fail(what + ": size " + std::to_string(data.size()) +
             " is not a multiple of " + std::to_string(record) + " bytes");
    return data.size() / record;
}

struct CtxGuard {
    sm2b_ctx* ctx;
    CtxGuard(std::uint32_t workers, std::uint32_t lanes)
        : ctx(sm2b_ctx_new(workers, lanes)) {
        if (!ctx) fail("failed to create context");
    }
    ~CtxGuard() { sm2b_ctx_free(ctx); }
};

void check(sm2b_status st, const std::string& what) {
    if (st != SM2B_OK) fail(what + ": " + sm2b_status_str(st));
}

json ledger_json(const sm2b_op_counts& ops) {
    return {{"modmul", ops.modmul},
            {"modadd", ops.modadd},
            {"modsub", ops.modsub},
            {"modinv", ops.modinv}};
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text << "\n";
    else
        write_text(out_path, text + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch SM2 elliptic-curve toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // --workers/--lanes may follow the subcommand

    std::uint32_t workers = 0;  // hardware concurrency
    std::uint32_t lanes = 0;    // workers * 4
    app.add_option("--workers", workers, "worker threads (0 = hardware)");
    app.add_option("--lanes", lanes, "batch lanes (0 = workers*4)");

    // keygen ----------------------------------------------------------------
    auto* keygen = app.add_subcommand("keygen", "generate key pairs");
    std::size_t kg_n = 1;
    std::uint64_t kg_seed = 0;
    std::string kg_secrets, kg_publics;
    keygen->add_option("--n", kg_n, "number of key pairs");
    keygen->add_option("--seed", kg_seed, "deterministic seed (0 = entropy)");
    keygen->add_option("--out-secrets", kg_secrets, "secret keys, 32B records")
        ->required();
    keygen->add_option("--out-publics", kg_publics, "public keys, 65B records")
        ->required();

    // sign ------------------------------------------------------------------
    auto* sign = app.add_subcommand("sign", "batch ECDSA signing");
    std::string sg_digests, sg_secrets, sg_out;
    std::uint64_t sg_seed = 0;
    sign->add_option("--digests", sg_digests, "hex digests, one per line")
        ->required();
    sign->add_option("--secrets", sg_secrets, "secret keys, 32B records")
        ->required();
    sign->add_option("--seed", sg_seed, "nonce seed (0 = entropy)");
    sign->add_option("--out", sg_out, "signatures, 64B records")->required();

    // verify ----------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "batch ECDSA verification");
    std::string vf_digests, vf_publics, vf_sigs;
    verify->add_option("--digests", vf_digests, "hex digests, one per line")
        ->required();
    verify->add_option("--publics", vf_publics, "public keys, 65B records")
        ->required();
    verify->add_option("--sigs", vf_sigs, "signatures, 64B records")->required();

    // ecdh ------------------------------------------------------------------
    auto* ecdh = app.add_subcommand("ecdh", "batch ECDH derivation");
    std::string dh_secrets, dh_peers, dh_out;
    ecdh->add_option("--secrets", dh_secrets, "secret keys, 32B records")
        ->required();
    ecdh->add_option("--peers", dh_peers, "peer publics, 65B records")
        ->required();
    ecdh->add_option("--out", dh_out, "shared secrets, 32B records")->required();

    // bench -----------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "throughput benchmark");
    std::string bn_op = "padd", bn_strategy = "affine-batch";
    std::size_t bn_n = 1 << 12;
    std::uint64_t bn_seed = 1;
    std::uint32_t bn_repeats = 5;
    std::string bn_format = "json", bn_out;
    bench->add_option("--op", bn_op, "padd|fpmul|upmul|sign|verify");
    bench->add_option("--strategy", bn_strategy,
                      "affine-batch|jacobian-serial");
    bench->add_option("--n", bn_n, "batch size");
    bench->add_option("--seed", bn_seed, "input seed");
    bench->add_option("--repeats", bn_repeats, "timed repetitions (median)");
    bench->add_option("--format", bn_format, "json|csv");
    bench->add_option("--out", bn_out, "report path (default stdout)");

    // crossover ---------------------------------------------------------
    auto* crossover = app.add_subcommand(
        "crossover", "batching break-even batch size for a cost model");
    std::uint64_t cx_add = 1, cx_mul = 5, cx_inv = 500;
    std::string cx_format = "text", cx_out;
    crossover->add_option("--c-add", cx_add, "modadd cost");
    crossover->add_option("--c-mul", cx_mul, "modmul cost");
    crossover->add_option("--c-inv", cx_inv, "modinv cost");
    crossover->add_option("--format", cx_format, "text|json");
    crossover->add_option("--out", cx_out, "report path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (keygen->parsed()) {
        CtxGuard g(workers, lanes);
        std::vector<std::uint8_t> secrets(32 * kg_n), publics(65 * kg_n);
        check(sm2b_keygen(g.ctx, kg_seed, kg_n, secrets.data(), publics.data()),
              "keygen");
        write_file(kg_secrets, secrets);
        write_file(kg_publics, publics);
        std::cout << "wrote " << kg_n << " key pair(s)\n";
        return 0;
    }

    if (sign->parsed()) {
        CtxGuard g(workers, lanes);
        auto digests = read_digest_lines(sg_digests);
        auto secrets = read_file(sg_secrets);
        std::size_t n = record_count(digests, 32, "digests");
        if (record_count(secrets, 32, sg_secrets) != n)
            fail("digest and secret counts differ");
        std::vector<std::uint8_t> sigs(64 * n);
        std::vector<std::int32_t> status(n);
        check(sm2b_sign(g.ctx, n, digests.data(), secrets.data(), sg_seed,
                        sigs.data(), status.data()),
              "sign");
        for (std::size_t i = 0; i < n; ++i)
            if (status[i] != SM2B_OK)
                fail("lane " + std::to_string(i) + ": " +
                     sm2b_status_str(static_cast<sm2b_status>(status[i])));
        write_file(sg_out, sigs);
        std::cout << "signed " << n << " digest(s)\n";
        return 0;
    }

    if (verify->parsed()) {
        CtxGuard g(workers, lanes);
        auto digests = read_digest_lines(vf_digests);
        auto publics = read_file(vf_publics);
        auto sigs = read_file(vf_sigs);
        std::size_t n = record_count(digests, 32, "digests");
        if (record_count(publics, 65, vf_publics) != n ||
            record_count(sigs, 64, vf_sigs) != n)
            fail("digest, public and signature counts differ");
        std::vector<std::uint8_t> results(n);
        check(sm2b_verify(g.ctx, n, digests.data(), publics.data(), sigs.data(),
                          results.data()),
              "verify");
        std::size_t good = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (results[i]) {
                ++good;
            } else {
                std::cout << "lane " << i << ": INVALID\n";
            }
        }
        std::cout << good << "/" << n << " signature(s) valid\n";
        return good == n ? 0 : 1;
    }

    if (ecdh->parsed()) {
        CtxGuard g(workers, lanes);
        auto secrets = read_file(dh_secrets);
        auto peers = read_file(dh_peers);
        std::size_t n = record_count(secrets, 32, dh_secrets);
        if (record_count(peers, 65, dh_peers) != n)
            fail("secret and peer counts differ");
        std::vector<std::uint8_t> shared(32 * n);
        std::vector<std::int32_t> status(n);
        check(sm2b_ecdh(g.ctx, n, secrets.data(), peers.data(), shared.data(),
                        status.data()),
              "ecdh");
        for (std::size_t i = 0; i < n; ++i)
            if (status[i] != SM2B_OK)
                fail("lane " + std::to_string(i) + ": " +
                     sm2b_status_str(static_cast<sm2b_status>(status[i])));
        write_file(dh_out, shared);
        std::cout << "derived " << n << " shared secret(s)\n";
        return 0;
    }

    if (bench->parsed()) {
        if (bn_format != "json" && bn_format != "csv")
            fail("unknown format: " + bn_format);
        CtxGuard g(workers, lanes);
        sm2b_bench_report r{};
        check(sm2b_bench_run(g.ctx, bn_op.c_str(), bn_strategy.c_str(), bn_n,
                             lanes, workers, bn_seed, bn_repeats, &r),
              "bench");
        if (bn_format == "json") {
            json j{{"tool", "sm2batch"},
                   {"version", sm2b_version()},
                   {"op", bn_op},
                   {"strategy", bn_strategy},
                   {"n", bn_n},
                   {"lanes", r.lanes_used},
                   {"workers", workers},
                   {"seed", bn_seed},
                   {"repeats", bn_repeats},
                   {"wall_seconds", r.wall_seconds},
                   {"throughput_ops_per_sec", r.throughput},
                   {"ledger", ledger_json(r.ops)},
                   {"modeled_cost", r.modeled_cost},
                   {"equivalence_checked", r.equivalence_checked != 0}};
            emit(j.dump(2), bn_out);
        } else {
            std::string header =
                "op,strategy,n,lanes,workers,seed,repeats,wall_seconds,"
                "throughput_ops_per_sec,modmul,modadd,modsub,modinv,"
                "modeled_cost";
            std::string row = bn_op + "," + bn_strategy + "," +
                              std::to_string(bn_n) + "," +
                              std::to_string(r.lanes_used) + "," +
                              std::to_string(workers) + "," +
                              std::to_string(bn_seed) + "," +
                              std::to_string(bn_repeats) + "," +
                              std::to_string(r.wall_seconds) + "," +
                              std::to_string(r.throughput) + "," +
                              std::to_string(r.ops.modmul) + "," +
                              std::to_string(r.ops.modadd) + "," +
                              std::to_string(r.ops.modsub) + "," +
                              std::to_string(r.ops.modinv) + "," +
                              std::to_string(r.modeled_cost);
            emit(header + "\n" + row, bn_out);
        }
        return 0;
    }

    if (crossover->parsed()) {
        std::uint64_t n = 0;
        sm2b_status st = sm2b_crossover_n(cx_add, cx_mul, cx_inv, &n);
        if (st == SM2B_ERROR_NO_CROSSOVER) {
            emit(cx_format == "json"
                     ? json{{"c_add", cx_add},
                            {"c_mul", cx_mul},
                            {"c_inv", cx_inv},
                            {"crossover_n", nullptr}}
                           .dump(2)
                     : std::string("no crossover for this cost model"),
                 cx_out);
            return 0;
        }
        check(st, "crossover");
        if (cx_format == "json") {
            emit(json{{"c_add", cx_add},
                      {"c_mul", cx_mul},
                      {"c_inv", cx_inv},
                      {"crossover_n", n}}
                     .dump(2),
                 cx_out);
        } else {
            emit("batching wins for batch sizes >= " + std::to_string(n),
                 cx_out);
        }
        return 0;
    }

    return 0;
}
