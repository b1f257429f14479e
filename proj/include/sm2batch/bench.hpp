#pragma once

#include <optional>
#include <string_view>

#include "sm2batch/protocol.hpp"

// Benchmark harness: runs one of the batch pipelines against its serial
// Jacobian counterpart on seeded synthetic inputs, measures wall time and
// the operation ledger, and prices the ledger with a relative-latency cost
// model. Both strategies are executed once and compared element-wise before
// anything is timed.

namespace sm2b {

// Relative latencies of the field operations on a scalar core; inversion is
// two to three orders of magnitude above addition.
struct CostModel {
    std::uint64_t c_add = 1;
    std::uint64_t c_mul = 5;
    std::uint64_t c_inv = 500;

    bool valid() const { return c_inv > c_mul && c_mul > c_add && c_add > 0; }
};

// Smallest batch size at which chord additions sharing one inversion
// (1 modinv + 6N modmul + 6N modadd) undercut the inversion-free Jacobian
// pipeline (11N modmul + 6N modadd). Empty when multiplication is free in
// the model and the batch side can never catch up.
std::optional<std::uint64_t> crossover_n(const CostModel& m);

std::uint64_t modeled_cost(const CostModel& m, const OpCountLedger& ops);

enum class BenchOp { padd, fpmul, upmul, sign, verify };
enum class BenchStrategy { affine_batch, jacobian_serial };

const char* to_string(BenchOp op);
const char* to_string(BenchStrategy s);
bool parse_bench_op(std::string_view name, BenchOp& out);
bool parse_bench_strategy(std::string_view name, BenchStrategy& out);

struct BenchSettings {
    BenchOp op = BenchOp::padd;
    BenchStrategy strategy = BenchStrategy::affine_batch;
    std::size_t n = 1 << 12;
    std::size_t lanes = 0;  // 0 picks workers * 4
    unsigned workers = 1;
    std::uint64_t seed = 1;
    unsigned repeats = 5;  // timed runs after one discarded warm-up
};

struct BenchReport {
    BenchSettings settings;
    std::size_t lanes_used = 0;
    double wall_seconds = 0;   // median of the timed runs
    double throughput = 0;     // n / wall_seconds
    OpCountLedger ops;         // ledger delta of one full run
    std::uint64_t modeled = 0; // cost model applied to the ledger
    bool equivalence_checked = false;
};

BenchReport run_bench(const BenchSettings& settings);

}  // namespace sm2b
