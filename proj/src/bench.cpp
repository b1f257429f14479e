#include "sm2batch/bench.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <stdexcept>

#include "sm2batch/batch_invert.hpp"

namespace sm2b {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Scalar> seeded_scalars(std::uint64_t seed, std::uint64_t stream_tag,
                                   std::size_t n) {
    DeterministicNonceSource src(seed);
    std::vector<Scalar> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(src.scalar_for(stream_tag + i, 0));
    return out;
}

std::vector<AffinePoint> seeded_points(const CurveParams& c, std::uint64_t seed,
                                       std::uint64_t stream_tag, std::size_t n,
                                       const BatchConfig& cfg) {
    std::vector<Scalar> s = seeded_scalars(seed, stream_tag, n);
    return transpose_from_columns(
        c, batch_fpmul(c, s, sm2_base_table(), cfg.plan(n), cfg.pool));
}

std::vector<KeyPair> seeded_keys(const CurveParams& c, std::uint64_t seed,
                                 std::uint64_t stream_tag, std::size_t n,
                                 const BatchConfig& cfg) {
    std::vector<Scalar> secrets = seeded_scalars(seed, stream_tag, n);
    auto pubs = transpose_from_columns(
        c, batch_fpmul(c, secrets, sm2_base_table(), cfg.plan(n), cfg.pool));
    std::vector<KeyPair> keys;
    keys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) keys.push_back({secrets[i], pubs[i]});
    return keys;
}

// Serial baseline for a pairwise addition batch: mixed Jacobian adds with
// the results left unnormalized, as a Jacobian pipeline would.
std::vector<JacobianPoint> serial_padd(const CurveParams& c,
                                       std::span<const AffinePoint> p,
                                       std::span<const AffinePoint> t) {
    std::vector<JacobianPoint> out;
    out.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        out.push_back(padd_jacobian(c, lift_to_jacobian(c, p[i]),
                                    lift_to_jacobian(c, t[i])));
    return out;
}

}  // namespace

std::optional<std::uint64_t> crossover_n(const CostModel& m) {
    // 1*c_inv + 6N*(c_mul + c_add) < 11N*c_mul + 6N*c_add
    //   <=>  c_inv < 5N*c_mul
    if (m.c_mul == 0) return std::nullopt;
    return m.c_inv / (5 * m.c_mul) + 1;
}

std::uint64_t modeled_cost(const CostModel& m, const OpCountLedger& ops) {
    return m.c_add * (ops.modadd + ops.modsub) + m.c_mul * ops.modmul +
           m.c_inv * ops.modinv;
}

const char* to_string(BenchOp op) {
    switch (op) {
        case BenchOp::padd: return "padd";
        case BenchOp::fpmul: return "fpmul";
        case BenchOp::upmul: return "upmul";
        case BenchOp::sign: return "sign";
        case BenchOp::verify: return "verify";
    }
    return "?";
}

const char* to_string(BenchStrategy s) {
    return s == BenchStrategy::affine_batch ? "affine-batch" : "jacobian-serial";
}

bool parse_bench_op(std::string_view name, BenchOp& out) {
    for (BenchOp op : {BenchOp::padd, BenchOp::fpmul, BenchOp::upmul,
                       BenchOp::sign, BenchOp::verify}) {
        if (name == to_string(op)) {
            out = op;
            return true;
        }
    }
    return false;
}

bool parse_bench_strategy(std::string_view name, BenchStrategy& out) {
    for (BenchStrategy s :
         {BenchStrategy::affine_batch, BenchStrategy::jacobian_serial}) {
        if (name == to_string(s)) {
            out = s;
            return true;
        }
    }
    return false;
}

BenchReport run_bench(const BenchSettings& settings) {
    if (settings.n == 0)
        throw std::invalid_argument("run_bench: batch size must be positive");
    if (settings.repeats == 0)
        throw std::invalid_argument("run_bench: repeats must be positive");

    const CurveParams& c = CurveParams::sm2();
    (void)sm2_base_table();  // build outside any measured region

    std::unique_ptr<WorkerPool> pool;
    if (settings.workers > 1)
        pool = std::make_unique<WorkerPool>(settings.workers);
    BatchConfig cfg{settings.lanes, pool.get()};

    const std::size_t n = settings.n;
    BenchReport report;
    report.settings = settings;
    report.lanes_used = cfg.effective_lanes(n);
    const LanePlan plan = cfg.plan(n);

    std::function<void()> run_batch, run_serial;
    std::function<bool()> outputs_agree;

    switch (settings.op) {
        case BenchOp::padd: {
            auto p = seeded_points(c, settings.seed, 0x10000, n, cfg);
            auto t = seeded_points(c, settings.seed, 0x20000, n, cfg);
            auto pb = std::make_shared<BatchPointBuffer>(
                transpose_to_columns(c, p));
            auto tb = std::make_shared<BatchPointBuffer>(
                transpose_to_columns(c, t));
            auto ps = std::make_shared<std::vector<AffinePoint>>(std::move(p));
            auto ts = std::make_shared<std::vector<AffinePoint>>(std::move(t));
            run_batch = [=, &c] { (void)batch_padd(c, *pb, *tb, plan, cfg.pool); };
            run_serial = [=, &c] { (void)serial_padd(c, *ps, *ts); };
            outputs_agree = [=, &c] {
                auto batch = transpose_from_columns(
                    c, batch_padd(c, *pb, *tb, plan, cfg.pool));
                auto serial = serial_padd(c, *ps, *ts);
                for (std::size_t i = 0; i < batch.size(); ++i)
                    if (!(batch[i] == jacobian_to_affine(c, serial[i])))
                        return false;
                return true;
            };
            break;
        }
        case BenchOp::fpmul:
        case BenchOp::upmul: {
            auto scalars = std::make_shared<std::vector<Scalar>>(
                seeded_scalars(settings.seed, 0x30000, n));
            const bool fixed = settings.op == BenchOp::fpmul;
            auto points = std::make_shared<std::vector<AffinePoint>>(
                fixed ? std::vector<AffinePoint>()
                      : seeded_points(c, settings.seed, 0x40000, n, cfg));
            auto pb = std::make_shared<BatchPointBuffer>(
                transpose_to_columns(c, *points));
            auto batch_out = [=, &c] {
                return fixed ? batch_fpmul(c, *scalars, sm2_base_table(), plan,
                                           cfg.pool)
                             : batch_upmul(c, *scalars, *pb, plan, cfg.pool);
            };
            run_batch = [=] { (void)batch_out(); };
            run_serial = [=, &c] {
                for (std::size_t i = 0; i < scalars->size(); ++i)
                    (void)pmul_serial(c, (*scalars)[i],
                                      fixed ? c.generator : (*points)[i]);
            };
            outputs_agree = [=, &c] {
                auto batch = transpose_from_columns(c, batch_out());
                for (std::size_t i = 0; i < scalars->size(); ++i) {
                    AffinePoint want = pmul_serial(
                        c, (*scalars)[i], fixed ? c.generator : (*points)[i]);
                    if (!(batch[i] == want)) return false;
                }
                return true;
            };
            break;
        }
        case BenchOp::sign: {
            auto digests = std::make_shared<std::vector<Scalar>>(
                seeded_scalars(settings.seed, 0x50000, n));
            auto keys = std::make_shared<std::vector<KeyPair>>(
                seeded_keys(c, settings.seed, 0x60000, n, cfg));
            const std::uint64_t seed = settings.seed;
            run_batch = [=, &c] {
                DeterministicNonceSource nonces(seed);
                (void)ecdsa_sign_batch(c, *digests, *keys, nonces, cfg);
            };
            run_serial = [=, &c] {
                DeterministicNonceSource nonces(seed);
                for (std::size_t i = 0; i < digests->size(); ++i)
                    (void)ecdsa_sign_serial(c, (*digests)[i], (*keys)[i],
                                            nonces, i);
            };
            outputs_agree = [=, &c] {
                DeterministicNonceSource n1(seed), n2(seed);
                SignResult batch = ecdsa_sign_batch(c, *digests, *keys, n1, cfg);
                for (std::size_t i = 0; i < digests->size(); ++i) {
                    SignResult serial =
                        ecdsa_sign_serial(c, (*digests)[i], (*keys)[i], n2, i);
                    if (serial.status[0] != batch.status[i]) return false;
                    if (!(serial.sigs[0] == batch.sigs[i])) return false;
                }
                return true;
            };
            break;
        }
        case BenchOp::verify: {
            auto digests = std::make_shared<std::vector<Scalar>>(
                seeded_scalars(settings.seed, 0x50000, n));
            auto keys = seeded_keys(c, settings.seed, 0x60000, n, cfg);
            DeterministicNonceSource nonces(settings.seed);
            SignResult signed_batch =
                ecdsa_sign_batch(c, *digests, keys, nonces, cfg);
            auto sigs = std::make_shared<std::vector<Signature>>(
                std::move(signed_batch.sigs));
            auto pubs = std::make_shared<std::vector<AffinePoint>>();
            pubs->reserve(n);
            for (const auto& k : keys) pubs->push_back(k.pub);
            run_batch = [=, &c] {
                (void)ecdsa_verify_batch(c, *digests, *pubs, *sigs, cfg);
            };
            run_serial = [=, &c] {
                for (std::size_t i = 0; i < digests->size(); ++i)
                    (void)ecdsa_verify_serial(c, (*digests)[i], (*pubs)[i],
                                              (*sigs)[i]);
            };
            outputs_agree = [=, &c] {
                auto batch = ecdsa_verify_batch(c, *digests, *pubs, *sigs, cfg);
                for (std::size_t i = 0; i < digests->size(); ++i)
                    if (batch[i] != ecdsa_verify_serial(c, (*digests)[i],
                                                        (*pubs)[i], (*sigs)[i]))
                        return false;
                return true;
            };
            break;
        }
    }

    // Cross-strategy equivalence gates the timed runs.
    if (!outputs_agree())
        throw std::runtime_error("run_bench: strategies disagree, aborting");
    report.equivalence_checked = true;

    const std::function<void()>& chosen =
        settings.strategy == BenchStrategy::affine_batch ? run_batch
                                                         : run_serial;

    chosen();  // warm-up, discarded

    ledger_reset();
    chosen();
    report.ops = ledger_snapshot();
    ledger_reset();
    report.modeled = modeled_cost(CostModel{}, report.ops);

    std::vector<double> times;
    times.reserve(settings.repeats);
    for (unsigned r = 0; r < settings.repeats; ++r) {
        auto t0 = Clock::now();
        chosen();
        times.push_back(seconds_since(t0));
    }
    std::sort(times.begin(), times.end());
    report.wall_seconds = times[times.size() / 2];
    report.throughput =
        report.wall_seconds > 0 ? double(n) / report.wall_seconds : 0.0;
    return report;
}

}  // namespace sm2b
