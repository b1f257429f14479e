#include "sm2batch.h"

#include <cstring>
#include <memory>
#include <mutex>
#include <thread>

#include "sm2batch/bench.hpp"
#include "sm2batch/protocol.hpp"

struct sm2b_ctx {
    std::unique_ptr<sm2b::WorkerPool> pool;
    std::size_t lanes = 0;
    std::mutex mu;
    sm2b::OpCountLedger ledger;

    sm2b::BatchConfig cfg() { return {lanes, pool.get()}; }
};

namespace {

using namespace sm2b;

// Folds the calling thread's counter delta into the context at scope exit.
struct LedgerScope {
    sm2b_ctx* ctx;
    OpCountLedger before;

    explicit LedgerScope(sm2b_ctx* c) : ctx(c), before(ledger_snapshot()) {}
    ~LedgerScope() {
        OpCountLedger delta = ledger_snapshot().since(before);
        std::lock_guard<std::mutex> lk(ctx->mu);
        ctx->ledger.add(delta);
    }
};

template <class F>
sm2b_status guarded(F&& f) {
    try {
        return f();
    } catch (const std::bad_alloc&) {
        return SM2B_ERROR_INTERNAL;
    } catch (const std::invalid_argument&) {
        return SM2B_ERROR_MALFORMED_INPUT;
    } catch (const std::out_of_range&) {
        return SM2B_ERROR_MALFORMED_INPUT;
    } catch (...) {
        return SM2B_ERROR_INTERNAL;
    }
}

sm2b_status from_lane(LaneStatus st) {
    switch (st) {
        case LaneStatus::ok: return SM2B_OK;
        case LaneStatus::nonce_exhausted: return SM2B_ERROR_NONCE_EXHAUSTED;
        case LaneStatus::invalid_peer: return SM2B_ERROR_INVALID_PEER;
        case LaneStatus::degenerate_result: return SM2B_ERROR_DEGENERATE;
    }
    return SM2B_ERROR_INTERNAL;
}

// Reports per-lane outcomes; without a status array the first failure
// becomes the call's return code.
sm2b_status report_lanes(std::span<const LaneStatus> lanes,
                         int32_t* lane_status) {
    sm2b_status first = SM2B_OK;
    for (std::size_t i = 0; i < lanes.size(); ++i) {
        sm2b_status st = from_lane(lanes[i]);
        if (lane_status) lane_status[i] = st;
        if (st != SM2B_OK && first == SM2B_OK) first = st;
    }
    return lane_status ? SM2B_OK : first;
}

std::unique_ptr<NonceSource> make_nonce_source(std::uint64_t seed) {
    if (seed != 0)
        return std::make_unique<DeterministicNonceSource>(seed);
    return std::make_unique<SystemNonceSource>();
}

std::vector<Scalar> scalars_from_bytes(const std::uint8_t* data,
                                       std::size_t count) {
    std::vector<Scalar> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(Scalar::from_bytes_be({data + 32 * i, 32}));
    return out;
}

}  // namespace

extern "C" {

sm2b_ctx* sm2b_ctx_new(uint32_t workers, uint32_t lanes) {
    try {
        auto ctx = std::make_unique<sm2b_ctx>();
        unsigned w = workers != 0 ? workers
                                  : std::max(1u, std::thread::hardware_concurrency());
        if (w > 1) ctx->pool = std::make_unique<WorkerPool>(w);
        ctx->lanes = lanes;
        (void)sm2_base_table();  // build tables before any counted call
        (void)CurveParams::sm2();
        return ctx.release();
    } catch (...) {
        return nullptr;
    }
}

void sm2b_ctx_free(sm2b_ctx* ctx) { delete ctx; }

const char* sm2b_version(void) { return "1.0.0"; }

const char* sm2b_status_str(sm2b_status status) {
    switch (status) {
        case SM2B_OK: return "ok";
        case SM2B_ERROR_INVALID_ARGUMENT: return "invalid argument";
        case SM2B_ERROR_MALFORMED_INPUT: return "malformed input";
        case SM2B_ERROR_INVALID_PEER: return "invalid peer point";
        case SM2B_ERROR_DEGENERATE: return "degenerate result";
        case SM2B_ERROR_NONCE_EXHAUSTED: return "nonce retries exhausted";
        case SM2B_ERROR_NO_CROSSOVER: return "cost model has no crossover";
        case SM2B_ERROR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

sm2b_status sm2b_ledger_read(const sm2b_ctx* ctx, sm2b_op_counts* out) {
    if (!ctx || !out) return SM2B_ERROR_INVALID_ARGUMENT;
    auto* mutable_ctx = const_cast<sm2b_ctx*>(ctx);
    std::lock_guard<std::mutex> lk(mutable_ctx->mu);
    out->modmul = ctx->ledger.modmul;
    out->modadd = ctx->ledger.modadd;
    out->modsub = ctx->ledger.modsub;
    out->modinv = ctx->ledger.modinv;
    return SM2B_OK;
}

sm2b_status sm2b_ledger_reset(sm2b_ctx* ctx) {
    if (!ctx) return SM2B_ERROR_INVALID_ARGUMENT;
    std::lock_guard<std::mutex> lk(ctx->mu);
    ctx->ledger = OpCountLedger{};
    return SM2B_OK;
}

sm2b_status sm2b_keygen(sm2b_ctx* ctx, uint64_t seed, size_t count,
                        uint8_t* secrets, uint8_t* publics) {
    if (!ctx || (count > 0 && (!secrets || !publics)))
        return SM2B_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        LedgerScope scope(ctx);
        const CurveParams& c = CurveParams::sm2();
        auto nonces = make_nonce_source(seed);
        // secrets first, public keys in one fixed-base batch
        std::vector<Scalar> ds;
        ds.reserve(count);
        for (size_t i = 0; i < count; ++i)
            ds.push_back(nonces->scalar_for(i, 0));
        BatchConfig cfg = ctx->cfg();
        auto pubs = transpose_from_columns(
            c, batch_fpmul(c, ds, sm2_base_table(), cfg.plan(count), cfg.pool));
        for (size_t i = 0; i < count; ++i) {
            auto sb = ds[i].to_bytes_be();
            std::memcpy(secrets + 32 * i, sb.data(), 32);
            auto pb = encode_point(pubs[i]);
            std::memcpy(publics + 65 * i, pb.data(), 65);
        }
        return SM2B_OK;
    });
}

sm2b_status sm2b_sign(sm2b_ctx* ctx, size_t count, const uint8_t* digests,
                      const uint8_t* secrets, uint64_t nonce_seed,
                      uint8_t* signatures, int32_t* lane_status) {
    if (!ctx || (count > 0 && (!digests || !secrets || !signatures)))
        return SM2B_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        LedgerScope scope(ctx);
        const CurveParams& c = CurveParams::sm2();
        std::vector<Scalar> es = scalars_from_bytes(digests, count);
        std::vector<KeyPair> keys(count);
        for (size_t i = 0; i < count; ++i) {
            Scalar d = Scalar::checked(from_bytes_be({secrets + 32 * i, 32}));
            if (d.is_zero()) throw std::invalid_argument("zero secret key");
            keys[i].secret = d;  // signing never touches the public half
            keys[i].pub = affine_infinity(c);
        }
        auto nonces = make_nonce_source(nonce_seed);
        SignResult r = ecdsa_sign_batch(c, es, keys, *nonces, ctx->cfg());
        std::memset(signatures, 0, 64 * count);
        for (size_t i = 0; i < count; ++i) {
            if (r.status[i] != LaneStatus::ok) continue;
            auto sb = r.sigs[i].to_bytes();
            std::memcpy(signatures + 64 * i, sb.data(), 64);
        }
        return report_lanes(r.status, lane_status);
    });
}

sm2b_status sm2b_verify(sm2b_ctx* ctx, size_t count, const uint8_t* digests,
                        const uint8_t* publics, const uint8_t* signatures,
                        uint8_t* results) {
    if (!ctx || (count > 0 && (!digests || !publics || !signatures || !results)))
        return SM2B_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        LedgerScope scope(ctx);
        const CurveParams& c = CurveParams::sm2();
        std::vector<Scalar> es = scalars_from_bytes(digests, count);
        std::vector<Signature> sigs;
        std::vector<AffinePoint> pubs;
        std::vector<bool> decodable(count, true);
        sigs.reserve(count);
        pubs.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            sigs.push_back(Signature::from_bytes({signatures + 64 * i, 64}));
            try {
                pubs.push_back(decode_point(c, {publics + 65 * i, 65}));
            } catch (const std::invalid_argument&) {
                // malformed key fails its lane, not the call
                decodable[i] = false;
                pubs.push_back(affine_infinity(c));
            }
        }
        std::vector<bool> ok = ecdsa_verify_batch(c, es, pubs, sigs, ctx->cfg());
        for (size_t i = 0; i < count; ++i)
            results[i] = (ok[i] && decodable[i]) ? 1 : 0;
        return SM2B_OK;
    });
}

sm2b_status sm2b_ecdh(sm2b_ctx* ctx, size_t count, const uint8_t* secrets,
                      const uint8_t* peers, uint8_t* shared,
                      int32_t* lane_status) {
    if (!ctx || (count > 0 && (!secrets || !peers || !shared)))
        return SM2B_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        LedgerScope scope(ctx);
        const CurveParams& c = CurveParams::sm2();
        std::vector<Scalar> ds;
        std::vector<AffinePoint> pts;
        std::vector<bool> decodable(count, true);
        ds.reserve(count);
        pts.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            ds.push_back(Scalar::checked(from_bytes_be({secrets + 32 * i, 32})));
            try {
                pts.push_back(decode_point(c, {peers + 65 * i, 65}));
            } catch (const std::invalid_argument&) {
                decodable[i] = false;
                pts.push_back(affine_infinity(c));  // flagged invalid below
            }
        }
        EcdhResult r = ecdh_derive_batch(c, ds, pts, ctx->cfg());
        std::memset(shared, 0, 32 * count);
        for (size_t i = 0; i < count; ++i) {
            if (!decodable[i]) r.status[i] = LaneStatus::invalid_peer;
            if (r.status[i] == LaneStatus::ok)
                std::memcpy(shared + 32 * i, r.shared[i].data(), 32);
        }
        return report_lanes(r.status, lane_status);
    });
}

sm2b_status sm2b_crossover_n(uint64_t cost_add, uint64_t cost_mul,
                             uint64_t cost_inv, uint64_t* out_n) {
    if (!out_n) return SM2B_ERROR_INVALID_ARGUMENT;
    auto n = crossover_n(CostModel{cost_add, cost_mul, cost_inv});
    if (!n) return SM2B_ERROR_NO_CROSSOVER;
    *out_n = *n;
    return SM2B_OK;
}

sm2b_status sm2b_bench_run(sm2b_ctx* ctx, const char* op, const char* strategy,
                           size_t n, size_t lanes, uint32_t workers,
                           uint64_t seed, uint32_t repeats,
                           sm2b_bench_report* out) {
    if (!ctx || !op || !strategy || !out) return SM2B_ERROR_INVALID_ARGUMENT;
    BenchSettings settings;
    if (!parse_bench_op(op, settings.op) ||
        !parse_bench_strategy(strategy, settings.strategy) || n == 0 ||
        repeats == 0)
        return SM2B_ERROR_INVALID_ARGUMENT;
    settings.n = n;
    settings.lanes = lanes;
    settings.workers = workers != 0
                           ? workers
                           : (ctx->pool ? ctx->pool->workers() : 1);
    settings.seed = seed;
    settings.repeats = repeats;
    return guarded([&] {
        BenchReport r = run_bench(settings);
        out->lanes_used = r.lanes_used;
        out->wall_seconds = r.wall_seconds;
        out->throughput = r.throughput;
        out->ops = {r.ops.modmul, r.ops.modadd, r.ops.modsub, r.ops.modinv};
        out->modeled_cost = r.modeled;
        out->equivalence_checked = r.equivalence_checked ? 1 : 0;
        return SM2B_OK;
    });
}

}  // extern "C"
