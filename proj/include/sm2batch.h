/*
 * sm2batch — batch elliptic-curve cryptography over the SM2 curve.
 *
 * C interface to the shared library. All batch functions take flat arrays
 * of fixed-size big-endian records:
 *   scalars / digests / secrets   32 bytes each
 *   public keys / points          65 bytes each, 0x04 || X || Y
 *   signatures                    64 bytes each, r || s
 *   shared secrets                32 bytes each (x coordinate)
 *
 * Calls return SM2B_OK when the request itself was well-formed; per-lane
 * outcomes are reported through the optional lane_status arrays. When
 * lane_status is NULL and a lane fails, the first failing lane's code is
 * returned instead.
 */

#ifndef SM2BATCH_H
#define SM2BATCH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sm2b_status {
    SM2B_OK = 0,
    SM2B_ERROR_INVALID_ARGUMENT = 1, /* null pointer, zero repeats, ... */
    SM2B_ERROR_MALFORMED_INPUT = 2,  /* undecodable bytes */
    SM2B_ERROR_INVALID_PEER = 3,     /* ECDH peer off curve or at infinity */
    SM2B_ERROR_DEGENERATE = 4,       /* ECDH shared point at infinity */
    SM2B_ERROR_NONCE_EXHAUSTED = 5,  /* signing retries ran out */
    SM2B_ERROR_NO_CROSSOVER = 6,     /* cost model has no break-even point */
    SM2B_ERROR_INTERNAL = 7
} sm2b_status;

/* Opaque execution context: worker pool, lane policy, operation counters.
 * Calls on one context serialize against each other internally; for
 * independent parallel workloads create one context per thread. */
typedef struct sm2b_ctx sm2b_ctx;

/* workers == 0 picks the hardware concurrency; lanes == 0 picks workers*4. */
sm2b_ctx* sm2b_ctx_new(uint32_t workers, uint32_t lanes);
void sm2b_ctx_free(sm2b_ctx* ctx);

const char* sm2b_version(void);
const char* sm2b_status_str(sm2b_status status);

/* Field-operation counters accumulated by this context's calls. */
typedef struct sm2b_op_counts {
    uint64_t modmul;
    uint64_t modadd;
    uint64_t modsub;
    uint64_t modinv;
} sm2b_op_counts;

sm2b_status sm2b_ledger_read(const sm2b_ctx* ctx, sm2b_op_counts* out);
sm2b_status sm2b_ledger_reset(sm2b_ctx* ctx);

/* Generates count key pairs. seed != 0 derives them deterministically,
 * seed == 0 uses system entropy. secrets: 32*count, publics: 65*count. */
sm2b_status sm2b_keygen(sm2b_ctx* ctx, uint64_t seed, size_t count,
                        uint8_t* secrets, uint8_t* publics);

/* ECDSA signature generation. digests/secrets: 32*count each,
 * signatures out: 64*count. nonce_seed as in sm2b_keygen. Failed lanes
 * leave zeroed signatures and set lane_status. */
sm2b_status sm2b_sign(sm2b_ctx* ctx, size_t count, const uint8_t* digests,
                      const uint8_t* secrets, uint64_t nonce_seed,
                      uint8_t* signatures, int32_t* lane_status);

/* ECDSA verification. results[i] is 1 for a valid lane, 0 otherwise;
 * malformed records fail their lane rather than the call. */
sm2b_status sm2b_verify(sm2b_ctx* ctx, size_t count, const uint8_t* digests,
                        const uint8_t* publics, const uint8_t* signatures,
                        uint8_t* results);

/* ECDH: shared[i] = x(secrets[i] * peers[i]), 32 bytes per lane. */
sm2b_status sm2b_ecdh(sm2b_ctx* ctx, size_t count, const uint8_t* secrets,
                      const uint8_t* peers, uint8_t* shared,
                      int32_t* lane_status);

/* Smallest batch size at which batched affine additions undercut the
 * Jacobian pipeline under the given relative latencies. */
sm2b_status sm2b_crossover_n(uint64_t cost_add, uint64_t cost_mul,
                             uint64_t cost_inv, uint64_t* out_n);

typedef struct sm2b_bench_report {
    uint64_t lanes_used;
    double wall_seconds;  /* median of the timed repeats */
    double throughput;    /* operations per second */
    sm2b_op_counts ops;   /* ledger of one full run */
    uint64_t modeled_cost;
    int equivalence_checked; /* both strategies compared equal before timing */
} sm2b_bench_report;

/* op: padd | fpmul | upmul | sign | verify
 * strategy: affine-batch | jacobian-serial
 * Runs on seeded synthetic inputs; both strategies are executed once and
 * compared before any timing. workers == 0 uses the context's pool. */
sm2b_status sm2b_bench_run(sm2b_ctx* ctx, const char* op, const char* strategy,
                           size_t n, size_t lanes, uint32_t workers,
                           uint64_t seed, uint32_t repeats,
                           sm2b_bench_report* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SM2BATCH_H */
