#pragma once

#include <span>
#include <vector>

#include "sm2batch/batch_buffer.hpp"
#include "sm2batch/field.hpp"
#include "sm2batch/worker_pool.hpp"

// Batch modular inversion via Montgomery's trick, organized as a
// gather/apply/scatter hierarchy: every lane folds its inputs into a running
// product (compress), the lane tails are folded again and inverted once
// (gather + apply), and the inverses are unwound back through each lane
// (scatter + decompress). One modinv per batch, ~3 multiplications per
// element, for any lane count.
//
// Zero inputs are not invertible; they are masked to the multiplicative
// identity during compression and forced to zero on output, so a zero never
// poisons its neighbours' inverses.

namespace sm2b {

using ZeroMask = BitMask;

struct LanePlan {
    std::size_t total = 0;
    std::size_t lanes = 0;
    struct Range {
        std::size_t begin, end;
    };
    std::vector<Range> assignment;  // contiguous, partitions [0, total)

    // Balanced contiguous ranges; lane sizes differ by at most one and every
    // lane is nonempty (lanes is clamped to total).
    static LanePlan make(std::size_t total, std::size_t lanes);
};

struct LaneCompress {
    std::vector<MontElement> prefix;  // prefix[k] = product of inputs[0..k]
    MontElement tail;                 // prefix.back()
    ZeroMask mask;                    // inputs equal to zero
};

// Prefix products of one lane; masked entries contribute the identity.
// Exactly len-1 multiplications.
LaneCompress compress_lane(std::span<const MontElement> inputs);

// Inverts every lane tail with a single modinv: the tails are compressed
// into one grand product, inverted once, and unwound. Tails must be nonzero.
std::vector<MontElement> gather_apply(std::span<const MontElement> tails);

// Reverses one lane's compression: output[k] = inputs[k]^{-1} for unmasked
// entries, zero for masked ones. At most 2*(len-1) multiplications.
std::vector<MontElement> scatter_decompress(std::span<const MontElement> inputs,
                                            std::span<const MontElement> prefix,
                                            const MontElement& tail_inverse,
                                            const ZeroMask& mask);

// Element-wise inverse of a batch (zero maps to zero). Results are identical
// for every lane count and worker count.
BatchColumnBuffer batch_invert(const BatchColumnBuffer& inputs,
                               const FieldParams& field, const LanePlan& plan,
                               WorkerPool* pool = nullptr);

}  // namespace sm2b
