#include "sm2batch/batch_invert.hpp"

#include <cassert>
#include <stdexcept>

namespace sm2b {

LanePlan LanePlan::make(std::size_t total, std::size_t lanes) {
    LanePlan p;
    p.total = total;
    if (total == 0) {
        p.lanes = 0;
        return p;
    }
    if (lanes == 0) lanes = 1;
    if (lanes > total) lanes = total;
    p.lanes = lanes;
    p.assignment.reserve(lanes);
    const std::size_t base = total / lanes;
    const std::size_t rem = total % lanes;
    std::size_t at = 0;
    for (std::size_t i = 0; i < lanes; ++i) {
        std::size_t len = base + (i < rem ? 1 : 0);
        p.assignment.push_back({at, at + len});
        at += len;
    }
    assert(at == total);
    return p;
}

LaneCompress compress_lane(std::span<const MontElement> inputs) {
    if (inputs.empty())
        throw std::invalid_argument("compress_lane: empty lane");
    LaneCompress c;
    c.mask = ZeroMask(inputs.size());
    c.prefix.reserve(inputs.size());

    const MontElement one = mont_one(*inputs[0].field);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        bool zero = inputs[k].is_zero();
        c.mask.set(k, zero);
        const MontElement& factor = zero ? one : inputs[k];
        c.prefix.push_back(k == 0 ? factor : mont_mul(c.prefix[k - 1], factor));
    }
    c.tail = c.prefix.back();
    return c;
}

std::vector<MontElement> gather_apply(std::span<const MontElement> tails) {
    assert(!tails.empty());
    const std::size_t n = tails.size();

    std::vector<MontElement> grand;
    grand.reserve(n);
    grand.push_back(tails[0]);
    for (std::size_t i = 1; i < n; ++i)
        grand.push_back(mont_mul(grand[i - 1], tails[i]));

    MontElement running = mod_inv_fermat(grand[n - 1]);

    std::vector<MontElement> inv(n, running);
    for (std::size_t i = n; i-- > 1;) {
        inv[i] = mont_mul(running, grand[i - 1]);
        running = mont_mul(running, tails[i]);
    }
    inv[0] = running;
    return inv;
}

std::vector<MontElement> scatter_decompress(std::span<const MontElement> inputs,
                                            std::span<const MontElement> prefix,
                                            const MontElement& tail_inverse,
                                            const ZeroMask& mask) {
    assert(inputs.size() == prefix.size());
    const std::size_t n = inputs.size();
    const MontElement one = mont_one(*tail_inverse.field);
    const MontElement zero = mont_zero(*tail_inverse.field);

    std::vector<MontElement> out(n, zero);
    MontElement running = tail_inverse;
    for (std::size_t k = n; k-- > 1;) {
        out[k] = mont_mul(running, prefix[k - 1]);
        running = mont_mul(running, mask.get(k) ? one : inputs[k]);
    }
    out[0] = running;
    for (std::size_t k = 0; k < n; ++k)
        if (mask.get(k)) out[k] = zero;
    return out;
}

BatchColumnBuffer batch_invert(const BatchColumnBuffer& inputs,
                               const FieldParams& field, const LanePlan& plan,
                               WorkerPool* pool) {
    if (plan.total != inputs.n)
        throw std::invalid_argument("batch_invert: plan does not match batch size");
    BatchColumnBuffer out = BatchColumnBuffer::make(inputs.n);
    if (inputs.n == 0) return out;

    const std::size_t L = plan.lanes;
    std::vector<std::vector<MontElement>> lane_inputs(L);
    std::vector<LaneCompress> compressed(L);

    run_tasks(pool, L, [&](std::size_t lane) {
        const auto [begin, end] = plan.assignment[lane];
        auto& in = lane_inputs[lane];
        in.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i)
            in.push_back(MontElement{inputs.get(i), &field});
        compressed[lane] = compress_lane(in);
    });

    std::vector<MontElement> tails;
    tails.reserve(L);
    for (const auto& c : compressed) tails.push_back(c.tail);
    std::vector<MontElement> tail_inv = gather_apply(tails);

    run_tasks(pool, L, [&](std::size_t lane) {
        const auto [begin, end] = plan.assignment[lane];
        auto inv = scatter_decompress(lane_inputs[lane], compressed[lane].prefix,
                                      tail_inv[lane], compressed[lane].mask);
        for (std::size_t i = begin; i < end; ++i)
            out.set(i, inv[i - begin].value);
    });

    return out;
}

}  // namespace sm2b
