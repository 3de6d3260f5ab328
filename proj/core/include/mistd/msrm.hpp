#pragma once

#include "mistd/tensor.hpp"
#include "mistd/weights.hpp"

namespace mistd {

struct NabConfig {
    float gamma = 1.0f;           // residual attention scale
    std::size_t key_channels = 0; // 0 means C/2
};

// Key-value pairs from the four embedding convs; key channel counts of the
// memory and query sides must agree, likewise value channels.
struct MemoryBank {
    Tensor k_m, v_m; // from F_g
    Tensor k_q, v_q; // from F_t
};

MemoryBank build_memory_bank(const Tensor& f_t, const Tensor& f_g, const WeightStore& weights);

// Gate the keyframe by a sigmoid map convolved from the reference frames,
// then mix gated and raw keyframe features: F_l.
Tensor fuse_references(const Tensor& f_c, const WeightStore& weights);

// Non-local attention over the HW positions:
// F_g = gamma * softmax(Q K^T / sqrt(d)) V + F_l.
// attn_out, when given, receives the [HW,HW] attention matrix.
Tensor non_local(const Tensor& f_l, const NabConfig& cfg, const WeightStore& weights,
                 Tensor* attn_out = nullptr);

// Key-value memory read: keys/values embedded from memory (F_g) and query
// (F_t), softmax over the memory axis, read concatenated with V_Q and mixed
// by the 1x1 matching conv. sim_out receives the [HWm,HWq] softmax matrix.
Tensor memory_read(const Tensor& f_t, const Tensor& f_g, const WeightStore& weights,
                   Tensor* sim_out = nullptr);

// Full branch: fuse_references -> non_local -> memory_read.
Tensor msrm_forward(const Tensor& f_c, const NabConfig& cfg, const WeightStore& weights);

} // namespace mistd
