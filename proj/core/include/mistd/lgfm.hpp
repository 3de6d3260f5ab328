#pragma once

#include <vector>

#include "mistd/tensor.hpp"
#include "mistd/weights.hpp"

namespace mistd {

struct WindowAttnConfig {
    std::size_t window = 8;
    std::size_t heads = 4;
    std::size_t embed = 128;
};

// Amplitude/phase attention in the Fourier domain with a residual return to
// the spatial domain:
//   X = dft2(x); (A, P) = polar(X)
//   A'  = ReLU(PW(ReLU(DW(A))))
//   Ma  = sigmoid(PW(ReLU(DW(channel_pool(A')))))   (single channel)
//   A'' = A' * Ma;  R = A'' - A
//   P'  = sigmoid(PW(ReLU(DW(concat[P, R]))))
//   Mp  = sigmoid(PW(ReLU(DW(channel_pool(P')))))
//   P'' = P' * Mp;  P''' = 2*pi*P'' - pi
//   x'  = x + idft2(A'' cos P''', A'' sin P''')
Tensor freq_enhance(const Tensor& x, const WeightStore& weights);

// Two 3x3 convs (stride 1, BN, SiLU) over the stacked per-frame features.
Tensor conv_branch(const Tensor& stacked, const WeightStore& weights);

// Non-overlapping w x w window multi-head self-attention plus a 2-layer MLP,
// both with residuals; input projected to the embed width and the result to
// the hidden channel count. attn_out, when given, collects one [N,N]
// attention matrix per (window, head).
Tensor swin_branch(const Tensor& stacked, const WindowAttnConfig& cfg, const WeightStore& weights,
                   std::vector<Tensor>* attn_out = nullptr);

// Per-frame freq_enhance over a [T,C,H,W] stack, channel-concatenated.
Tensor lgfm_stack(const Tensor& f_c, const WeightStore& weights);

} // namespace mistd
