#pragma once

#include <string>

#include "mistd/tensor.hpp"
#include "mistd/weights.hpp"

namespace mistd {

// Adjacent-frame differences d_i = F_{i+1} - F_i stacked on the channel
// axis: [T,C,H,W] -> [(T-1)*C,H,W].
Tensor frame_diffs(const Tensor& f_c);

// F_D = AvgPool(stride 2)(Conv3x3(diffs)).
Tensor encode_motion(const Tensor& diffs, const WeightStore& weights);

// Residual block: conv3x3 -> PReLU -> conv3x3 plus identity skip. The PReLU
// slope is the weight "<prefix>.prelu" (scalar tensor).
Tensor res_block(const Tensor& x, const WeightStore& weights, const std::string& prefix);

// F_u = F_t + up(Conv(F_D)); F_T = ResB2(F_u) + up(ResB1(Conv(F_D))), with
// the Conv(F_D) term shared between both branches.
Tensor enhance(const Tensor& f_t, const Tensor& f_d, const WeightStore& weights);

// Full branch over a [T,C,H,W] stack.
Tensor tdem_forward(const Tensor& f_c, const WeightStore& weights);

} // namespace mistd
