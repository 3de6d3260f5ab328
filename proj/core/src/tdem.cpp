#include "mistd/tdem.hpp"

#include <stdexcept>
#include <string>

namespace mistd {

Tensor frame_diffs(const Tensor& f_c) {
    if (f_c.rank() != 4) throw std::invalid_argument("frame_diffs: expected [T,C,H,W]");
    const std::size_t T = f_c.extent(0);
    if (T < 2)
        throw std::invalid_argument("frame_diffs: need at least 2 frames, got " +
                                    std::to_string(T));
    std::vector<Tensor> diffs;
    diffs.reserve(T - 1);
    for (std::size_t t = 0; t + 1 < T; ++t)
        diffs.push_back(sub(slice0(f_c, t + 1), slice0(f_c, t)));
    return concat(diffs, 0);
}

Tensor encode_motion(const Tensor& diffs, const WeightStore& weights) {
    if (diffs.rank() != 3) throw std::invalid_argument("encode_motion: expected [C,H,W]");
    if (diffs.extent(1) < 2 || diffs.extent(2) < 2)
        throw std::invalid_argument("encode_motion: spatial extents must be at least 2");
    const Tensor& weight = weights.get("tdem.encode.weight");
    ConvSpec spec{diffs.extent(0), weight.extent(0), 3, 1, 1, 1, true};
    const Tensor& bias = weights.get("tdem.encode.bias");
    const Tensor conv = conv2d(diffs, weight, &bias, spec);
    return pool2d(conv, PoolMode::Avg, 2, 2);
}

Tensor res_block(const Tensor& x, const WeightStore& weights, const std::string& prefix) {
    const std::size_t C = x.extent(0);
    ConvSpec spec{C, C, 3, 1, 1, 1, true};
    const Tensor& b1 = weights.get(prefix + ".conv1.bias");
    Tensor y = conv2d(x, weights.get(prefix + ".conv1.weight"), &b1, spec);
    y = prelu(y, weights.get(prefix + ".prelu")[0]);
    const Tensor& b2 = weights.get(prefix + ".conv2.bias");
    y = conv2d(y, weights.get(prefix + ".conv2.weight"), &b2, spec);
    return add(y, x);
}

Tensor enhance(const Tensor& f_t, const Tensor& f_d, const WeightStore& weights) {
    if (f_t.rank() != 3 || f_d.rank() != 3)
        throw std::invalid_argument("enhance: expected [C,H,W] inputs");
    if (f_d.extent(1) * 2 != f_t.extent(1) || f_d.extent(2) * 2 != f_t.extent(2))
        throw std::invalid_argument(
            "enhance: motion extents " + std::to_string(f_d.extent(1)) + "x" +
            std::to_string(f_d.extent(2)) + " are not half of keyframe extents " +
            std::to_string(f_t.extent(1)) + "x" + std::to_string(f_t.extent(2)));

    const Tensor& weight = weights.get("tdem.motion.weight");
    if (weight.extent(0) != f_t.extent(0))
        throw std::invalid_argument("enhance: motion conv output channels differ from keyframe");
    ConvSpec spec{f_d.extent(0), weight.extent(0), 3, 1, 1, 1, true};
    const Tensor& bias = weights.get("tdem.motion.bias");
    const Tensor motion = conv2d(f_d, weight, &bias, spec); // shared Conv(F_D)

    const Tensor f_u = add(f_t, upsample_nearest(motion, 2));
    const Tensor branch_a = res_block(f_u, weights, "tdem.resb2");
    const Tensor branch_b = upsample_nearest(res_block(motion, weights, "tdem.resb1"), 2);
    return add(branch_a, branch_b);
}

Tensor tdem_forward(const Tensor& f_c, const WeightStore& weights) {
    const Tensor diffs = frame_diffs(f_c);
    const Tensor f_d = encode_motion(diffs, weights);
    const Tensor f_t = slice0(f_c, f_c.extent(0) - 1);
    return enhance(f_t, f_d, weights);
}

} // namespace mistd
