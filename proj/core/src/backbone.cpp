#include "mistd/backbone.hpp"

#include <stdexcept>
#include <string>

namespace mistd {

void validate(const BackboneConfig& cfg) {
    if (cfg.stages.empty()) throw std::invalid_argument("backbone: no stages configured");
    for (const auto& st : cfg.stages) {
        if (st.stride != 1 && st.stride != 2)
            throw std::invalid_argument("backbone: stage stride must be 1 or 2, got " +
                                        std::to_string(st.stride));
        if (st.out_channels == 0)
            throw std::invalid_argument("backbone: stage with zero output channels");
    }
}

Tensor extract_frame(const Tensor& frame, const BackboneConfig& cfg, const WeightStore& weights) {
    validate(cfg);
    Tensor x = frame;
    if (x.rank() == 2) x = x.reshaped({1, x.extent(0), x.extent(1)});
    if (x.rank() != 3) throw std::invalid_argument("backbone: frame must be [H,W] or [1,H,W]");

    std::size_t in_c = x.extent(0);
    for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
        const std::string p = "backbone.stage" + std::to_string(i);
        const BackboneStage& st = cfg.stages[i];
        ConvSpec spec{in_c, st.out_channels, 3, st.stride, 1, 1, true};
        const Tensor& bias = weights.get(p + ".conv.bias");
        x = conv2d(x, weights.get(p + ".conv.weight"), &bias, spec);
        x = batch_norm(x, weights.get(p + ".bn.gamma"), weights.get(p + ".bn.beta"),
                       weights.get(p + ".bn.mean"), weights.get(p + ".bn.var"));
        x = silu(x);
        in_c = st.out_channels;
    }
    return x;
}

Tensor extract(const FrameWindow& window, const BackboneConfig& cfg, const WeightStore& weights) {
    if (window.frames.empty()) throw std::invalid_argument("backbone: empty frame window");
    const std::size_t H = window.frames[0].extent(0);
    const std::size_t W = window.frames[0].extent(1);
    for (const Tensor& f : window.frames)
        if (f.extent(0) != H || f.extent(1) != W)
            throw std::invalid_argument("backbone: frames have mixed extents");

    std::vector<Tensor> feats;
    feats.reserve(window.frames.size());
    for (const Tensor& f : window.frames) feats.push_back(extract_frame(f, cfg, weights));

    const std::size_t T = feats.size();
    const std::size_t C = feats[0].extent(0), Hf = feats[0].extent(1), Wf = feats[0].extent(2);
    Tensor out({T, C, Hf, Wf});
    for (std::size_t t = 0; t < T; ++t)
        std::copy(feats[t].data(), feats[t].data() + feats[t].size(),
                  out.data() + t * C * Hf * Wf);
    return out;
}

Tensor fuse_st(const Tensor& f_s, const Tensor& f_t, const WeightStore& weights) {
    if (!f_s.same_shape(f_t))
        throw std::invalid_argument("fuse_st: spatial/temporal feature shapes differ");
    const std::size_t C = f_s.extent(0);
    const Tensor cat = concat({f_s, f_t}, 0);
    ConvSpec spec{2 * C, C, 3, 1, 1, 1, true};
    const Tensor& bias = weights.get("fuse_st.conv.bias");
    Tensor y = conv2d(cat, weights.get("fuse_st.conv.weight"), &bias, spec);
    y = batch_norm(y, weights.get("fuse_st.bn.gamma"), weights.get("fuse_st.bn.beta"),
                   weights.get("fuse_st.bn.mean"), weights.get("fuse_st.bn.var"));
    return silu(y);
}

} // namespace mistd
