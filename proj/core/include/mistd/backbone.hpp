#pragma once

#include <vector>

#include "mistd/synth.hpp"
#include "mistd/tensor.hpp"
#include "mistd/weights.hpp"

namespace mistd {

struct BackboneStage {
    std::size_t out_channels = 0;
    std::size_t stride = 1;
};

// Shared per-frame extractor: 3x3 conv + BN + SiLU per stage. The default
// (32,2)(64,2)(c,1) layout has total stride 4.
struct BackboneConfig {
    std::vector<BackboneStage> stages;

    static BackboneConfig with_hidden(std::size_t c) {
        return BackboneConfig{{{c / 4, 2}, {c / 2, 2}, {c, 1}}};
    }
    std::size_t total_stride() const {
        std::size_t s = 1;
        for (const auto& st : stages) s *= st.stride;
        return s;
    }
    std::size_t out_channels() const { return stages.empty() ? 0 : stages.back().out_channels; }
};

void validate(const BackboneConfig& cfg);

// One [1,H,W] frame through every stage.
Tensor extract_frame(const Tensor& frame, const BackboneConfig& cfg, const WeightStore& weights);

// All window frames through the shared weights, stacked to [T,C,H',W'].
Tensor extract(const FrameWindow& window, const BackboneConfig& cfg, const WeightStore& weights);

// Concat[F_S, F_T] on channels, 3x3 conv back to C, BN + SiLU.
Tensor fuse_st(const Tensor& f_s, const Tensor& f_t, const WeightStore& weights);

} // namespace mistd
