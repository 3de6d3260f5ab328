#pragma once

#include <vector>

#include "mistd/tensor.hpp"
#include "mistd/weights.hpp"

namespace mistd {

// Axis-aligned box (center/size, pixels), single "target" class.
struct BBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
    double score = 1.0;
};

double box_iou(const BBox& a, const BBox& b);

// Per-cell logits of the single-scale anchor-free head.
struct HeadOutput {
    Tensor reg; // [4,H',W'] (dx, dy, log-w, log-h)
    Tensor obj; // [1,H',W']
    Tensor cls; // [1,H',W']
};

// Two parallel stems of 2x(3x3 conv + BN + SiLU); one stem feeds the cls
// head, the other the reg and obj heads (all 1x1).
HeadOutput head_forward(const Tensor& features, const WeightStore& weights);

// cx=(col+dx)*stride, cy=(row+dy)*stride, w=exp(logw)*stride,
// h=exp(logh)*stride, score=sigmoid(obj)*sigmoid(cls). One box per cell,
// row-major cell order.
std::vector<BBox> decode(const HeadOutput& out, std::size_t stride);

// Confidence filter + greedy suppression by descending score; score ties
// keep input order. Survivors sorted by descending score.
std::vector<BBox> nms(std::vector<BBox> boxes, double iou_thresh = 0.65,
                      double conf_thresh = 0.001);

} // namespace mistd
