#include "mistd/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mistd {

double box_iou(const BBox& a, const BBox& b) {
    const double ax1 = a.cx - a.w / 2, ax2 = a.cx + a.w / 2;
    const double ay1 = a.cy - a.h / 2, ay2 = a.cy + a.h / 2;
    const double bx1 = b.cx - b.w / 2, bx2 = b.cx + b.w / 2;
    const double by1 = b.cy - b.h / 2, by2 = b.cy + b.h / 2;
    const double iw = std::max(0.0, std::min(ax2, bx2) - std::max(ax1, bx1));
    const double ih = std::max(0.0, std::min(ay2, by2) - std::max(ay1, by1));
    const double inter = iw * ih;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

Tensor stem_block(const Tensor& x, const WeightStore& w, const std::string& prefix) {
    const std::size_t C = x.extent(0);
    Tensor y = x;
    for (int i = 0; i < 2; ++i) {
        const std::string p = prefix + ".conv" + std::to_string(i);
        ConvSpec spec{C, C, 3, 1, 1, 1, true};
        const Tensor& bias = w.get(p + ".bias");
        y = conv2d(y, w.get(p + ".weight"), &bias, spec);
        y = batch_norm(y, w.get(p + ".bn.gamma"), w.get(p + ".bn.beta"), w.get(p + ".bn.mean"),
                       w.get(p + ".bn.var"));
        y = silu(y);
    }
    return y;
}

Tensor head_1x1(const Tensor& x, const WeightStore& w, const std::string& prefix,
                std::size_t out_channels) {
    ConvSpec spec{x.extent(0), out_channels, 1, 1, 0, 1, true};
    const Tensor& bias = w.get(prefix + ".bias");
    return conv2d(x, w.get(prefix + ".weight"), &bias, spec);
}

} // namespace

HeadOutput head_forward(const Tensor& features, const WeightStore& weights) {
    if (features.rank() != 3)
        throw std::invalid_argument("head_forward: expected rank-3 [C,H,W] features");
    if (!features.all_finite())
        throw std::invalid_argument("head_forward: non-finite features");
    const Tensor cls_stem = stem_block(features, weights, "head.cls_stem");
    const Tensor reg_stem = stem_block(features, weights, "head.reg_stem");
    HeadOutput out;
    out.cls = head_1x1(cls_stem, weights, "head.cls", 1);
    out.reg = head_1x1(reg_stem, weights, "head.reg", 4);
    out.obj = head_1x1(reg_stem, weights, "head.obj", 1);
    return out;
}

std::vector<BBox> decode(const HeadOutput& out, std::size_t stride) {
    if (out.reg.rank() != 3 || out.reg.extent(0) != 4)
        throw std::invalid_argument("decode: reg must be [4,H',W']");
    const std::size_t H = out.reg.extent(1), W = out.reg.extent(2);
    if (out.obj.extent(1) != H || out.obj.extent(2) != W || out.cls.extent(1) != H ||
        out.cls.extent(2) != W)
        throw std::invalid_argument("decode: head planes disagree on H'xW'");
    const double s = static_cast<double>(stride);
    std::vector<BBox> boxes;
    boxes.reserve(H * W);
    for (std::size_t row = 0; row < H; ++row) {
        for (std::size_t col = 0; col < W; ++col) {
            BBox b;
            b.cx = (static_cast<double>(col) + out.reg.at(std::size_t(0), row, col)) * s;
            b.cy = (static_cast<double>(row) + out.reg.at(std::size_t(1), row, col)) * s;
            b.w = std::exp(static_cast<double>(out.reg.at(std::size_t(2), row, col))) * s;
            b.h = std::exp(static_cast<double>(out.reg.at(std::size_t(3), row, col))) * s;
            const double obj = 1.0 / (1.0 + std::exp(-static_cast<double>(
                                                out.obj.at(std::size_t(0), row, col))));
            const double cls = 1.0 / (1.0 + std::exp(-static_cast<double>(
                                                out.cls.at(std::size_t(0), row, col))));
            b.score = obj * cls;
            boxes.push_back(b);
        }
    }
    return boxes;
}

std::vector<BBox> nms(std::vector<BBox> boxes, double iou_thresh, double conf_thresh) {
    std::vector<std::size_t> order(boxes.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return boxes[a].score > boxes[b].score; });

    std::vector<BBox> kept;
    for (std::size_t idx : order) {
        const BBox& cand = boxes[idx];
        if (!(cand.score >= conf_thresh)) continue;
        bool suppressed = false;
        for (const BBox& k : kept) {
            if (box_iou(cand, k) > iou_thresh) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(cand);
    }
    return kept;
}

} // namespace mistd
