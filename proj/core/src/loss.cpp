#include "mistd/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mistd {

namespace {

void require_valid(const BBox& b, const char* who) {
    if (!(b.w > 0.0) || !(b.h > 0.0))
        throw std::invalid_argument(std::string(who) + ": box extents must be positive (w=" +
                                    std::to_string(b.w) + ", h=" + std::to_string(b.h) + ")");
}

} // namespace

GaussianBox to_gaussian(const BBox& b) {
    require_valid(b, "to_gaussian");
    return GaussianBox{b.cx, b.cy, b.w / 2.0, b.h / 2.0};
}

double iou_loss(const BBox& bp, const BBox& bg) {
    require_valid(bp, "iou_loss");
    require_valid(bg, "iou_loss");
    return 1.0 - box_iou(bp, bg);
}

double nwd_loss(const BBox& bp, const BBox& bg, double c_nwd) {
    require_valid(bp, "nwd_loss");
    require_valid(bg, "nwd_loss");
    if (!(c_nwd > 0.0)) throw std::invalid_argument("nwd_loss: C must be positive");
    const double dx = bp.cx - bg.cx;
    const double dy = bp.cy - bg.cy;
    const double dw = bp.w / 2.0 - bg.w / 2.0;
    const double dh = bp.h / 2.0 - bg.h / 2.0;
    const double w2sq = dx * dx + dy * dy + dw * dw + dh * dh;
    return 1.0 - std::exp(-std::sqrt(w2sq) / c_nwd);
}

namespace {

// d(IoU)/d(cx,cy,w,h) of bp. Indicator-based subgradients at the min/max
// kinks; zero on the no-overlap plateau.
std::array<double, 4> iou_grad(const BBox& bp, const BBox& bg) {
    const double px1 = bp.cx - bp.w / 2, px2 = bp.cx + bp.w / 2;
    const double py1 = bp.cy - bp.h / 2, py2 = bp.cy + bp.h / 2;
    const double gx1 = bg.cx - bg.w / 2, gx2 = bg.cx + bg.w / 2;
    const double gy1 = bg.cy - bg.h / 2, gy2 = bg.cy + bg.h / 2;

    const double iw = std::min(px2, gx2) - std::max(px1, gx1);
    const double ih = std::min(py2, gy2) - std::max(py1, gy1);
    if (iw <= 0.0 || ih <= 0.0) return {0.0, 0.0, 0.0, 0.0};

    const double inter = iw * ih;
    const double uni = bp.w * bp.h + bg.w * bg.h - inter;

    // Right-edge active if the predicted box bounds the intersection there.
    const double rx = (px2 < gx2) ? 1.0 : 0.0; // d min_x / d px2
    const double lx = (px1 > gx1) ? 1.0 : 0.0; // d max_x / d px1
    const double ry = (py2 < gy2) ? 1.0 : 0.0;
    const double ly = (py1 > gy1) ? 1.0 : 0.0;

    // d iw / d(cx) = rx - lx; d iw / d(w) = (rx + lx)/2, same pattern in y.
    const double diw_dcx = rx - lx;
    const double diw_dw = 0.5 * (rx + lx);
    const double dih_dcy = ry - ly;
    const double dih_dh = 0.5 * (ry + ly);

    const std::array<double, 4> dI = {diw_dcx * ih, dih_dcy * iw, diw_dw * ih, dih_dh * iw};
    const std::array<double, 4> dAp = {0.0, 0.0, bp.h, bp.w};

    std::array<double, 4> g;
    for (int i = 0; i < 4; ++i) {
        const double dU = dAp[i] - dI[i];
        g[i] = (dI[i] * uni - inter * dU) / (uni * uni);
    }
    return g;
}

std::array<double, 4> nwd_grad(const BBox& bp, const BBox& bg, double c_nwd) {
    const double dx = bp.cx - bg.cx;
    const double dy = bp.cy - bg.cy;
    const double dw = bp.w / 2.0 - bg.w / 2.0;
    const double dh = bp.h / 2.0 - bg.h / 2.0;
    const double w2sq = dx * dx + dy * dy + dw * dw + dh * dh;
    const double w2 = std::sqrt(w2sq);
    if (w2 < 1e-12) return {0.0, 0.0, 0.0, 0.0};
    const double outer = std::exp(-w2 / c_nwd) / (c_nwd * w2);
    // d w2sq / d(w) = dw (chain through the half extent), likewise h.
    return {outer * dx, outer * dy, outer * dw * 0.5, outer * dh * 0.5};
}

} // namespace

DvrResult dvr_loss(const BBox& bp, const BBox& bg, const LossWeights& weights) {
    DvrResult r;
    r.value = weights.alpha * iou_loss(bp, bg) + weights.beta * nwd_loss(bp, bg, weights.c_nwd);
    const auto gi = iou_grad(bp, bg);
    const auto gn = nwd_grad(bp, bg, weights.c_nwd);
    for (int i = 0; i < 4; ++i)
        r.grad[i] = -weights.alpha * gi[i] + weights.beta * gn[i];
    return r;
}

double focal_loss(const Tensor& logits, const Tensor& targets, double gamma, double alpha_f) {
    if (!logits.same_shape(targets))
        throw std::invalid_argument("focal_loss: logits/targets shape mismatch");
    if (logits.size() == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double x = logits[i];
        const double y = targets[i];
        // log(sigmoid(x)) and log(1-sigmoid(x)) in stable form
        const double log_p = -std::log1p(std::exp(-x));
        const double log_q = -x - std::log1p(std::exp(-x));
        const double p = 1.0 / (1.0 + std::exp(-x));
        const double pt = y > 0.5 ? p : 1.0 - p;
        const double at = y > 0.5 ? alpha_f : 1.0 - alpha_f;
        const double log_pt = y > 0.5 ? log_p : log_q;
        sum += -at * std::pow(1.0 - pt, gamma) * log_pt;
    }
    return sum / static_cast<double>(logits.size());
}

double total_loss(const std::vector<RegPair>& reg_pairs, double cls_term, double obj_term,
                  const LossWeights& weights) {
    double reg = 0.0;
    if (!reg_pairs.empty()) {
        for (const RegPair& pair : reg_pairs)
            reg += dvr_loss(pair.pred, pair.gt, weights).value;
        reg /= static_cast<double>(reg_pairs.size());
    }
    return weights.lambda_reg * reg + weights.lambda_cls * cls_term + weights.lambda_obj * obj_term;
}

FitResult fit_box(const BBox& init, const BBox& target, const LossWeights& weights,
                  std::size_t steps, double lr) {
    require_valid(init, "fit_box");
    require_valid(target, "fit_box");
    constexpr double kMinExtent = 1e-3;
    constexpr int kMaxHalvings = 60;

    FitResult result;
    result.trajectory.push_back(init);
    BBox cur = init;
    double cur_loss = dvr_loss(cur, target, weights).value;

    for (std::size_t step = 0; step < steps; ++step) {
        const auto g = dvr_loss(cur, target, weights).grad;
        if (g[0] == 0.0 && g[1] == 0.0 && g[2] == 0.0 && g[3] == 0.0) break;
        double step_lr = lr;
        bool accepted = false;
        BBox cand;
        double cand_loss = 0.0;
        for (int i = 0; i < kMaxHalvings; ++i) {
            cand = cur;
            cand.cx -= step_lr * g[0];
            cand.cy -= step_lr * g[1];
            cand.w = std::max(kMinExtent, cand.w - step_lr * g[2]);
            cand.h = std::max(kMinExtent, cand.h - step_lr * g[3]);
            cand_loss = dvr_loss(cand, target, weights).value;
            if (cand_loss <= cur_loss) {
                accepted = true;
                break;
            }
            step_lr *= 0.5;
        }
        if (!accepted) break; // no descent step exists, we are at a minimum
        cur = cand;
        cur_loss = cand_loss;
        result.trajectory.push_back(cur);
    }
    return result;
}

} // namespace mistd
