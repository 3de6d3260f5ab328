#pragma once

#include <array>
#include <vector>

#include "mistd/detect.hpp"
#include "mistd/tensor.hpp"

namespace mistd {

// 2D Gaussian model of a box: mean (cx,cy), diagonal sqrt-covariance
// (w/2, h/2). Half extents must stay positive.
struct GaussianBox {
    double cx = 0.0;
    double cy = 0.0;
    double half_w = 0.0;
    double half_h = 0.0;
};

GaussianBox to_gaussian(const BBox& b);

struct LossWeights {
    double lambda_reg = 5.0;
    double lambda_cls = 1.0;
    double lambda_obj = 1.0;
    double alpha = 0.5; // IoU share of the dual-view regression loss
    double beta = 0.5;  // NWD share
    double c_nwd = 5.0; // dataset constant of the NWD exponent
};

double iou_loss(const BBox& bp, const BBox& bg);

// 1 - exp(-W2/C) where W2^2 is the squared 2-Wasserstein distance between
// the diagonal Gaussians of the two boxes.
double nwd_loss(const BBox& bp, const BBox& bg, double c_nwd);

// Gradient order (d/dcx, d/dcy, d/dw, d/dh) of the predicted box.
struct DvrResult {
    double value = 0.0;
    std::array<double, 4> grad{0.0, 0.0, 0.0, 0.0};
};

// alpha*iou_loss + beta*nwd_loss with analytic partials. The IoU gradient is
// defined 0 on the zero-overlap plateau; the NWD gradient is defined 0 at
// exactly coincident boxes (the sqrt kink).
DvrResult dvr_loss(const BBox& bp, const BBox& bg, const LossWeights& weights);

// Mean-reduced sigmoid focal loss over {0,1} targets.
double focal_loss(const Tensor& logits, const Tensor& targets, double gamma = 2.0,
                  double alpha_f = 0.25);

struct RegPair {
    BBox pred;
    BBox gt;
};

// lambda_reg * mean(dvr over pairs) + lambda_cls * cls + lambda_obj * obj.
double total_loss(const std::vector<RegPair>& reg_pairs, double cls_term, double obj_term,
                  const LossWeights& weights);

struct FitResult {
    std::vector<BBox> trajectory; // includes the initial box
    bool diverged = false;
};

// Gradient descent on dvr_loss over (cx,cy,w,h) with per-step backtracking:
// the step is halved until the loss does not increase; if no acceptable step
// exists the descent stops.
FitResult fit_box(const BBox& init, const BBox& target, const LossWeights& weights,
                  std::size_t steps, double lr);

} // namespace mistd
