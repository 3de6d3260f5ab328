#pragma once

#include <utility>
#include <vector>

#include "mistd/detect.hpp"

namespace mistd {

struct MatchCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

// One retained prediction with its match outcome, used for ranking.
struct ScoredMatch {
    double score = 0.0;
    bool is_tp = false;
};

struct EvalResult {
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double ap50 = 0.0;
    std::vector<std::pair<double, double>> pr_points; // (recall, precision)
};

// Greedy per-frame matching: predictions in descending score order, each
// takes the highest-IoU unmatched GT with IoU >= iou_thresh.
MatchCounts match(const std::vector<std::vector<BBox>>& preds,
                  const std::vector<std::vector<BBox>>& gts, double iou_thresh = 0.5);

// Per-prediction TP/FP flags of one frame, in input order.
std::vector<bool> match_frame(const std::vector<BBox>& preds, const std::vector<BBox>& gts,
                              double iou_thresh);

// Exact all-point area under the precision-recall envelope.
double average_precision(std::vector<ScoredMatch> matches, std::size_t total_gt);

// One point per unique descending score threshold.
std::vector<std::pair<double, double>> pr_curve(std::vector<ScoredMatch> matches,
                                                std::size_t total_gt);

EvalResult evaluate(const std::vector<std::vector<BBox>>& preds,
                    const std::vector<std::vector<BBox>>& gts, double iou_thresh = 0.5);

} // namespace mistd
