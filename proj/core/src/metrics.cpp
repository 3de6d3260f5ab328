#include "mistd/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mistd {

std::vector<bool> match_frame(const std::vector<BBox>& preds, const std::vector<BBox>& gts,
                              double iou_thresh) {
    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });

    std::vector<bool> gt_taken(gts.size(), false);
    std::vector<bool> flags(preds.size(), false);
    for (std::size_t idx : order) {
        double best_iou = 0.0;
        std::size_t best_gt = gts.size();
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (gt_taken[g]) continue;
            const double iou = box_iou(preds[idx], gts[g]);
            if (iou >= iou_thresh && iou > best_iou) {
                best_iou = iou;
                best_gt = g;
            }
        }
        if (best_gt < gts.size()) {
            gt_taken[best_gt] = true;
            flags[idx] = true;
        }
    }
    return flags;
}

MatchCounts match(const std::vector<std::vector<BBox>>& preds,
                  const std::vector<std::vector<BBox>>& gts, double iou_thresh) {
    if (preds.size() != gts.size())
        throw std::invalid_argument("match: prediction/GT frame counts differ");
    MatchCounts counts;
    for (std::size_t f = 0; f < preds.size(); ++f) {
        const auto flags = match_frame(preds[f], gts[f], iou_thresh);
        std::size_t frame_tp = 0;
        for (bool tp : flags)
            if (tp) ++frame_tp;
        counts.tp += frame_tp;
        counts.fp += preds[f].size() - frame_tp;
        counts.fn += gts[f].size() - frame_tp;
    }
    return counts;
}

namespace {

void sort_by_score(std::vector<ScoredMatch>& matches) {
    std::stable_sort(matches.begin(), matches.end(),
                     [](const ScoredMatch& a, const ScoredMatch& b) { return a.score > b.score; });
}

} // namespace

double average_precision(std::vector<ScoredMatch> matches, std::size_t total_gt) {
    if (total_gt == 0) return 0.0;
    sort_by_score(matches);

    // Rank-by-rank (recall, precision) points.
    std::vector<double> recalls, precisions;
    std::size_t tp = 0, fp = 0;
    for (const ScoredMatch& m : matches) {
        m.is_tp ? ++tp : ++fp;
        recalls.push_back(static_cast<double>(tp) / static_cast<double>(total_gt));
        precisions.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    }

    // Monotone precision envelope, then exact area over recall increments.
    for (std::size_t i = precisions.size(); i-- > 1;)
        precisions[i - 1] = std::max(precisions[i - 1], precisions[i]);

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < recalls.size(); ++i) {
        ap += (recalls[i] - prev_recall) * precisions[i];
        prev_recall = recalls[i];
    }
    return ap;
}

std::vector<std::pair<double, double>> pr_curve(std::vector<ScoredMatch> matches,
                                                std::size_t total_gt) {
    sort_by_score(matches);
    std::vector<std::pair<double, double>> points;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < matches.size(); ++i) {
        matches[i].is_tp ? ++tp : ++fp;
        const bool last_of_threshold =
            (i + 1 == matches.size()) || (matches[i + 1].score != matches[i].score);
        if (!last_of_threshold) continue;
        const double recall =
            total_gt > 0 ? static_cast<double>(tp) / static_cast<double>(total_gt) : 0.0;
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        points.emplace_back(recall, precision);
    }
    return points;
}

EvalResult evaluate(const std::vector<std::vector<BBox>>& preds,
                    const std::vector<std::vector<BBox>>& gts, double iou_thresh) {
    if (preds.size() != gts.size())
        throw std::invalid_argument("evaluate: prediction/GT frame counts differ");
    EvalResult r;
    std::vector<ScoredMatch> scored;
    std::size_t total_gt = 0;
    for (std::size_t f = 0; f < preds.size(); ++f) {
        const auto flags = match_frame(preds[f], gts[f], iou_thresh);
        for (std::size_t i = 0; i < preds[f].size(); ++i)
            scored.push_back({preds[f][i].score, flags[i]});
        total_gt += gts[f].size();
    }
    for (const ScoredMatch& m : scored) m.is_tp ? ++r.tp : ++r.fp;
    r.fn = total_gt - r.tp;
    if (r.tp + r.fp > 0)
        r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
    if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
    if (r.precision + r.recall > 0.0)
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    r.ap50 = average_precision(scored, total_gt);
    r.pr_points = pr_curve(std::move(scored), total_gt);
    return r;
}

} // namespace mistd
