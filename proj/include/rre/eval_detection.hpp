#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rre/annotation.hpp"
#include "rre/common.hpp"
#include "rre/geometry.hpp"
#include "rre/version.hpp"

namespace rre {

struct MatchPair {
  std::size_t det = 0;
  std::size_t gt = 0;
  double iou = 0.0;
  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

// Partition of one image's detections and GT lines after matching. Every
// detection index lands in exactly one of {pairs, unmatched_detections,
// ignored_detections}; every GT index in exactly one of {pairs,
// unmatched_gts, ignored_gts}.
struct MatchResult {
  std::vector<MatchPair> pairs;                   // det index order
  std::vector<std::size_t> unmatched_detections;  // index order
  std::vector<std::size_t> unmatched_gts;
  std::vector<std::size_t> ignored_detections;
  std::vector<std::size_t> ignored_gts;

  std::size_t tp() const { return pairs.size(); }
  std::size_t det_counted() const { return pairs.size() + unmatched_detections.size(); }
  std::size_t gt_counted() const { return pairs.size() + unmatched_gts.size(); }
};

inline double precision_of(std::size_t tp, std::size_t n_det_counted) {
  if (n_det_counted == 0) return 1.0;
  return static_cast<double>(tp) / static_cast<double>(n_det_counted);
}

inline double recall_of(std::size_t tp, std::size_t n_gt_counted) {
  if (n_gt_counted == 0) return 1.0;
  return static_cast<double>(tp) / static_cast<double>(n_gt_counted);
}

inline double f_score_of(double precision, double recall) {
  const double denom = precision + recall;
  if (denom == 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

inline double f_score_of(const MatchResult& m) {
  return f_score_of(precision_of(m.tp(), m.det_counted()),
                    recall_of(m.tp(), m.gt_counted()));
}

namespace det_detail {

// iou[det][gt]; the only place task 3/4 evaluation touches geometry.
inline std::vector<std::vector<double>> iou_matrix(
    const std::vector<Quad>& dets, const std::vector<TextInstance>& gts) {
  std::vector<std::vector<double>> m(dets.size(),
                                     std::vector<double>(gts.size(), 0.0));
  for (std::size_t d = 0; d < dets.size(); ++d)
    for (std::size_t g = 0; g < gts.size(); ++g)
      m[d][g] = iou(dets[d], gts[g].quad);
  return m;
}

inline MatchResult match_with_matrix(const std::vector<std::vector<double>>& iou_m,
                                     const std::vector<TextInstance>& gts,
                                     double threshold) {
  const std::size_t n_dets = iou_m.size();
  const std::size_t n_gts = gts.size();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  // Step 1: each detection claims its max-IoU GT, or none if no IoU clears
  // the threshold. Ties go to the lower GT index.
  std::vector<std::size_t> claim(n_dets, kNone);
  for (std::size_t d = 0; d < n_dets; ++d) {
    double best = threshold;
    for (std::size_t g = 0; g < n_gts; ++g) {
      if (iou_m[d][g] > best) {
        best = iou_m[d][g];
        claim[d] = g;
      }
    }
  }

  // Step 2: a GT claimed by several detections keeps only the max-IoU one
  // (ties to the lower detection index); the losers stay unmatched.
  std::vector<std::size_t> winner(n_gts, kNone);
  for (std::size_t d = 0; d < n_dets; ++d) {
    const std::size_t g = claim[d];
    if (g == kNone) continue;
    if (winner[g] == kNone || iou_m[d][g] > iou_m[winner[g]][g]) winner[g] = d;
  }

  // Step 3: route winners of ignored GTs out of the counted sets.
  MatchResult result;
  std::vector<bool> det_ignored(n_dets, false);
  std::vector<std::size_t> match_of_det(n_dets, kNone);
  for (std::size_t g = 0; g < n_gts; ++g) {
    const std::size_t d = winner[g];
    if (gts[g].ignore) {
      result.ignored_gts.push_back(g);
      if (d != kNone) det_ignored[d] = true;
    } else if (d != kNone) {
      match_of_det[d] = g;
    } else {
      result.unmatched_gts.push_back(g);
    }
  }
  for (std::size_t d = 0; d < n_dets; ++d) {
    if (det_ignored[d])
      result.ignored_detections.push_back(d);
    else if (match_of_det[d] != kNone)
      result.pairs.push_back({d, match_of_det[d], iou_m[d][match_of_det[d]]});
    else
      result.unmatched_detections.push_back(d);
  }
  return result;
}

inline void check_threshold(double threshold) {
  if (!(threshold > 0.0) || !(threshold < 1.0))
    throw eval_error("IoU threshold must lie strictly between 0 and 1, got " +
                     format_threshold(threshold));
}

inline std::vector<Quad> quads_of(const std::vector<DetectionRecord>& records) {
  std::vector<Quad> quads;
  quads.reserve(records.size());
  for (const auto& r : records) quads.push_back(r.quad);
  return quads;
}

}  // namespace det_detail

inline MatchResult match_image(const std::vector<Quad>& dets,
                               const std::vector<TextInstance>& gts,
                               double threshold) {
  det_detail::check_threshold(threshold);
  return det_detail::match_with_matrix(det_detail::iou_matrix(dets, gts), gts,
                                       threshold);
}

inline constexpr double kSelectThreshold = 0.5;

// Picks the GT variant whose matching yields the best per-image F at the
// selection threshold; ties go to the larger tp, then the lower variant
// index. The chosen variant is reused at every reporting threshold.
inline std::pair<std::size_t, MatchResult> select_variant(
    const std::vector<Quad>& dets, const std::vector<GroundTruthVariant>& variants,
    double select_threshold = kSelectThreshold) {
  if (variants.empty()) throw eval_error("image has no ground-truth variants");
  det_detail::check_threshold(select_threshold);
  std::size_t best_idx = 0;
  MatchResult best_match;
  double best_f = -1.0;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    MatchResult m = det_detail::match_with_matrix(
        det_detail::iou_matrix(dets, variants[v].lines), variants[v].lines,
        select_threshold);
    const double f = f_score_of(m);
    if (f > best_f || (f == best_f && m.tp() > best_match.tp())) {
      best_f = f;
      best_idx = v;
      best_match = std::move(m);
    }
  }
  return {best_idx, std::move(best_match)};
}

struct ThresholdMetrics {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  std::size_t tp = 0;
  std::size_t n_det_counted = 0;
  std::size_t n_gt_counted = 0;
};

struct DetectionImageCounts {
  std::size_t tp = 0;
  std::size_t det_counted = 0;
  std::size_t gt_counted = 0;
};

struct DetectionImageRow {
  std::string image_id;
  std::size_t variant = 0;
  bool predicted = false;  // submission had records for this image
  std::vector<DetectionImageCounts> per_threshold;
};

struct DetectionReport {
  Task task = Task::task3;
  double score = 0.0;  // ranking metric: F at IoU 0.5
  std::vector<double> thresholds;
  std::vector<ThresholdMetrics> metrics;  // parallel to thresholds
  std::vector<DetectionImageRow> per_image;
};

inline const std::vector<double>& default_iou_thresholds() {
  static const std::vector<double> kDefault{0.5, 0.7};
  return kDefault;
}

inline DetectionReport eval_task3(const GroundTruth& gt,
                                  const DetectionSubmission& pred,
                                  const std::vector<double>& thresholds =
                                      default_iou_thresholds(),
                                  unsigned jobs = 1, Diagnostics* diag = nullptr) {
  if (gt.images.empty()) throw eval_error("task3: ground truth has no images");
  if (thresholds.empty()) throw eval_error("task3: no IoU thresholds given");
  for (double t : thresholds) det_detail::check_threshold(t);
  for (std::size_t i = 0; i < thresholds.size(); ++i)
    for (std::size_t j = i + 1; j < thresholds.size(); ++j)
      if (thresholds[i] == thresholds[j])
        throw eval_error("task3: duplicate IoU threshold " +
                         format_threshold(thresholds[i]));
  detection_coverage_warnings(gt, pred, diag);

  DetectionReport report;
  report.thresholds = thresholds;
  report.per_image.resize(gt.images.size());

  parallel_for_index(gt.images.size(), jobs, [&](std::size_t i) {
    const GroundTruthEntry& entry = gt.images[i];
    DetectionImageRow& row = report.per_image[i];
    row.image_id = entry.image_id;
    try {
      const std::vector<DetectionRecord>* records = pred.find(entry.image_id);
      row.predicted = records != nullptr;
      const std::vector<Quad> dets =
          records ? det_detail::quads_of(*records) : std::vector<Quad>{};

      auto [variant_idx, selected] = select_variant(dets, entry.variants);
      row.variant = variant_idx;
      const std::vector<TextInstance>& lines = entry.variants[variant_idx].lines;
      const auto iou_m = det_detail::iou_matrix(dets, lines);

      row.per_threshold.reserve(thresholds.size());
      for (double t : thresholds) {
        const MatchResult m =
            t == kSelectThreshold
                ? selected
                : det_detail::match_with_matrix(iou_m, lines, t);
        row.per_threshold.push_back({m.tp(), m.det_counted(), m.gt_counted()});
      }
    } catch (const geometry_error& e) {
      throw geometry_error("image '" + entry.image_id + "': " + e.what());
    }
  });

  report.metrics.resize(thresholds.size());
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    ThresholdMetrics& tm = report.metrics[k];
    tm.threshold = thresholds[k];
    for (const auto& row : report.per_image) {
      tm.tp += row.per_threshold[k].tp;
      tm.n_det_counted += row.per_threshold[k].det_counted;
      tm.n_gt_counted += row.per_threshold[k].gt_counted;
    }
    tm.precision = precision_of(tm.tp, tm.n_det_counted);
    tm.recall = recall_of(tm.tp, tm.n_gt_counted);
    tm.f_score = f_score_of(tm.precision, tm.recall);
  }

  report.score = report.metrics.front().f_score;
  for (std::size_t k = 0; k < thresholds.size(); ++k)
    if (thresholds[k] == 0.5) report.score = report.metrics[k].f_score;
  return report;
}

inline nlohmann::json report_json(const DetectionReport& r, bool per_image) {
  nlohmann::json j;
  j["toolkit"] = kToolkitName;
  j["version"] = kVersion;
  j["task"] = task_name(r.task);
  j["score"] = r.score;
  j["score_formatted"] = format_score(r.score);
  j["iou_thresholds"] = r.thresholds;
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& tm : r.metrics) {
    const std::string key = format_threshold(tm.threshold);
    j["f_" + key] = tm.f_score;
    j["p_" + key] = tm.precision;
    j["r_" + key] = tm.recall;
    nlohmann::json c;
    c["tp"] = tm.tp;
    c["n_det_counted"] = tm.n_det_counted;
    c["n_gt_counted"] = tm.n_gt_counted;
    counts[key] = std::move(c);
  }
  j["counts"] = std::move(counts);
  if (per_image) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.per_image) {
      nlohmann::json jr;
      jr["image_id"] = row.image_id;
      jr["variant"] = row.variant;
      jr["predicted"] = row.predicted;
      nlohmann::json per_t = nlohmann::json::object();
      for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
        nlohmann::json c;
        c["tp"] = row.per_threshold[k].tp;
        c["det_counted"] = row.per_threshold[k].det_counted;
        c["gt_counted"] = row.per_threshold[k].gt_counted;
        per_t[format_threshold(r.thresholds[k])] = std::move(c);
      }
      jr["thresholds"] = std::move(per_t);
      rows.push_back(std::move(jr));
    }
    j["per_image"] = std::move(rows);
  }
  return j;
}

}  // namespace rre
