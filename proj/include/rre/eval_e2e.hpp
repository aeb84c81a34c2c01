#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "rre/annotation.hpp"
#include "rre/common.hpp"
#include "rre/eval_detection.hpp"
#include "rre/text_metrics.hpp"
#include "rre/version.hpp"

namespace rre {

struct E2EImageRow {
  std::string image_id;
  std::size_t variant = 0;
  bool predicted = false;
  std::vector<double> pair_distances;  // matched pairs, detection index order
  std::size_t n_unmatched_gts = 0;     // each contributes a term of 1.0
  std::size_t n_unmatched_dets = 0;    // each contributes a term of 1.0
  double term_sum = 0.0;
  std::size_t n_terms = 0;
};

struct E2EReport {
  Task task = Task::task4;
  double score = 1.0;  // 1 - mean term distance over the corpus
  double term_sum = 0.0;
  std::size_t n_terms = 0;
  std::vector<E2EImageRow> per_image;
};

namespace e2e_detail {

struct VariantTerms {
  std::vector<double> pair_distances;
  std::size_t n_unmatched_gts = 0;
  std::size_t n_unmatched_dets = 0;
  double sum = 0.0;
  std::size_t count = 0;
  std::size_t n_pairs = 0;
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

inline VariantTerms score_variant(const std::vector<DetectionRecord>& records,
                                  const std::vector<Quad>& dets,
                                  const GroundTruthVariant& variant) {
  const MatchResult m = det_detail::match_with_matrix(
      det_detail::iou_matrix(dets, variant.lines), variant.lines,
      kSelectThreshold);
  VariantTerms terms;
  terms.n_pairs = m.pairs.size();
  for (const MatchPair& p : m.pairs) {
    const double d = norm_edit_distance(records[p.det].transcript,
                                        variant.lines[p.gt].transcription);
    terms.pair_distances.push_back(d);
    terms.sum += d;
  }
  terms.n_unmatched_gts = m.unmatched_gts.size();
  terms.n_unmatched_dets = m.unmatched_detections.size();
  terms.sum += static_cast<double>(terms.n_unmatched_gts) +
               static_cast<double>(terms.n_unmatched_dets);
  terms.count = terms.n_pairs + terms.n_unmatched_gts + terms.n_unmatched_dets;
  return terms;
}

}  // namespace e2e_detail

// Task 4: match detections to GT lines at IoU 0.5, then average normalized
// edit distances; every unmatched non-ignored GT and every unmatched
// detection adds a full distance of 1.0. The variant minimizing an image's
// mean term distance wins (ties: more matched pairs, then lower index).
inline E2EReport eval_task4(const GroundTruth& gt, const DetectionSubmission& pred,
                            unsigned jobs = 1, Diagnostics* diag = nullptr) {
  if (gt.images.empty()) throw eval_error("task4: ground truth has no images");
  if (!pred.with_transcripts)
    throw eval_error("task4: submission was parsed without transcripts");
  detection_coverage_warnings(gt, pred, diag);

  E2EReport report;
  report.per_image.resize(gt.images.size());

  parallel_for_index(gt.images.size(), jobs, [&](std::size_t i) {
    const GroundTruthEntry& entry = gt.images[i];
    E2EImageRow& row = report.per_image[i];
    row.image_id = entry.image_id;
    try {
      static const std::vector<DetectionRecord> kNoRecords;
      const std::vector<DetectionRecord>* records = pred.find(entry.image_id);
      row.predicted = records != nullptr;
      if (!records) records = &kNoRecords;
      const std::vector<Quad> dets = det_detail::quads_of(*records);

      e2e_detail::VariantTerms best;
      std::size_t best_idx = 0;
      bool first = true;
      for (std::size_t v = 0; v < entry.variants.size(); ++v) {
        e2e_detail::VariantTerms terms =
            e2e_detail::score_variant(*records, dets, entry.variants[v]);
        if (first || terms.mean() < best.mean() ||
            (terms.mean() == best.mean() && terms.n_pairs > best.n_pairs)) {
          best = std::move(terms);
          best_idx = v;
          first = false;
        }
      }
      row.variant = best_idx;
      row.pair_distances = std::move(best.pair_distances);
      row.n_unmatched_gts = best.n_unmatched_gts;
      row.n_unmatched_dets = best.n_unmatched_dets;
      row.term_sum = best.sum;
      row.n_terms = best.count;
    } catch (const geometry_error& e) {
      throw geometry_error("image '" + entry.image_id + "': " + e.what());
    }
  });

  for (const auto& row : report.per_image) {
    report.term_sum += row.term_sum;
    report.n_terms += row.n_terms;
  }
  report.score = report.n_terms == 0
                     ? 1.0
                     : 1.0 - report.term_sum / static_cast<double>(report.n_terms);
  return report;
}

inline nlohmann::json report_json(const E2EReport& r, bool per_image) {
  nlohmann::json j;
  j["toolkit"] = kToolkitName;
  j["version"] = kVersion;
  j["task"] = task_name(r.task);
  j["score"] = r.score;
  j["score_formatted"] = format_score(r.score);
  j["n_terms"] = r.n_terms;
  j["term_sum"] = r.term_sum;
  if (per_image) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.per_image) {
      nlohmann::json jr;
      jr["image_id"] = row.image_id;
      jr["variant"] = row.variant;
      jr["predicted"] = row.predicted;
      jr["pair_distances"] = row.pair_distances;
      jr["n_unmatched_gts"] = row.n_unmatched_gts;
      jr["n_unmatched_dets"] = row.n_unmatched_dets;
      jr["term_sum"] = row.term_sum;
      jr["n_terms"] = row.n_terms;
      rows.push_back(std::move(jr));
    }
    j["per_image"] = std::move(rows);
  }
  return j;
}

}  // namespace rre
