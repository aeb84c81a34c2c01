#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rre/annotation.hpp"
#include "rre/common.hpp"
#include "rre/text_metrics.hpp"
#include "rre/version.hpp"

namespace rre {

struct RecognitionPerImage {
  std::string image_id;
  std::string prediction;  // empty when the submission has no record
  bool predicted = false;
  bool correct = false;   // task 1
  double ned = 0.0;       // task 2
};

struct RecognitionReport {
  Task task = Task::task1;
  double score = 0.0;
  std::size_t n_total = 0;
  std::size_t n_right = 0;  // task 1 only
  std::vector<RecognitionPerImage> per_image;  // ground-truth order
};

// Task 1: exact match on the raw byte string, no normalization. A missing
// prediction counts as wrong.
inline RecognitionReport eval_task1(const LabelSubmission& gt,
                                    const LabelSubmission& pred) {
  if (gt.records.empty()) throw eval_error("task1: ground truth has no records");
  RecognitionReport report;
  report.task = Task::task1;
  report.n_total = gt.records.size();
  for (const auto& rec : gt.records) {
    RecognitionPerImage row;
    row.image_id = rec.image_id;
    if (const std::string* p = pred.find(rec.image_id)) {
      row.predicted = true;
      row.prediction = *p;
      row.correct = (*p == rec.transcript);
    }
    if (row.correct) ++report.n_right;
    report.per_image.push_back(std::move(row));
  }
  report.score = static_cast<double>(report.n_right) /
                 static_cast<double>(report.n_total);
  return report;
}

// Task 2: 1 - mean normalized edit distance, after width folding and ASCII
// case folding on both sides. A missing prediction is scored as the empty
// string.
inline RecognitionReport eval_task2(const LabelSubmission& gt,
                                    const LabelSubmission& pred) {
  if (gt.records.empty()) throw eval_error("task2: ground truth has no records");
  RecognitionReport report;
  report.task = Task::task2;
  report.n_total = gt.records.size();
  double total_ned = 0.0;
  for (const auto& rec : gt.records) {
    RecognitionPerImage row;
    row.image_id = rec.image_id;
    if (const std::string* p = pred.find(rec.image_id)) {
      row.predicted = true;
      row.prediction = *p;
    }
    row.ned = norm_edit_distance(row.prediction, rec.transcript);
    total_ned += row.ned;
    report.per_image.push_back(std::move(row));
  }
  report.score = 1.0 - total_ned / static_cast<double>(report.n_total);
  return report;
}

inline nlohmann::json report_json(const RecognitionReport& r, bool per_image) {
  nlohmann::json j;
  j["toolkit"] = kToolkitName;
  j["version"] = kVersion;
  j["task"] = task_name(r.task);
  j["score"] = r.score;
  j["score_formatted"] = format_score(r.score);
  j["n_total"] = r.n_total;
  if (r.task == Task::task1) j["n_right"] = r.n_right;
  if (per_image) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.per_image) {
      nlohmann::json jr;
      jr["image_id"] = row.image_id;
      jr["predicted"] = row.predicted;
      jr["prediction"] = row.prediction;
      if (r.task == Task::task1)
        jr["correct"] = row.correct;
      else
        jr["ned"] = row.ned;
      rows.push_back(std::move(jr));
    }
    j["per_image"] = std::move(rows);
  }
  return j;
}

}  // namespace rre
