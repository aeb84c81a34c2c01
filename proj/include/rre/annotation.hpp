#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "rre/geometry.hpp"
#include "rre/text_metrics.hpp"

namespace rre {

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse-time warnings (winding, degenerate boxes, coverage gaps). Callers
// that do not care pass nullptr.
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string msg) { warnings.push_back(std::move(msg)); }
};

inline void diag_warn(Diagnostics* d, std::string msg) {
  if (d) d->warn(std::move(msg));
}

struct TextInstance {
  Quad quad;
  std::string transcription;
  bool ignore = false;
  friend bool operator==(const TextInstance&, const TextInstance&) = default;
};

struct GroundTruthVariant {
  std::vector<TextInstance> lines;
  friend bool operator==(const GroundTruthVariant&, const GroundTruthVariant&) = default;
};

struct GroundTruthEntry {
  std::string image_id;
  std::vector<GroundTruthVariant> variants;  // length >= 1
  friend bool operator==(const GroundTruthEntry&, const GroundTruthEntry&) = default;
};

struct GroundTruth {
  std::vector<GroundTruthEntry> images;  // file order
  std::unordered_map<std::string, std::size_t> index;

  const GroundTruthEntry* find(const std::string& image_id) const {
    auto it = index.find(image_id);
    return it == index.end() ? nullptr : &images[it->second];
  }
  friend bool operator==(const GroundTruth& a, const GroundTruth& b) {
    return a.images == b.images;
  }
};

struct LabelRecord {
  std::string image_id;
  std::string transcript;
};

// Flat id -> transcript map used for tasks 1 and 2 (both GT and predictions).
struct LabelSubmission {
  std::vector<LabelRecord> records;  // file order
  std::unordered_map<std::string, std::size_t> index;

  const std::string* find(const std::string& image_id) const {
    auto it = index.find(image_id);
    return it == index.end() ? nullptr : &records[it->second].transcript;
  }
};

struct DetectionRecord {
  Quad quad;
  std::string transcript;  // empty unless the submission carries transcripts
  std::size_t source_line = 0;
};

struct DetectionSubmission {
  bool with_transcripts = false;
  std::vector<std::string> image_order;  // first-appearance order
  std::unordered_map<std::string, std::vector<DetectionRecord>> by_image;

  const std::vector<DetectionRecord>* find(const std::string& image_id) const {
    auto it = by_image.find(image_id);
    return it == by_image.end() ? nullptr : &it->second;
  }
};

namespace io_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw parse_error(path + ": read failure");
  return ss.str();
}

// Splits on '\n', accepts CRLF, keeps line numbers 1-based.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++lineno;
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(lineno, line);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline double parse_coord(std::string_view token, const std::string& path,
                          std::size_t lineno) {
  const std::string_view t = trim(token);
  double value = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || t.empty() || !std::isfinite(value))
    throw parse_error(path + ":" + std::to_string(lineno) +
                      ": non-numeric coordinate '" + std::string(token) + "'");
  return value;
}

inline void check_utf8(std::string_view text, const std::string& path,
                       std::size_t lineno) {
  try {
    utf8_decode(text);
  } catch (const unicode_error& e) {
    throw parse_error(path + ":" + std::to_string(lineno) + ": " + e.what());
  }
}

inline void quad_warnings(const Quad& q, const std::string& where, Diagnostics* diag) {
  if (quad_area(q) == 0.0) {
    diag_warn(diag, where + ": degenerate quad (zero area)");
  } else if (is_self_intersecting(q)) {
    diag_warn(diag, where + ": self-intersecting quad (cannot be scored)");
  } else if (!is_clockwise(q)) {
    diag_warn(diag, where + ": vertices are not in clockwise order");
  }
}

}  // namespace io_detail

// Ground-truth file: UTF-8 JSON, top-level array of images, each
// {"image_id": ..., "variants": [{"lines": [{"points": [8 numbers],
// "transcription": ..., "ignore": bool}]}]}. GT quads must be simple and
// non-degenerate; winding is only warned about.
inline GroundTruth parse_ground_truth(const std::string& path,
                                      Diagnostics* diag = nullptr) {
  using nlohmann::json;
  const std::string text = io_detail::read_file(path);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(path + ": " + e.what());
  }
  if (!root.is_array())
    throw parse_error(path + ": top-level value must be an array of images");

  GroundTruth gt;
  for (std::size_t img_idx = 0; img_idx < root.size(); ++img_idx) {
    const json& jimg = root[img_idx];
    const std::string img_ctx = path + ": image[" + std::to_string(img_idx) + "]";
    if (!jimg.is_object()) throw parse_error(img_ctx + ": expected an object");
    if (!jimg.contains("image_id") || !jimg["image_id"].is_string())
      throw parse_error(img_ctx + ": missing string field 'image_id'");

    GroundTruthEntry entry;
    entry.image_id = jimg["image_id"].get<std::string>();
    if (entry.image_id.empty()) throw parse_error(img_ctx + ": empty image_id");
    const std::string ctx = img_ctx + " '" + entry.image_id + "'";
    if (gt.index.count(entry.image_id))
      throw parse_error(ctx + ": duplicate image id");

    if (!jimg.contains("variants") || !jimg["variants"].is_array() ||
        jimg["variants"].empty())
      throw parse_error(ctx + ": field 'variants' must be a non-empty array");

    for (std::size_t v = 0; v < jimg["variants"].size(); ++v) {
      const json& jvar = jimg["variants"][v];
      const std::string vctx = ctx + " variant " + std::to_string(v);
      if (!jvar.is_object() || !jvar.contains("lines") || !jvar["lines"].is_array())
        throw parse_error(vctx + ": expected an object with array field 'lines'");

      GroundTruthVariant variant;
      for (std::size_t li = 0; li < jvar["lines"].size(); ++li) {
        const json& jline = jvar["lines"][li];
        const std::string lctx = vctx + " line " + std::to_string(li);
        if (!jline.is_object()) throw parse_error(lctx + ": expected an object");
        if (!jline.contains("points") || !jline["points"].is_array())
          throw parse_error(lctx + ": missing array field 'points'");
        const json& jpts = jline["points"];
        if (jpts.size() != 8)
          throw parse_error(lctx + ": expected 8 coordinates, got " +
                            std::to_string(jpts.size()));
        std::array<double, 8> coords{};
        for (std::size_t k = 0; k < 8; ++k) {
          if (!jpts[k].is_number())
            throw parse_error(lctx + ": non-numeric coordinate at position " +
                              std::to_string(k));
          coords[k] = jpts[k].get<double>();
          if (!std::isfinite(coords[k]))
            throw parse_error(lctx + ": non-finite coordinate at position " +
                              std::to_string(k));
        }
        if (!jline.contains("transcription") || !jline["transcription"].is_string())
          throw parse_error(lctx + ": missing string field 'transcription'");

        TextInstance inst;
        inst.quad = make_quad(coords);
        inst.transcription = jline["transcription"].get<std::string>();
        if (jline.contains("ignore")) {
          if (!jline["ignore"].is_boolean())
            throw parse_error(lctx + ": field 'ignore' must be a boolean");
          inst.ignore = jline["ignore"].get<bool>();
        }
        if (is_self_intersecting(inst.quad))
          throw parse_error(lctx + ": self-intersecting quad");
        if (quad_area(inst.quad) == 0.0)
          throw parse_error(lctx + ": degenerate quad (zero area)");
        if (!is_clockwise(inst.quad))
          diag_warn(diag, lctx + ": vertices are not in clockwise order");
        variant.lines.push_back(std::move(inst));
      }
      entry.variants.push_back(std::move(variant));
    }
    gt.index.emplace(entry.image_id, gt.images.size());
    gt.images.push_back(std::move(entry));
  }
  return gt;
}

inline nlohmann::json ground_truth_to_json(const GroundTruth& gt) {
  nlohmann::json root = nlohmann::json::array();
  for (const auto& entry : gt.images) {
    nlohmann::json jimg;
    jimg["image_id"] = entry.image_id;
    jimg["variants"] = nlohmann::json::array();
    for (const auto& variant : entry.variants) {
      nlohmann::json jvar;
      jvar["lines"] = nlohmann::json::array();
      for (const auto& line : variant.lines) {
        nlohmann::json jline;
        jline["points"] = {line.quad.v[0].x, line.quad.v[0].y, line.quad.v[1].x,
                           line.quad.v[1].y, line.quad.v[2].x, line.quad.v[2].y,
                           line.quad.v[3].x, line.quad.v[3].y};
        jline["transcription"] = line.transcription;
        jline["ignore"] = line.ignore;
        jvar["lines"].push_back(std::move(jline));
      }
      jimg["variants"].push_back(std::move(jvar));
    }
    root.push_back(std::move(jimg));
  }
  return root;
}

// Label file (tasks 1 and 2): one record per line, "id<TAB>transcript",
// transcript is the remainder of the line and may be empty. Blank lines are
// skipped.
inline LabelSubmission parse_label_submission(const std::string& path,
                                              Diagnostics* diag = nullptr) {
  (void)diag;
  const std::string text = io_detail::read_file(path);
  LabelSubmission sub;
  io_detail::for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    if (line.empty()) return;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": missing TAB separator");
    std::string id(line.substr(0, tab));
    if (id.empty())
      throw parse_error(path + ":" + std::to_string(lineno) + ": empty image id");
    if (sub.index.count(id))
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": duplicate image id '" + id + "'");
    std::string transcript(line.substr(tab + 1));
    io_detail::check_utf8(transcript, path, lineno);
    sub.index.emplace(id, sub.records.size());
    sub.records.push_back({std::move(id), std::move(transcript)});
  });
  return sub;
}

// Detection file (tasks 3 and 4): "id<TAB>x1,y1,...,y4" plus, when
// with_transcripts, "<TAB>transcript" where the transcript consumes the rest
// of the line. Multiple lines per image accumulate in file order.
inline DetectionSubmission parse_detection_submission(const std::string& path,
                                                      bool with_transcripts,
                                                      Diagnostics* diag = nullptr) {
  const std::string text = io_detail::read_file(path);
  DetectionSubmission sub;
  sub.with_transcripts = with_transcripts;
  io_detail::for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    if (line.empty()) return;
    const std::string where = path + ":" + std::to_string(lineno);
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw parse_error(where + ": missing TAB separator");
    std::string id(line.substr(0, tab));
    if (id.empty()) throw parse_error(where + ": empty image id");

    std::string_view rest = line.substr(tab + 1);
    std::string_view coords_field = rest;
    std::string transcript;
    const std::size_t tab2 = rest.find('\t');
    if (with_transcripts) {
      if (tab2 == std::string_view::npos)
        throw parse_error(where + ": expected 3 TAB-separated fields, got 2");
      coords_field = rest.substr(0, tab2);
      transcript = std::string(rest.substr(tab2 + 1));
      io_detail::check_utf8(transcript, path, lineno);
    } else if (tab2 != std::string_view::npos) {
      throw parse_error(where + ": expected 2 TAB-separated fields, got more");
    }

    std::array<double, 8> coords{};
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos <= coords_field.size()) {
      std::size_t comma = coords_field.find(',', pos);
      if (comma == std::string_view::npos) comma = coords_field.size();
      const std::string_view token = coords_field.substr(pos, comma - pos);
      if (count >= 8)
        throw parse_error(where + ": expected 8 coordinates, got more");
      coords[count++] = io_detail::parse_coord(token, path, lineno);
      if (comma == coords_field.size()) break;
      pos = comma + 1;
    }
    if (count != 8)
      throw parse_error(where + ": expected 8 coordinates, got " +
                        std::to_string(count));

    DetectionRecord rec;
    rec.quad = make_quad(coords);
    rec.transcript = std::move(transcript);
    rec.source_line = lineno;
    io_detail::quad_warnings(rec.quad, where + " (image '" + id + "')", diag);

    auto [it, inserted] = sub.by_image.try_emplace(id);
    if (inserted) sub.image_order.push_back(id);
    it->second.push_back(std::move(rec));
  });
  return sub;
}

// Image ids present in the ground truth but absent from the submission;
// these score as misses, not errors.
template <typename HasId>
std::vector<std::string> missing_image_ids(const GroundTruth& gt, const HasId& sub) {
  std::vector<std::string> missing;
  for (const auto& entry : gt.images)
    if (sub.find(entry.image_id) == nullptr) missing.push_back(entry.image_id);
  return missing;
}

namespace io_detail {

inline std::string join_ids(const std::vector<std::string>& ids, std::size_t cap = 20) {
  std::string out;
  const std::size_t n = std::min(cap, ids.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > n)
    out += ", ... (+" + std::to_string(ids.size() - n) + " more)";
  return out;
}

inline bool expects_predictions(const GroundTruthEntry& entry) {
  for (const auto& variant : entry.variants)
    for (const auto& line : variant.lines)
      if (!line.ignore) return true;
  return false;
}

// Only images whose absence can actually move a score are reported: an image
// with nothing but ignored (or no) GT lines needs no predictions.
template <typename HasId>
void warn_coverage(const GroundTruth& gt, const HasId& sub, Diagnostics* diag) {
  if (!diag) return;
  std::vector<std::string> missing;
  for (const auto& entry : gt.images)
    if (sub.find(entry.image_id) == nullptr && expects_predictions(entry))
      missing.push_back(entry.image_id);
  if (!missing.empty())
    diag->warn(std::to_string(missing.size()) +
               " ground-truth image(s) have no prediction records: " +
               join_ids(missing));
}

inline void warn_unknown_ids(const GroundTruth& gt,
                             const std::vector<std::string>& pred_ids,
                             Diagnostics* diag) {
  if (!diag) return;
  std::vector<std::string> unknown;
  for (const auto& id : pred_ids)
    if (!gt.find(id)) unknown.push_back(id);
  if (!unknown.empty())
    diag->warn(std::to_string(unknown.size()) +
               " prediction image id(s) not present in the ground truth are ignored: " +
               join_ids(unknown));
}

}  // namespace io_detail

inline void detection_coverage_warnings(const GroundTruth& gt,
                                        const DetectionSubmission& pred,
                                        Diagnostics* diag) {
  io_detail::warn_coverage(gt, pred, diag);
  io_detail::warn_unknown_ids(gt, pred.image_order, diag);
}

// Coverage warnings for the flat-label tasks: GT records without a
// prediction (scored as wrong/empty) and prediction ids with no GT record
// (ignored).
inline void label_coverage_warnings(const LabelSubmission& gt,
                                    const LabelSubmission& pred,
                                    Diagnostics* diag) {
  if (!diag) return;
  std::vector<std::string> missing;
  for (const auto& rec : gt.records)
    if (!pred.find(rec.image_id)) missing.push_back(rec.image_id);
  if (!missing.empty())
    diag->warn(std::to_string(missing.size()) +
               " ground-truth image(s) have no prediction record: " +
               io_detail::join_ids(missing));
  std::vector<std::string> unknown;
  for (const auto& rec : pred.records)
    if (!gt.find(rec.image_id)) unknown.push_back(rec.image_id);
  if (!unknown.empty())
    diag->warn(std::to_string(unknown.size()) +
               " prediction image id(s) not present in the ground truth are ignored: " +
               io_detail::join_ids(unknown));
}

}  // namespace rre
