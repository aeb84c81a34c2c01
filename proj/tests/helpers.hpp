#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "rre/rre.hpp"

namespace testutil {

// Uniform doubles straight from engine bits; std::uniform_real_distribution
// is implementation-defined, and frozen seeds must reproduce everywhere.
inline double rnd01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double rnd(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * rnd01(rng);
}

inline std::size_t rnd_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

inline rre::Quad axis_box(double x0, double y0, double x1, double y1) {
  return rre::make_quad({x0, y0, x1, y0, x1, y1, x0, y1});
}

inline double bbox_area(const rre::Quad& q) {
  double x0 = q.v[0].x, x1 = q.v[0].x, y0 = q.v[0].y, y1 = q.v[0].y;
  for (const auto& p : q.v) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return (x1 - x0) * (y1 - y0);
}

// Convex clockwise quad whose bounding box of side [min_side, max_side]
// lands inside [lo,hi]^2, with area and bbox-fill floors so Monte Carlo
// estimates stay tight.
inline rre::Quad random_convex_quad(std::mt19937_64& rng, double lo = 0.0,
                                    double hi = 100.0, double min_side = 15.0,
                                    double max_side = 45.0,
                                    double min_area = 100.0,
                                    double min_fill = 0.35) {
  for (;;) {
    const double side = rnd(rng, min_side, max_side);
    const double bx = rnd(rng, lo, hi - side);
    const double by = rnd(rng, lo, hi - side);
    std::array<rre::Point, 4> pts;
    for (auto& p : pts) p = {bx + side * rnd01(rng), by + side * rnd01(rng)};
    rre::Point c{0, 0};
    for (const auto& p : pts) {
      c.x += p.x / 4;
      c.y += p.y / 4;
    }
    std::sort(pts.begin(), pts.end(), [&](const rre::Point& a, const rre::Point& b) {
      return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
    });
    rre::Quad q{{pts[0], pts[1], pts[2], pts[3]}};
    if (rre::signed_area(q) < 0.0) q = rre::Quad{{pts[3], pts[2], pts[1], pts[0]}};
    if (!rre::is_convex(q) || rre::is_self_intersecting(q)) continue;
    const double area = rre::quad_area(q);
    if (area < min_area || area < min_fill * bbox_area(q)) continue;
    return q;
  }
}

// Second quad of a pair: a jittered copy of the first, clamped to the arena,
// so pair IoU sweeps the whole (0,1) range instead of being mostly 0.
inline rre::Quad perturbed_quad(std::mt19937_64& rng, const rre::Quad& base,
                                double lo = 0.0, double hi = 100.0,
                                double max_shift = 25.0, double max_jitter = 6.0) {
  for (;;) {
    const double dx = rnd(rng, -max_shift, max_shift);
    const double dy = rnd(rng, -max_shift, max_shift);
    rre::Quad q = base;
    bool in_range = true;
    for (auto& p : q.v) {
      p.x += dx + rnd(rng, -max_jitter, max_jitter);
      p.y += dy + rnd(rng, -max_jitter, max_jitter);
      in_range = in_range && p.x >= lo && p.x <= hi && p.y >= lo && p.y <= hi;
    }
    if (!in_range || !rre::is_convex(q) || rre::is_self_intersecting(q)) continue;
    if (rre::signed_area(q) < 0.0)
      q = rre::Quad{{q.v[3], q.v[2], q.v[1], q.v[0]}};
    if (rre::quad_area(q) < 50.0) continue;
    return q;
  }
}

struct XorShift128 {
  std::uint64_t s0, s1;
  explicit XorShift128(std::uint64_t seed) {
    std::mt19937_64 m(seed);
    s0 = m();
    s1 = m();
  }
  std::uint64_t next() {
    std::uint64_t x = s0;
    const std::uint64_t y = s1;
    s0 = y;
    x ^= x << 23;
    s1 = x ^ y ^ (x >> 17) ^ (y >> 26);
    return s1 + y;
  }
  double d01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Monte Carlo IoU over the joint bounding box: IoU ~= |in both| / |in either|.
// The ratio form keeps the estimate tight when the quads nearly coincide.
// Even-odd crossing test, so non-convex (simple) quads are handled too.
inline double mc_iou(const rre::Quad& a, const rre::Quad& b, std::size_t samples,
                     std::uint64_t seed) {
  struct Edges {
    std::array<double, 4> py, ny, px, slope;
    void load(const rre::Quad& q) {
      for (int i = 0; i < 4; ++i) {
        const rre::Point& p = q.v[i];
        const rre::Point& n = q.v[(i + 1) % 4];
        py[i] = p.y;
        ny[i] = n.y;
        px[i] = p.x;
        slope[i] = p.y == n.y ? 0.0 : (n.x - p.x) / (n.y - p.y);
      }
    }
    bool inside(double x, double y) const {
      bool in = false;
      for (int i = 0; i < 4; ++i) {
        if ((py[i] > y) == (ny[i] > y)) continue;
        const double xint = px[i] + (y - py[i]) * slope[i];
        if (x < xint) in = !in;
      }
      return in;
    }
  };
  Edges ea, eb;
  ea.load(a);
  eb.load(b);

  double x0 = a.v[0].x, x1 = a.v[0].x, y0 = a.v[0].y, y1 = a.v[0].y;
  for (const auto& q : {a, b})
    for (const auto& p : q.v) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  const double w = x1 - x0, h = y1 - y0;

  XorShift128 rng(seed);
  std::size_t n_both = 0, n_either = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = x0 + w * rng.d01();
    const double y = y0 + h * rng.d01();
    const bool ia = ea.inside(x, y);
    const bool ib = eb.inside(x, y);
    n_both += ia && ib;
    n_either += ia || ib;
  }
  if (n_either == 0) return 0.0;
  return static_cast<double>(n_both) / static_cast<double>(n_either);
}

// Exhaustive recursion, no memo: the independent reference for the DP.
inline std::size_t lev_oracle(std::u32string_view a, std::u32string_view b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  if (a.front() == b.front()) return lev_oracle(a.substr(1), b.substr(1));
  const std::size_t del = lev_oracle(a.substr(1), b);
  const std::size_t ins = lev_oracle(a, b.substr(1));
  const std::size_t sub = lev_oracle(a.substr(1), b.substr(1));
  return 1 + std::min({del, ins, sub});
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "rre_test_XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'')
      q += "'\\''";
    else
      q += c;
  }
  q += "'";
  return q;
}

// Runs the installed binary through /bin/sh, capturing both streams.
// env_prefix is prepended verbatim, e.g. "RRE_JOBS=3".
inline CliResult run_cli(const std::vector<std::string>& args,
                         const std::string& env_prefix = "") {
  TempDir td;
  const std::string out_path = td.file("stdout");
  const std::string err_path = td.file("stderr");
  std::string cmd;
  if (!env_prefix.empty()) cmd += env_prefix + " ";
  cmd += shell_quote(RRE_BIN);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " > " + shell_quote(out_path) + " 2> " + shell_quote(err_path);
  const int status = std::system(cmd.c_str());
  CliResult r;
  if (status != -1 && WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  return r;
}

inline rre::TextInstance inst(const rre::Quad& q, std::string text = "x",
                              bool ignore = false) {
  return {q, std::move(text), ignore};
}

inline rre::GroundTruthEntry gt_entry(std::string id,
                                      std::vector<rre::GroundTruthVariant> variants) {
  return {std::move(id), std::move(variants)};
}

inline rre::GroundTruth make_gt(std::vector<rre::GroundTruthEntry> entries) {
  rre::GroundTruth gt;
  gt.images = std::move(entries);
  for (std::size_t i = 0; i < gt.images.size(); ++i)
    gt.index.emplace(gt.images[i].image_id, i);
  return gt;
}

inline rre::DetectionSubmission make_sub(bool with_transcripts) {
  rre::DetectionSubmission s;
  s.with_transcripts = with_transcripts;
  return s;
}

inline void add_det(rre::DetectionSubmission& s, const std::string& id,
                    const rre::Quad& q, std::string transcript = "") {
  auto [it, inserted] = s.by_image.try_emplace(id);
  if (inserted) s.image_order.push_back(id);
  it->second.push_back({q, std::move(transcript), it->second.size() + 1});
}

inline std::string quad_csv(const rre::Quad& q) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g",
                q.v[0].x, q.v[0].y, q.v[1].x, q.v[1].y, q.v[2].x, q.v[2].y,
                q.v[3].x, q.v[3].y);
  return buf;
}

inline std::string det_line(const std::string& id, const rre::Quad& q) {
  return id + "\t" + quad_csv(q) + "\n";
}

inline std::string det_line(const std::string& id, const rre::Quad& q,
                            const std::string& transcript) {
  return id + "\t" + quad_csv(q) + "\t" + transcript + "\n";
}

}  // namespace testutil
