#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rre {

enum class Task { task1, task2, task3, task4 };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::task1: return "task1";
    case Task::task2: return "task2";
    case Task::task3: return "task3";
    case Task::task4: return "task4";
  }
  return "?";
}

struct eval_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Task task_from_name(const std::string& name) {
  if (name == "task1") return Task::task1;
  if (name == "task2") return Task::task2;
  if (name == "task3") return Task::task3;
  if (name == "task4") return Task::task4;
  throw eval_error("unknown task name '" + name + "'");
}

// Scores are rendered with four decimals everywhere (summaries, tables,
// report score_formatted fields).
inline std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// Shortest plain rendering of an IoU threshold, used in report keys (f_0.5).
inline std::string format_threshold(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  return buf;
}

// Runs fn(0..n-1) across up to `jobs` threads. Results must be written to
// per-index slots by the caller; the reduction order afterwards is the index
// order, so output is identical for any worker count. Exceptions are
// re-thrown for the lowest failing index.
template <typename Fn>
void parallel_for_index(std::size_t n, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::min<std::size_t>(jobs, n);
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace rre
