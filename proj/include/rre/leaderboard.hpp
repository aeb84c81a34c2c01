#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rre/annotation.hpp"
#include "rre/common.hpp"

namespace rre {

struct RunRecord {
  std::string team;
  std::string affiliation;
  Task task = Task::task1;
  std::string run_label;
  double score = 0.0;
  bool baseline = false;
};

struct LeaderboardEntry {
  std::size_t rank = 0;  // 0 for unranked baseline rows
  std::string team;
  std::string affiliation;
  std::string run_label;  // label of the winning run
  double best_score = 0.0;
  bool baseline = false;
};

inline constexpr std::size_t kMaxRunsPerTeam = 5;

inline std::string metric_column_name(Task task) {
  switch (task) {
    case Task::task1: return "Accuracy";
    case Task::task2: return "N.E.D";
    case Task::task3: return "F-score";
    case Task::task4: return "N.E.D";
  }
  return "Score";
}

// Best-of-5: the maximum score wins, ties go to the earliest run.
inline RunRecord best_of_runs(const std::vector<RunRecord>& runs) {
  if (runs.empty()) throw eval_error("no runs for team");
  if (runs.size() > kMaxRunsPerTeam)
    throw eval_error("team '" + runs.front().team + "' has " +
                     std::to_string(runs.size()) + " runs for " +
                     task_name(runs.front().task) + "; at most " +
                     std::to_string(kMaxRunsPerTeam) + " are allowed");
  const RunRecord* best = &runs.front();
  for (const RunRecord& run : runs)
    if (run.score > best->score) best = &run;
  return *best;
}

// Ranked entries sorted by score descending (ties share a rank and the next
// rank skips), followed by unranked baseline rows.
inline std::vector<LeaderboardEntry> build_leaderboard(
    const std::vector<RunRecord>& runs, Task task) {
  std::vector<std::string> team_order;
  std::map<std::string, std::vector<RunRecord>> by_team;
  for (const RunRecord& run : runs) {
    if (run.task != task) continue;
    auto [it, inserted] = by_team.try_emplace(run.team);
    if (inserted) team_order.push_back(run.team);
    it->second.push_back(run);
  }
  if (team_order.empty())
    throw eval_error("no runs for " + std::string(task_name(task)));

  std::vector<LeaderboardEntry> ranked;
  std::vector<LeaderboardEntry> baselines;
  for (const std::string& team : team_order) {
    const RunRecord best = best_of_runs(by_team[team]);
    LeaderboardEntry entry;
    entry.team = best.team;
    entry.affiliation = best.affiliation;
    entry.run_label = best.run_label;
    entry.best_score = best.score;
    entry.baseline = best.baseline;
    (entry.baseline ? baselines : ranked).push_back(std::move(entry));
  }

  auto by_score_desc = [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    return a.best_score > b.best_score;
  };
  std::stable_sort(ranked.begin(), ranked.end(), by_score_desc);
  std::stable_sort(baselines.begin(), baselines.end(), by_score_desc);

  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i > 0 && ranked[i].best_score == ranked[i - 1].best_score)
      ranked[i].rank = ranked[i - 1].rank;
    else
      ranked[i].rank = i + 1;
  }
  ranked.insert(ranked.end(), baselines.begin(), baselines.end());
  return ranked;
}

// Manifest: {"runs": [{"team", "affiliation", "task", "run_label",
// "score" | "report", "baseline"}]}. A "report" value is a path, relative to
// the manifest file, of an evaluator report whose score is used.
inline std::vector<RunRecord> parse_run_manifest(const std::string& path) {
  using nlohmann::json;
  const std::string text = io_detail::read_file(path);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(path + ": " + e.what());
  }
  if (!root.is_object() || !root.contains("runs") || !root["runs"].is_array())
    throw parse_error(path + ": expected an object with array field 'runs'");

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::vector<RunRecord> runs;
  for (std::size_t i = 0; i < root["runs"].size(); ++i) {
    const json& jr = root["runs"][i];
    const std::string ctx = path + ": runs[" + std::to_string(i) + "]";
    if (!jr.is_object()) throw parse_error(ctx + ": expected an object");
    if (!jr.contains("team") || !jr["team"].is_string())
      throw parse_error(ctx + ": missing string field 'team'");
    if (!jr.contains("task") || !jr["task"].is_string())
      throw parse_error(ctx + ": missing string field 'task'");

    RunRecord run;
    run.team = jr["team"].get<std::string>();
    try {
      run.task = task_from_name(jr["task"].get<std::string>());
    } catch (const eval_error& e) {
      throw parse_error(ctx + ": " + e.what());
    }
    if (jr.contains("affiliation")) {
      if (!jr["affiliation"].is_string())
        throw parse_error(ctx + ": field 'affiliation' must be a string");
      run.affiliation = jr["affiliation"].get<std::string>();
    }
    run.run_label = jr.contains("run_label") && jr["run_label"].is_string()
                        ? jr["run_label"].get<std::string>()
                        : "run-" + std::to_string(i + 1);
    if (jr.contains("baseline")) {
      if (!jr["baseline"].is_boolean())
        throw parse_error(ctx + ": field 'baseline' must be a boolean");
      run.baseline = jr["baseline"].get<bool>();
    }

    const bool has_score = jr.contains("score");
    const bool has_report = jr.contains("report");
    if (has_score == has_report)
      throw parse_error(ctx + ": exactly one of 'score' or 'report' is required");
    if (has_score) {
      if (!jr["score"].is_number())
        throw parse_error(ctx + ": field 'score' must be a number");
      run.score = jr["score"].get<double>();
    } else {
      if (!jr["report"].is_string())
        throw parse_error(ctx + ": field 'report' must be a path string");
      const std::string report_path =
          (base / jr["report"].get<std::string>()).string();
      const std::string report_text = io_detail::read_file(report_path);
      json report;
      try {
        report = json::parse(report_text);
      } catch (const json::exception& e) {
        throw parse_error(report_path + ": " + e.what());
      }
      if (!report.is_object() || !report.contains("score") ||
          !report["score"].is_number())
        throw parse_error(report_path + ": report has no numeric 'score' field");
      if (report.contains("task") && report["task"].is_string() &&
          report["task"].get<std::string>() != task_name(run.task))
        throw parse_error(ctx + ": report " + report_path + " is for " +
                          report["task"].get<std::string>() + ", run declares " +
                          task_name(run.task));
      run.score = report["score"].get<double>();
    }
    if (!(run.score >= 0.0) || !(run.score <= 1.0))
      throw parse_error(ctx + ": score " + std::to_string(run.score) +
                        " outside [0,1]");
    runs.push_back(std::move(run));
  }
  if (runs.empty()) throw parse_error(path + ": manifest lists no runs");
  return runs;
}

inline std::vector<Task> manifest_tasks(const std::vector<RunRecord>& runs) {
  std::vector<Task> tasks;
  for (const RunRecord& run : runs)
    if (std::find(tasks.begin(), tasks.end(), run.task) == tasks.end())
      tasks.push_back(run.task);
  return tasks;
}

namespace lb_detail {

inline std::vector<std::vector<std::string>> table_cells(
    const std::vector<LeaderboardEntry>& entries, Task task) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Ranking", "Team Name", "Affiliation", metric_column_name(task)});
  for (const LeaderboardEntry& e : entries)
    rows.push_back({e.baseline ? "Baseline" : std::to_string(e.rank),
                    e.baseline ? "" : e.team, e.affiliation,
                    format_score(e.best_score)});
  return rows;
}

}  // namespace lb_detail

// Tab-separated rendering, one line per entry, matching the published table
// layout (baseline rows carry "Baseline" in the ranking column and an empty
// team cell).
inline std::string render_table_tsv(const std::vector<LeaderboardEntry>& entries,
                                    Task task) {
  std::string out;
  for (const auto& row : lb_detail::table_cells(entries, task)) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += '\t';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

// Space-aligned rendering for terminals.
inline std::string render_table(const std::vector<LeaderboardEntry>& entries,
                                Task task) {
  const auto rows = lb_detail::table_cells(entries, task);
  std::array<std::size_t, 4> width{};
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += row[c];
      if (c + 1 < row.size()) line.append(width[c] - row[c].size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

inline nlohmann::json leaderboard_json(const std::vector<LeaderboardEntry>& entries,
                                       Task task) {
  nlohmann::json j;
  j["task"] = task_name(task);
  j["metric"] = metric_column_name(task);
  nlohmann::json rows = nlohmann::json::array();
  for (const LeaderboardEntry& e : entries) {
    nlohmann::json je;
    if (e.baseline)
      je["rank"] = nullptr;
    else
      je["rank"] = e.rank;
    je["team"] = e.team;
    je["affiliation"] = e.affiliation;
    je["run_label"] = e.run_label;
    je["score"] = e.best_score;
    je["score_formatted"] = format_score(e.best_score);
    je["baseline"] = e.baseline;
    rows.push_back(std::move(je));
  }
  j["entries"] = std::move(rows);
  return j;
}

}  // namespace rre
