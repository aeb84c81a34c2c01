#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rre/rre.hpp"

namespace {

unsigned jobs_from_env() {
  const char* env = std::getenv("RRE_JOBS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0' || v == 0 || v > 4096)
    throw rre::eval_error(std::string("RRE_JOBS: invalid worker count '") + env +
                          "'");
  return static_cast<unsigned>(v);
}

void print_warnings(const rre::Diagnostics& diag) {
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << '\n';
}

// Returns nonzero when strict mode turns warnings into a failure.
int check_strict(const rre::Diagnostics& diag, bool strict) {
  if (strict && !diag.warnings.empty()) {
    std::cerr << "error: strict mode: " << diag.warnings.size()
              << " warning(s) treated as errors\n";
    return 1;
  }
  return 0;
}

void write_report(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rre::parse_error(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw rre::parse_error(path + ": write failure");
}

struct TaskArgs {
  std::string gt_path;
  std::string pred_path;
  std::string report_path;
  bool strict = false;
  unsigned jobs = 0;  // 0 = not given on the command line
};

void add_common_options(CLI::App* cmd, TaskArgs& args) {
  cmd->add_option("--gt", args.gt_path, "Ground-truth file")->required();
  cmd->add_option("--pred", args.pred_path, "Submission file")->required();
  cmd->add_option("--report", args.report_path, "Write a JSON report here");
  cmd->add_flag("--strict", args.strict, "Treat warnings as errors");
  cmd->add_option("--jobs", args.jobs, "Worker threads (default: RRE_JOBS or 1)")
      ->check(CLI::Range(1u, 4096u));
}

unsigned resolve_jobs(const TaskArgs& args) {
  return args.jobs > 0 ? args.jobs : jobs_from_env();
}

int run_recognition(rre::Task task, const TaskArgs& args) {
  rre::Diagnostics diag;
  const rre::LabelSubmission gt = rre::parse_label_submission(args.gt_path, &diag);
  const rre::LabelSubmission pred =
      rre::parse_label_submission(args.pred_path, &diag);
  rre::label_coverage_warnings(gt, pred, &diag);
  print_warnings(diag);
  if (int rc = check_strict(diag, args.strict)) return rc;

  const rre::RecognitionReport report = task == rre::Task::task1
                                            ? rre::eval_task1(gt, pred)
                                            : rre::eval_task2(gt, pred);
  if (!args.report_path.empty())
    write_report(args.report_path, rre::report_json(report, true));
  if (task == rre::Task::task1)
    std::cout << "task1 accuracy=" << rre::format_score(report.score)
              << " n_right=" << report.n_right << " n_total=" << report.n_total
              << '\n';
  else
    std::cout << "task2 1-NED=" << rre::format_score(report.score)
              << " n_total=" << report.n_total << '\n';
  return 0;
}

// Prints and drains accumulated warnings so everything emitted before a
// scoring error is still visible; returns the running total.
std::size_t flush_warnings(rre::Diagnostics& diag, std::size_t& total) {
  print_warnings(diag);
  total += diag.warnings.size();
  diag.warnings.clear();
  return total;
}

int strict_failure(bool strict, std::size_t n_warnings) {
  if (strict && n_warnings > 0) {
    std::cerr << "error: strict mode: " << n_warnings
              << " warning(s) treated as errors\n";
    return 1;
  }
  return 0;
}

int run_task3(const TaskArgs& args, const std::vector<double>& thresholds) {
  rre::Diagnostics diag;
  std::size_t n_warnings = 0;
  const rre::GroundTruth gt = rre::parse_ground_truth(args.gt_path, &diag);
  const rre::DetectionSubmission pred =
      rre::parse_detection_submission(args.pred_path, false, &diag);
  flush_warnings(diag, n_warnings);
  const rre::DetectionReport report =
      rre::eval_task3(gt, pred, thresholds, resolve_jobs(args), &diag);
  flush_warnings(diag, n_warnings);
  if (int rc = strict_failure(args.strict, n_warnings)) return rc;

  if (!args.report_path.empty())
    write_report(args.report_path, rre::report_json(report, true));
  std::cout << "task3";
  for (const auto& tm : report.metrics) {
    const std::string key = rre::format_threshold(tm.threshold);
    std::cout << " F@" << key << "=" << rre::format_score(tm.f_score) << " P@"
              << key << "=" << rre::format_score(tm.precision) << " R@" << key
              << "=" << rre::format_score(tm.recall);
  }
  std::cout << '\n';
  return 0;
}

int run_task4(const TaskArgs& args) {
  rre::Diagnostics diag;
  std::size_t n_warnings = 0;
  const rre::GroundTruth gt = rre::parse_ground_truth(args.gt_path, &diag);
  const rre::DetectionSubmission pred =
      rre::parse_detection_submission(args.pred_path, true, &diag);
  flush_warnings(diag, n_warnings);
  const rre::E2EReport report =
      rre::eval_task4(gt, pred, resolve_jobs(args), &diag);
  flush_warnings(diag, n_warnings);
  if (int rc = strict_failure(args.strict, n_warnings)) return rc;

  if (!args.report_path.empty())
    write_report(args.report_path, rre::report_json(report, true));
  std::cout << "task4 1-NED=" << rre::format_score(report.score)
            << " n_terms=" << report.n_terms << '\n';
  return 0;
}

int run_leaderboard(const std::string& manifest_path, const std::string& task_name,
                    bool tsv, const std::string& report_path) {
  const std::vector<rre::RunRecord> runs = rre::parse_run_manifest(manifest_path);
  std::vector<rre::Task> tasks;
  if (!task_name.empty())
    tasks.push_back(rre::task_from_name(task_name));
  else
    tasks = rre::manifest_tasks(runs);

  nlohmann::json boards = nlohmann::json::array();
  bool first = true;
  for (rre::Task task : tasks) {
    const auto entries = rre::build_leaderboard(runs, task);
    if (!first) std::cout << '\n';
    if (tasks.size() > 1)
      std::cout << "== " << rre::task_name(task) << " ==" << '\n';
    std::cout << (tsv ? rre::render_table_tsv(entries, task)
                      : rre::render_table(entries, task));
    boards.push_back(rre::leaderboard_json(entries, task));
    first = false;
  }
  if (!report_path.empty()) {
    nlohmann::json j;
    j["toolkit"] = rre::kToolkitName;
    j["version"] = rre::kVersion;
    j["leaderboards"] = std::move(boards);
    write_report(report_path, j);
  }
  return 0;
}

int run_validate(const std::string& gt_path, const std::string& pred_path,
                 const std::string& task_arg, bool strict) {
  const rre::Task task = rre::task_from_name(task_arg);
  rre::Diagnostics diag;
  std::size_t errors = 0;
  auto report_error = [&errors](const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    ++errors;
  };

  if (task == rre::Task::task1 || task == rre::Task::task2) {
    rre::LabelSubmission gt, pred;
    bool gt_ok = false, pred_ok = false;
    try {
      gt = rre::parse_label_submission(gt_path, &diag);
      gt_ok = true;
    } catch (const rre::parse_error& e) {
      report_error(e);
    }
    if (!pred_path.empty()) {
      try {
        pred = rre::parse_label_submission(pred_path, &diag);
        pred_ok = true;
      } catch (const rre::parse_error& e) {
        report_error(e);
      }
    }
    if (gt_ok && pred_ok) rre::label_coverage_warnings(gt, pred, &diag);
  } else {
    rre::GroundTruth gt;
    rre::DetectionSubmission pred;
    bool gt_ok = false, pred_ok = false;
    try {
      gt = rre::parse_ground_truth(gt_path, &diag);
      gt_ok = true;
    } catch (const rre::parse_error& e) {
      report_error(e);
    }
    if (!pred_path.empty()) {
      try {
        pred = rre::parse_detection_submission(pred_path,
                                               task == rre::Task::task4, &diag);
        pred_ok = true;
      } catch (const rre::parse_error& e) {
        report_error(e);
      }
    }
    if (gt_ok && pred_ok) rre::detection_coverage_warnings(gt, pred, &diag);
  }

  print_warnings(diag);
  std::cout << "validate: " << errors << " error(s), " << diag.warnings.size()
            << " warning(s)\n";
  if (errors > 0) return 1;
  return check_strict(diag, strict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene-text reading evaluation toolkit"};
  app.set_version_flag("--version", rre::kVersion);
  app.require_subcommand(1);

  TaskArgs t1_args, t2_args, t3_args, t4_args;
  std::vector<double> thresholds = rre::default_iou_thresholds();

  CLI::App* t1 = app.add_subcommand("task1", "Character recognition accuracy");
  add_common_options(t1, t1_args);
  CLI::App* t2 = app.add_subcommand("task2", "Text-line recognition (1 - NED)");
  add_common_options(t2, t2_args);
  CLI::App* t3 = app.add_subcommand("task3", "Text-line detection P/R/F at IoU");
  add_common_options(t3, t3_args);
  t3->add_option("--iou-thresholds", thresholds,
                 "IoU thresholds, each strictly between 0 and 1")
      ->delimiter(',');
  CLI::App* t4 = app.add_subcommand("task4", "End-to-end recognition (1 - NED)");
  add_common_options(t4, t4_args);

  std::string manifest_path, lb_task, lb_report;
  bool lb_tsv = false;
  CLI::App* lb = app.add_subcommand("leaderboard",
                                    "Rank submitted runs with the best-of-5 rule");
  lb->add_option("--manifest", manifest_path, "Run manifest (JSON)")->required();
  lb->add_option("--task", lb_task, "Only render this task");
  lb->add_flag("--tsv", lb_tsv, "Tab-separated output instead of aligned columns");
  lb->add_option("--report", lb_report, "Write a JSON report here");

  std::string v_gt, v_pred, v_task = "task3";
  bool v_strict = false;
  CLI::App* val = app.add_subcommand("validate", "Check files without scoring");
  val->add_option("--gt", v_gt, "Ground-truth file")->required();
  val->add_option("--pred", v_pred, "Submission file");
  val->add_option("--task", v_task,
                  "Task whose file formats to expect (default task3)");
  val->add_flag("--strict", v_strict, "Treat warnings as errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(t1)) return run_recognition(rre::Task::task1, t1_args);
    if (app.got_subcommand(t2)) return run_recognition(rre::Task::task2, t2_args);
    if (app.got_subcommand(t3)) return run_task3(t3_args, thresholds);
    if (app.got_subcommand(t4)) return run_task4(t4_args);
    if (app.got_subcommand(lb))
      return run_leaderboard(manifest_path, lb_task, lb_tsv, lb_report);
    if (app.got_subcommand(val))
      return run_validate(v_gt, v_pred, v_task, v_strict);
  } catch (const rre::parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const rre::geometry_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const rre::unicode_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const rre::eval_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
