#pragma once

#include <functional>
#include <string>
#include <vector>

#include "config.hpp"
#include "qmrpm/report.hpp"

namespace qmrpm::cli {

/// One schedulable unit: a suite applied to one subject (model, prior, chain spec, ...).
struct Task {
  std::string suite;
  std::string subject;
  std::function<CheckReport()> run;
  /// Diagnostic tasks are reported separately and never affect the exit code.
  bool diagnostic = false;
};

/// Tasks for the selected suites in canonical order: suite order first, then declaration
/// order of the subjects.
std::vector<Task> build_tasks(const RunConfig& config, const std::vector<std::string>& suites);

/// Runs tasks on `jobs` worker threads; results come back in task order. A qmrpm::Error
/// other than ResourceError turns into a failing report; ResourceError is rethrown.
std::vector<CheckReport> run_tasks(const std::vector<Task>& tasks, unsigned jobs);

}  // namespace qmrpm::cli
