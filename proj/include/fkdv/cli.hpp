#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fkdv/branch.hpp"

namespace fkdv::cli {

enum ExitCode : int { kSuccess = 0, kScientificFailure = 1, kUsageError = 2 };

/// Flat parameter bag shared by all commands. Lists in `alphas` and `ks`
/// define a sweep; each (alpha, k) pair gets its own output directory when
/// the sweep has more than one entry.
struct RunConfig {
  std::string command;
  std::vector<double> alphas{2.0};
  std::vector<int> ks{1};
  std::optional<int> modes;  // command-specific default when unset
  int max_modes = 1024;
  int grid = 257;
  std::string out = ".";
  double stop_gap = 1e-3;
  double escalate_gap = 0.05;
  double newton_tol = 1e-11;
  double s_start = 0.02;
  double s_step = 0.02;
  int direction = 1;
  int max_points = 400;
  std::vector<double> eps{0.08, 0.04, 0.02, 0.01};
  std::string branch_csv;
  std::optional<int> point;
  int tail = 3;
  unsigned jobs = 0;  // 0: hardware concurrency

  ContinuationConfig continuation(double alpha, int k) const;
  /// Throws Error(InvalidArgument) on the first invalid field.
  void validate() const;
};

/// Single-run commands; `dir` must exist. Summaries go to `log`.
int cmd_kernel(const RunConfig& config, double alpha, int k, const std::string& dir, std::ostream& log);
int cmd_branch(const RunConfig& config, double alpha, int k, const std::string& dir, std::ostream& log);
int cmd_verify_asymptotics(const RunConfig& config, double alpha, int k, const std::string& dir,
                           std::ostream& log);
int cmd_limit(const RunConfig& config, double alpha, int k, const std::string& dir, std::ostream& log);

/// Parses argv, runs the sweep and returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fkdv::cli
