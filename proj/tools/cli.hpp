// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cellperm/cell_problems.hpp"

namespace cellperm::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfigError = 2,
  kSolverFailure = 3,
  kNonConvergent = 4,
  kUnknownRun = 5,
};

/// Invalid configuration; `key()` names the offending setting ("run.z").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class UnknownRun : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // [run]
  CaseKind kind = CaseKind::TwoFluid;
  std::vector<int> levels{1, 2, 3};
  std::vector<cplx> z;
  double mu1 = 1.0;
  std::string output_dir = "cellperm_out";
  bool deterministic = true;
  std::vector<Method> methods{Method::VelocityAvg, Method::Energy};
  bool bubble_inner = false;
  int threads = 1;
  // [geometry]
  GeometryConfig geometry;
  // [spectral]
  int max_order = 30;
  std::vector<cplx> s;
  int kmax = 8;
  std::string expansion = "large_z";
  // [export]
  std::string run_id;
  int samples = 129;
  int direction = 1;
  // [solver]
  double residual_tol = 1e-10;
  double power_tol = 1e-12;
  int power_max_iters = 2000;

  /// Every key that was set explicitly, in the order applied ("section.key", value).
  std::vector<std::pair<std::string, std::string>> assignments;
};

/// Applies one "section.key" = value setting. Throws ConfigError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses the bracketed-section key=value format; '#' and ';' start comments
/// only at the beginning of a line.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// "1-5", "3", "1,3,5"
std::vector<int> parse_levels(std::string_view text);
/// "re" or "re,im"
cplx parse_complex(std::string_view text);
/// Entries separated by ';' or whitespace.
std::vector<cplx> parse_complex_list(std::string_view text);

/// %.9g
std::string fmt_g9(double v);
/// 0.130123456E-01 style with nine significant digits.
std::string fmt_fortran(double v);
/// Stable identifier of one (case, level, z) solve.
std::string run_id(CaseKind kind, int level, std::optional<cplx> z);

/// Output directory after the CELLPERM_OUTPUT_DIR override.
std::string resolve_output_dir(const RunConfig& cfg);

/// Runs one subcommand; returns the exit code. Diagnostics go to `err`.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out,
                std::ostream& err);

const std::vector<std::string>& command_names();

}  // namespace cellperm::cli
