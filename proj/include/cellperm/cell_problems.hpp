// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellperm/fem.hpp"
#include "cellperm/linsolve.hpp"
#include "cellperm/subdomain.hpp"

namespace cellperm {

enum class Method { VelocityAvg, Energy };
std::string to_string(Method m);

struct ProblemSettings {
  GeometryConfig geometry;
  double mu1 = 1.0;
  double residual_tol = 1e-10;
};

/// Per-level cache of the z-independent assembly. Safe to share between
/// threads; every accessor locks.
class CellProblems {
 public:
  explicit CellProblems(ProblemSettings settings = {});
  ~CellProblems();

  const ProblemSettings& settings() const { return settings_; }
  const PeriodicGrid& grid(int level);
  std::shared_ptr<const OperatorBlocks> blocks(int level, CaseKind kind);
  /// Host/inclusion split of the two-fluid problem at one level.
  const SplitOperators& split(int level);

 private:
  ProblemSettings settings_;
  std::mutex mutex_;
  std::map<int, std::unique_ptr<PeriodicGrid>> grids_;
  std::map<std::pair<int, int>, std::shared_ptr<const OperatorBlocks>> blocks_;
  std::map<int, std::unique_ptr<SplitOperators>> split_;
};

/// Both force directions from one factorization.
struct CellPair {
  std::array<CellSolution, 2> sol;
  ViscosityField visc;
  SolveReport report;
};

/// Throws std::invalid_argument unless z is given exactly for TwoFluid and
/// lies off (-inf, 0]; SingularSystem on solver failure.
CellPair solve_pair(CellProblems& problems, CaseKind kind, int level, std::optional<cplx> z);
CellSolution solve_case(CellProblems& problems, CaseKind kind, int level, std::optional<cplx> z,
                        int k);

/// K[k][l] = int u^k . e_l
struct PermeabilityTensor {
  std::array<std::array<cplx, 2>, 2> k{};
  Method method = Method::VelocityAvg;
  CaseKind kind = CaseKind::Solid;
  std::optional<cplx> z;
  int level = 0;
  double residual = 0.0;

  cplx operator()(int r, int c) const { return k[r][c]; }
};

PermeabilityTensor permeability(const CellPair& pair, Method method);
/// Entrywise max |A - B|.
double max_abs_diff(const PermeabilityTensor& a, const PermeabilityTensor& b);

/// Eigenvalues (ascending) of a 2x2 Hermitian matrix given as its entries.
std::array<double, 2> hermitian_eigenvalues(const std::array<std::array<cplx, 2>, 2>& h);

struct SweepEntry {
  cplx z;
  PermeabilityTensor k;
  double gap_darcy = 0.0;   // max |K(z) - K_solid|
  double gap_bubble = 0.0;  // max |K(z) - K_bubble|
  double energy_inclusion = 0.0;
  double energy_total = 0.0;
};

struct SweepResult {
  int level = 0;
  PermeabilityTensor k_darcy;
  PermeabilityTensor k_bubble;
  std::vector<SweepEntry> entries;  // sorted by |z|
};

SweepResult limiting_gaps(CellProblems& problems, int level, const std::vector<cplx>& zs);

struct StieltjesCheck {
  std::string property;
  cplx z;
  cplx z_other;  // second sample for the monotonicity check
  double value = 0.0;
  bool passed = false;
};

struct StieltjesReport {
  std::vector<StieltjesCheck> checks;
  bool passed() const;
  /// "" when everything passed.
  std::string first_failure() const;
};

/// Sign of Im K / Im z on complex samples, positivity and Loewner monotonicity
/// on real samples, and K(conj z) = conj K(z).
StieltjesReport stieltjes_checks(CellProblems& problems, int level,
                                 const std::vector<cplx>& complex_samples,
                                 const std::vector<double>& real_samples, double tol = 1e-10);

struct InnerRecovery {
  CVec velocity;  // two-fluid velocity vector: interface trace plus inner field
  std::array<cplx, 2> inner_average{};
  std::array<cplx, 2> outer_average{};
  double inner_energy = 0.0;
};

/// Dirichlet Stokes problem inside the inclusion driven by the tangential
/// trace of a bubble solution.
InnerRecovery bubble_inner_recovery(CellProblems& problems, const CellSolution& outer);

struct RichardsonEstimate {
  double extrapolated = 0.0;
  double order = 0.0;  // observed convergence order p
  bool valid = false;  // false when the last differences change sign
};

/// Extrapolation from the last three values of a sequence on grids refined by
/// a factor 2.
RichardsonEstimate richardson(std::span<const double> values);

}  // namespace cellperm
