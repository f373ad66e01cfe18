// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include "cellperm/cell_problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cellperm {

std::string to_string(Method m) { return m == Method::VelocityAvg ? "velocity_avg" : "energy"; }

CellProblems::CellProblems(ProblemSettings settings) : settings_(std::move(settings)) {
  settings_.geometry.validate();
  if (!(settings_.mu1 > 0.0)) throw std::invalid_argument("mu1 must be positive");
}

CellProblems::~CellProblems() = default;

const PeriodicGrid& CellProblems::grid(int level) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto& g = grids_[level];
  if (!g) g = std::make_unique<PeriodicGrid>(build_grid(level, settings_.geometry));
  return *g;
}

std::shared_ptr<const OperatorBlocks> CellProblems::blocks(int level, CaseKind kind) {
  const PeriodicGrid& g = grid(level);
  std::lock_guard<std::mutex> lock(mutex_);
  auto& b = blocks_[{level, static_cast<int>(kind)}];
  if (!b) b = assemble_blocks(build_space(g, kind));
  return b;
}

const SplitOperators& CellProblems::split(int level) {
  auto b = blocks(level, CaseKind::TwoFluid);
  std::lock_guard<std::mutex> lock(mutex_);
  auto& s = split_[level];
  if (!s) s = std::make_unique<SplitOperators>(std::move(b), settings_.mu1);
  return *s;
}

CellPair solve_pair(CellProblems& problems, CaseKind kind, int level, std::optional<cplx> z) {
  ViscosityField visc{problems.settings().mu1, z.value_or(cplx(1.0))};
  if (kind == CaseKind::TwoFluid) {
    if (!z) throw std::invalid_argument("two_fluid needs a viscosity ratio z");
    visc.validate_two_fluid();
  } else if (z) {
    throw std::invalid_argument("z only applies to the two_fluid case");
  }
  auto blocks = problems.blocks(level, kind);
  const AssembledSystem sys = assemble(blocks, visc);
  const SolveOutput out =
      factor_solve(sys.matrix, {sys.rhs[0], sys.rhs[1]}, problems.settings().residual_tol);
  CellPair pair;
  pair.visc = visc;
  pair.report = out.report;
  for (int k = 0; k < 2; ++k) {
    const double res = relative_residual(sys.matrix, out.solutions[k], sys.rhs[k]);
    pair.sol[k] = unpack_solution(blocks, out.solutions[k], k, z, res);
    pair.sol[k].level = level;
  }
  return pair;
}

CellSolution solve_case(CellProblems& problems, CaseKind kind, int level, std::optional<cplx> z,
                        int k) {
  if (k < 0 || k > 1) throw std::invalid_argument("force direction must be 0 or 1");
  return std::move(solve_pair(problems, kind, level, z).sol[k]);
}

PermeabilityTensor permeability(const CellPair& pair, Method method) {
  PermeabilityTensor t;
  t.method = method;
  t.kind = pair.sol[0].kind;
  t.z = pair.sol[0].z;
  t.level = pair.sol[0].level;
  t.residual = std::max(pair.sol[0].residual, pair.sol[1].residual);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      t.k[k][l] = method == Method::VelocityAvg
                      ? functional_average(pair.sol[k], l)
                      : functional_energy(pair.sol[k], pair.sol[l], pair.visc);
  return t;
}

double max_abs_diff(const PermeabilityTensor& a, const PermeabilityTensor& b) {
  double d = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) d = std::max(d, std::abs(a.k[k][l] - b.k[k][l]));
  return d;
}

std::array<double, 2> hermitian_eigenvalues(const std::array<std::array<cplx, 2>, 2>& h) {
  const double a = h[0][0].real();
  const double d = h[1][1].real();
  const cplx b = 0.5 * (h[0][1] + std::conj(h[1][0]));
  const double mid = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), std::abs(b));
  return {mid - rad, mid + rad};
}

SweepResult limiting_gaps(CellProblems& problems, int level, const std::vector<cplx>& zs) {
  SweepResult out;
  out.level = level;
  out.k_darcy = permeability(solve_pair(problems, CaseKind::Solid, level, std::nullopt),
                             Method::VelocityAvg);
  out.k_bubble = permeability(solve_pair(problems, CaseKind::Bubble, level, std::nullopt),
                              Method::VelocityAvg);
  for (const cplx z : zs) {
    const CellPair pair = solve_pair(problems, CaseKind::TwoFluid, level, z);
    SweepEntry e;
    e.z = z;
    e.k = permeability(pair, Method::VelocityAvg);
    e.gap_darcy = max_abs_diff(e.k, out.k_darcy);
    e.gap_bubble = max_abs_diff(e.k, out.k_bubble);
    e.energy_inclusion = region_energy(pair.sol[0], Region::Inclusion, pair.visc);
    e.energy_total = e.energy_inclusion + region_energy(pair.sol[0], Region::Host, pair.visc);
    out.entries.push_back(std::move(e));
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const SweepEntry& a, const SweepEntry& b) {
                     return std::abs(a.z) < std::abs(b.z);
                   });
  return out;
}

bool StieltjesReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const StieltjesCheck& c) { return c.passed; });
}

std::string StieltjesReport::first_failure() const {
  for (const auto& c : checks) {
    if (c.passed) continue;
    std::ostringstream os;
    os << c.property << " failed at z=" << c.z;
    if (c.z_other != cplx(0.0)) os << " vs z=" << c.z_other;
    os << " (value " << c.value << ")";
    return os.str();
  }
  return "";
}

StieltjesReport stieltjes_checks(CellProblems& problems, int level,
                                 const std::vector<cplx>& complex_samples,
                                 const std::vector<double>& real_samples, double tol) {
  StieltjesReport rep;
  auto tensor = [&](cplx z) {
    return permeability(solve_pair(problems, CaseKind::TwoFluid, level, z), Method::VelocityAvg);
  };
  for (const cplx z : complex_samples) {
    const PermeabilityTensor kz = tensor(z);
    const PermeabilityTensor kc = tensor(std::conj(z));
    double conj_err = 0.0;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) conj_err = std::max(conj_err, std::abs(kc.k[r][c] - std::conj(kz.k[r][c])));
    rep.checks.push_back({"conjugation", z, std::conj(z), conj_err, conj_err <= tol});
    if (z.imag() == 0.0) {
      double asym = 0.0;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) asym = std::max(asym, std::abs(kz.k[r][c] - std::conj(kz.k[c][r])));
      rep.checks.push_back({"hermitian_part", z, {}, asym, asym <= tol});
      continue;
    }
    std::array<std::array<cplx, 2>, 2> h{};
    const cplx dz = z - std::conj(z);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) h[r][c] = (kz.k[r][c] - std::conj(kz.k[c][r])) / dz;
    const double top = hermitian_eigenvalues(h)[1];
    rep.checks.push_back({"imaginary_part_sign", z, {}, top, top <= tol});
  }

  std::vector<double> xs(real_samples);
  std::sort(xs.begin(), xs.end());
  std::vector<PermeabilityTensor> ks;
  for (const double x : xs) {
    if (!(x > 0.0)) throw std::invalid_argument("real samples must be positive");
    ks.push_back(tensor(cplx(x)));
    std::array<std::array<cplx, 2>, 2> sym{};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) sym[r][c] = 0.5 * (ks.back().k[r][c] + ks.back().k[c][r]).real();
    const double low = hermitian_eigenvalues(sym)[0];
    rep.checks.push_back({"positivity", cplx(x), {}, low, low >= -tol});
  }
  for (std::size_t hi = 0; hi < xs.size(); ++hi) {
    for (std::size_t lo = 0; lo < hi; ++lo) {
      if (xs[hi] == xs[lo]) continue;
      std::array<std::array<cplx, 2>, 2> d{};
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          d[r][c] = 0.5 * (ks[hi].k[r][c] - ks[lo].k[r][c] + ks[hi].k[c][r] - ks[lo].k[c][r]).real();
      const double top = hermitian_eigenvalues(d)[1];
      rep.checks.push_back({"monotonicity", cplx(xs[hi]), cplx(xs[lo]), top, top <= tol});
    }
  }
  return rep;
}

InnerRecovery bubble_inner_recovery(CellProblems& problems, const CellSolution& outer) {
  if (outer.kind != CaseKind::Bubble)
    throw std::invalid_argument("inner recovery needs a bubble solution");
  const SplitOperators& split = problems.split(outer.level);
  const FunctionSpace& tf = *split.blocks().space;
  const FunctionSpace& bs = outer.space();
  if (tf.grid().cells_per_side() != bs.grid().cells_per_side())
    throw std::invalid_argument("bubble solution does not match the cached grid");

  CVec trace(static_cast<std::size_t>(tf.num_velocity()), cplx(0.0));
  for (int d : split.interface_dofs()) {
    const VelocityDof& vd = tf.velocity_dofs()[d];
    const int src = bs.velocity_index(vd.node, vd.comp);
    if (src >= 0) trace[d] = outer.velocity[src];
  }
  InnerRecovery rec;
  rec.velocity = split.inner_dirichlet(trace).velocity;
  const auto& load_incl = split.blocks().load_incl;
  for (int l = 0; l < 2; ++l) {
    cplx s = 0.0;
    for (std::size_t d = 0; d < rec.velocity.size(); ++d) s += load_incl[l][d] * rec.velocity[d];
    rec.inner_average[l] = s;
    rec.outer_average[l] = functional_average(outer, l);
  }
  const double e = split.energy_norm(rec.velocity, Region::Inclusion);
  rec.inner_energy = e * e;
  return rec;
}

RichardsonEstimate richardson(std::span<const double> v) {
  if (v.size() < 3) throw std::invalid_argument("richardson needs at least three values");
  const std::size_t n = v.size();
  RichardsonEstimate r;
  r.extrapolated = v[n - 1];
  const double d1 = v[n - 2] - v[n - 3];
  const double d2 = v[n - 1] - v[n - 2];
  if (d2 == 0.0) {
    r.valid = true;
    r.order = std::numeric_limits<double>::infinity();
    return r;
  }
  const double ratio = d1 / d2;
  if (!(ratio > 1.0)) return r;
  r.valid = true;
  r.order = std::log2(ratio);
  r.extrapolated = v[n - 1] + d2 / (ratio - 1.0);
  return r;
}

}  // namespace cellperm
