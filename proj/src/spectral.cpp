// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include "cellperm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cellperm {

namespace {

double max_abs(const Matrix2& m) {
  double v = 0.0;
  for (const auto& row : m)
    for (double x : row) v = std::max(v, std::abs(x));
  return v;
}

std::array<double, 2> sym_eigenvalues(const Matrix2& m) {
  std::array<std::array<cplx, 2>, 2> h{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) h[r][c] = 0.5 * (m[r][c] + m[c][r]);
  return hermitian_eigenvalues(h);
}

double asymmetry(const Matrix2& m) { return std::abs(m[0][1] - m[1][0]); }

}  // namespace

OperatorContext::OperatorContext(CellProblems& problems, int level)
    : level_(level), mu1_(problems.settings().mu1), blocks_(problems.blocks(level, CaseKind::TwoFluid)) {
  std::vector<Triplet<double>> t;
  blocks_->a_host.append_to(t, 0, 0, 1.0);
  blocks_->a_incl.append_to(t, 0, 0, 1.0);
  const int nu = blocks_->space->num_velocity();
  gram_ = RealCsr::from_triplets(nu, nu, std::move(t));
  lu_ = std::make_unique<Factorization>(saddle_matrix(to_complex(gram_, mu1_), blocks_->b, blocks_->gauge));
}

OperatorContext::~OperatorContext() = default;

int OperatorContext::num_velocity() const { return blocks_->space->num_velocity(); }

const SolveReport& OperatorContext::report() const { return lu_->report(); }

CVec OperatorContext::solve_velocity(std::span<const cplx> load) const {
  const int nu = num_velocity();
  if (static_cast<int>(load.size()) != nu) throw std::invalid_argument("load has the wrong length");
  CVec rhs(static_cast<std::size_t>(lu_->size()), cplx(0.0));
  std::copy(load.begin(), load.end(), rhs.begin());
  const SolveOutput out = solve_with(*lu_, {rhs});
  return CVec(out.solutions[0].begin(), out.solutions[0].begin() + nu);
}

CVec OperatorContext::delta_inv(std::span<const cplx> f) const { return solve_velocity(f); }

CVec OperatorContext::delta_inv(int direction) const {
  const auto& f = blocks_->load.at(static_cast<std::size_t>(direction));
  return solve_velocity(CVec(f.begin(), f.end()));
}

CVec OperatorContext::gamma_chi(std::span<const cplx> u) const {
  CVec au = blocks_->a_incl * u;
  for (cplx& c : au) c *= mu1_;
  return solve_velocity(au);
}

CVec OperatorContext::project(std::span<const cplx> u) const {
  CVec gu = gram_ * u;
  for (cplx& c : gu) c *= mu1_;
  return solve_velocity(gu);
}

cplx OperatorContext::inner(std::span<const cplx> u, std::span<const cplx> v) const {
  return mu1_ * bilinear_conj(gram_, v, u);
}

cplx OperatorContext::average(std::span<const cplx> u, int l) const {
  const auto& f = blocks_->load.at(static_cast<std::size_t>(l));
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += f[i] * u[i];
  return s;
}

MomentSequence moments(const OperatorContext& ctx, int max_order) {
  if (max_order < 0) throw std::invalid_argument("moment order must be nonnegative");
  MomentSequence seq;
  seq.lambda.resize(static_cast<std::size_t>(max_order) + 1);
  seq.decay.assign(seq.lambda.size(), 0.0);
  std::array<CVec, 2> w{ctx.delta_inv(0), ctx.delta_inv(1)};
  for (int m = 0; m <= max_order; ++m) {
    if (m > 0)
      for (auto& v : w) v = ctx.gamma_chi(v);
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) seq.lambda[m][k][l] = ctx.average(w[k], l).real();
    if (m > 0) {
      const double prev = max_abs(seq.lambda[m - 1]);
      seq.decay[m] = prev > 0.0 ? max_abs(seq.lambda[m]) / prev : 0.0;
    }
  }
  return seq;
}

PowerResult gamma_norm(const OperatorContext& ctx, double tol, int max_iters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVec start(static_cast<std::size_t>(ctx.num_velocity()));
  for (cplx& c : start) c = nd(rng);
  start = ctx.project(start);
  return power_iterate([&](std::span<const cplx> x, std::span<cplx> y) {
                         const CVec g = ctx.gamma_chi(x);
                         std::copy(g.begin(), g.end(), y.begin());
                       },
                       [&](std::span<const cplx> a, std::span<const cplx> b) { return ctx.inner(a, b); },
                       std::move(start), tol, max_iters);
}

SeriesEstimate series_K(const MomentSequence& mom, cplx s, int order, double gamma_bound) {
  if (order < 0 || static_cast<std::size_t>(order) >= mom.lambda.size())
    throw std::invalid_argument("not enough moments for the requested order");
  if (!(std::abs(s) > gamma_bound))
    throw NonConvergentSeries("series in 1/s diverges for |s| <= " + std::to_string(gamma_bound));
  SeriesEstimate est;
  est.s = s;
  est.order = order;
  const cplx q = -1.0 / s;
  cplx p = 1.0;
  std::vector<double> sizes;
  for (int m = 0; m <= order; ++m) {
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) est.k[k][l] += mom.lambda[m][k][l] * p;
    sizes.push_back(max_abs(mom.lambda[m]) * std::abs(p));
    p *= q;
  }
  const int lo = order / 2;
  if (order > lo && sizes[lo] > 0.0 && sizes[order] > 0.0) {
    est.observed_ratio = std::pow(sizes[order] / sizes[lo], 1.0 / (order - lo));
  } else {
    est.observed_ratio = 0.0;
  }
  const double r = std::max(est.observed_ratio, 0.0);
  est.truncation_bound = r < 1.0 ? sizes.back() * r / (1.0 - r)
                                 : std::numeric_limits<double>::infinity();
  return est;
}

MomentRelation moment_relation_check(CellProblems& problems, const OperatorContext& ctx,
                                     const MomentSequence& mom) {
  if (mom.lambda.size() < 2) throw std::invalid_argument("moment check needs orders 0 and 1");
  const int level = ctx.level();
  MomentRelation rel;
  const CellPair one = solve_pair(problems, CaseKind::TwoFluid, level, cplx(1.0));
  const PermeabilityTensor k1 = permeability(one, Method::VelocityAvg);
  const PermeabilityTensor kd =
      permeability(solve_pair(problems, CaseKind::Solid, level, std::nullopt), Method::VelocityAvg);
  const auto& a_incl = ctx.blocks().a_incl;
  double l0 = 0.0, l1 = 0.0;
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      rel.k_one[k][l] = k1.k[k][l].real();
      rel.k_darcy[k][l] = kd.k[k][l].real();
      rel.mu0[k][l] = rel.k_one[k][l] - rel.k_darcy[k][l];
      rel.lambda1_explicit[k][l] =
          (ctx.mu1() * bilinear_conj(a_incl, one.sol[l].velocity, one.sol[k].velocity)).real();
      l0 = std::max(l0, std::abs(mom.lambda[0][k][l] - rel.k_one[k][l]));
      l1 = std::max(l1, std::abs(mom.lambda[1][k][l] - rel.lambda1_explicit[k][l]));
    }
  }
  rel.lambda0_mismatch = l0 / max_abs(rel.k_one);
  rel.lambda1_mismatch = l1 / max_abs(rel.lambda1_explicit);
  rel.mu0_eigenvalues = sym_eigenvalues(rel.mu0);
  rel.mu0_psd = rel.mu0_eigenvalues[0] >= -1e-8;
  rel.max_asymmetry = asymmetry(rel.mu0);
  rel.min_moment_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < mom.lambda.size(); ++m) {
    rel.max_asymmetry = std::max(rel.max_asymmetry, asymmetry(mom.lambda[m]));
    if (m >= 1)
      rel.min_moment_eigenvalue = std::min(rel.min_moment_eigenvalue, sym_eigenvalues(mom.lambda[m])[0]);
  }
  return rel;
}

std::array<std::array<cplx, 2>, 2> SeriesLedger::partial_sum(cplx z, int kmax) const {
  const cplx t = variable_at(z);
  const int n = static_cast<int>(velocity[0].size());
  const int last = kmax < 0 ? n - 1 : std::min(kmax, n - 1);
  std::array<std::array<cplx, 2>, 2> k{};
  for (int d = 0; d < 2; ++d) {
    cplx p = 1.0;
    for (int j = 0; j <= last; ++j) {
      const CVec& u = velocity[d][j];
      for (int l = 0; l < 2; ++l) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += load[l][i] * u[i];
        k[d][l] += p * s;
      }
      p *= t;
    }
  }
  return k;
}

double SeriesLedger::tail_bound(cplx z) const {
  const double at = std::abs(variable_at(z));
  if (terms.empty() || !std::isfinite(ratio) || at * ratio >= 1.0)
    return std::numeric_limits<double>::infinity();
  const SeriesTerm& last = terms.back();
  const double un = std::hypot(last.norm_in, last.norm_out);
  return std::pow(at, last.k + 1) * un * ratio / (1.0 - at * ratio);
}

namespace {

void finish_ledger(SeriesLedger& led, const SplitOperators& split) {
  for (int d = 0; d < 2; ++d) {
    led.load[d] = split.blocks().load[d];
  }
  for (std::size_t k = 0; k < led.velocity[0].size(); ++k) {
    const CVec& u = led.velocity[0][k];
    led.terms.push_back({static_cast<int>(k), split.energy_norm(u, Region::Inclusion),
                         split.energy_norm(u, Region::Host)});
  }
  const int n = static_cast<int>(led.terms.size());
  led.ratio = std::numeric_limits<double>::quiet_NaN();
  led.radius = std::numeric_limits<double>::quiet_NaN();
  if (n >= 5) {
    const double a = std::hypot(led.terms[3].norm_in, led.terms[3].norm_out);
    const double b = std::hypot(led.terms[n - 1].norm_in, led.terms[n - 1].norm_out);
    if (a > 0.0) {
      led.ratio = std::pow(b / a, 1.0 / (n - 1 - 3));
      led.radius = led.ratio > 0.0 ? 1.0 / led.ratio : std::numeric_limits<double>::infinity();
    }
  }
}

CVec restricted(const CVec& full, const std::vector<int>& rows, double sign) {
  CVec out(full.size(), cplx(0.0));
  for (int r : rows) out[r] = sign * full[r];
  return out;
}

}  // namespace

SeriesLedger large_z_iteration(CellProblems& problems, int level, int kmax) {
  if (kmax < 1) throw std::invalid_argument("kmax must be at least 1");
  const SplitOperators& split = problems.split(level);
  const OperatorBlocks& b = split.blocks();
  const std::size_t nu = static_cast<std::size_t>(split.num_velocity());
  const auto& g = split.interface_dofs();
  SeriesLedger led;
  led.variable = SeriesLedger::Variable::InverseZ;
  led.level = level;
  for (int d = 0; d < 2; ++d) {
    CVec f_host(b.load_host[d].begin(), b.load_host[d].end());
    CVec f_incl(b.load_incl[d].begin(), b.load_incl[d].end());
    // k = 0: no inner flow, outer flow past a rigid inclusion.
    SplitOperators::Field outer = split.outer_dirichlet(CVec(nu, cplx(0.0)), f_host);
    led.velocity[d].push_back(outer.velocity);
    for (int k = 0; k < kmax; ++k) {
      // Host traction on the interface, from the weak-form residual on G.
      CVec r = split.host_residual(outer.velocity, outer.pressure);
      if (k == 0)
        for (int i : g) r[i] -= f_host[i];
      CVec load = restricted(r, g, -1.0);
      if (k == 0)
        for (std::size_t i = 0; i < nu; ++i) load[i] += f_incl[i];
      const SplitOperators::Field inner = split.inner_traction(load);
      outer = split.outer_dirichlet(inner.velocity, {});
      CVec u = outer.velocity;
      for (int i : split.inclusion_dofs()) u[i] = inner.velocity[i];
      led.velocity[d].push_back(std::move(u));
    }
  }
  finish_ledger(led, split);
  return led;
}

SeriesLedger small_z_iteration(CellProblems& problems, int level, int kmax) {
  if (kmax < 1) throw std::invalid_argument("kmax must be at least 1");
  const SplitOperators& split = problems.split(level);
  const OperatorBlocks& b = split.blocks();
  const std::size_t nu = static_cast<std::size_t>(split.num_velocity());
  const auto& g = split.interface_dofs();
  SeriesLedger led;
  led.variable = SeriesLedger::Variable::Z;
  led.level = level;
  for (int d = 0; d < 2; ++d) {
    CVec f_host(b.load_host[d].begin(), b.load_host[d].end());
    // k = 0: the affine inner pressure balances the inner force exactly, so
    // the outer flow is the bubble flow with a traction-free interface.
    CVec load(nu, cplx(0.0));
    for (int i : split.host_dofs()) load[i] = f_host[i];
    for (int i : g) load[i] = f_host[i];
    SplitOperators::Field outer = split.outer_traction(load);
    for (int k = 0; k <= kmax; ++k) {
      const SplitOperators::Field inner = split.inner_dirichlet(outer.velocity);
      CVec u = outer.velocity;
      for (int i : split.inclusion_dofs()) u[i] = inner.velocity[i];
      led.velocity[d].push_back(u);
      if (k == kmax) break;
      // Inclusion traction on the interface drives the next outer term.
      const CVec r = split.inclusion_residual(u, inner.pressure);
      outer = split.outer_traction(restricted(r, g, -1.0));
    }
  }
  finish_ledger(led, split);
  return led;
}

}  // namespace cellperm
