// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include "cellperm/subdomain.hpp"

#include <algorithm>
#include <cmath>

namespace cellperm {

namespace {
enum Which { kOuterDirichlet = 0, kOuterTraction = 1, kInnerDirichlet = 2, kInnerTraction = 3 };
}

struct SplitOperators::Sub {
  std::vector<int> vel, fixed, pres;
  Region region = Region::Host;
  RealCsr a_fixed;  // A[vel, fixed]
  RealCsr b_fixed;  // B[pres, fixed]
  std::unique_ptr<Factorization> lu;
};

SplitOperators::SplitOperators(std::shared_ptr<const OperatorBlocks> blocks, double mu1)
    : blocks_(std::move(blocks)), mu1_(mu1) {
  const FunctionSpace& sp = *blocks_->space;
  if (sp.kind() != CaseKind::TwoFluid)
    throw std::invalid_argument("split operators need the two-fluid space");
  o_ = sp.velocity_indices(DofClass::Host);
  g_ = sp.velocity_indices(DofClass::Interface);
  i_ = sp.velocity_indices(DofClass::Inclusion);
  p_host_ = sp.pressure_indices(Region::Host);
  p_incl_ = sp.pressure_indices(Region::Inclusion);
}

SplitOperators::~SplitOperators() = default;

const SplitOperators::Sub& SplitOperators::sub(int which) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (subs_[which]) return *subs_[which];
  auto s = std::make_unique<Sub>();
  auto merged = [](const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out(a);
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    return out;
  };
  switch (which) {
    case kOuterDirichlet: s->vel = o_; s->fixed = g_; s->pres = p_host_; break;
    case kOuterTraction: s->vel = merged(o_, g_); s->pres = p_host_; break;
    case kInnerDirichlet:
      s->vel = i_; s->fixed = g_; s->pres = p_incl_; s->region = Region::Inclusion;
      break;
    default:
      s->vel = merged(g_, i_); s->pres = p_incl_; s->region = Region::Inclusion;
      break;
  }
  const RealCsr& a = s->region == Region::Host ? blocks_->a_host : blocks_->a_incl;
  const std::vector<double>& gw = blocks_->gauge[s->region == Region::Host ? 0 : 1];
  std::vector<std::vector<double>> gauge(1);
  for (int q : s->pres) gauge[0].push_back(gw[q]);
  const ComplexCsr avv = to_complex(a.submatrix(s->vel, s->vel), mu1_);
  const RealCsr bpv = blocks_->b.submatrix(s->pres, s->vel);
  s->a_fixed = a.submatrix(s->vel, s->fixed);
  s->b_fixed = blocks_->b.submatrix(s->pres, s->fixed);
  s->lu = std::make_unique<Factorization>(saddle_matrix(avv, bpv, gauge));
  subs_[which] = std::move(s);
  return *subs_[which];
}

SplitOperators::Field SplitOperators::solve(const Sub& s, const CVec& trace,
                                            const CVec& load) const {
  const int nv = static_cast<int>(s.vel.size());
  const int np = static_cast<int>(s.pres.size());
  CVec rhs(static_cast<std::size_t>(nv + np + 1), cplx(0.0));
  if (!load.empty())
    for (int k = 0; k < nv; ++k) rhs[k] = load[s.vel[k]];
  if (!s.fixed.empty()) {
    CVec g(s.fixed.size());
    for (std::size_t k = 0; k < s.fixed.size(); ++k) g[k] = trace[s.fixed[k]];
    const CVec ag = s.a_fixed * g;
    const CVec bg = s.b_fixed * g;
    for (int k = 0; k < nv; ++k) rhs[k] -= mu1_ * ag[k];
    for (int k = 0; k < np; ++k) rhs[nv + k] -= bg[k];
  }
  const SolveOutput out = solve_with(*s.lu, {rhs});
  const CVec& x = out.solutions[0];
  Field f;
  f.velocity.assign(static_cast<std::size_t>(num_velocity()), cplx(0.0));
  f.pressure.assign(static_cast<std::size_t>(num_pressure()), cplx(0.0));
  for (int v : s.fixed) f.velocity[v] = trace[v];
  for (int k = 0; k < nv; ++k) f.velocity[s.vel[k]] = x[k];
  for (int k = 0; k < np; ++k) f.pressure[s.pres[k]] = x[nv + k];
  return f;
}

SplitOperators::Field SplitOperators::outer_dirichlet(const CVec& trace, const CVec& force) const {
  return solve(sub(kOuterDirichlet), trace, force);
}

SplitOperators::Field SplitOperators::outer_traction(const CVec& load) const {
  return solve(sub(kOuterTraction), {}, load);
}

SplitOperators::Field SplitOperators::inner_dirichlet(const CVec& trace) const {
  return solve(sub(kInnerDirichlet), trace, {});
}

SplitOperators::Field SplitOperators::inner_traction(const CVec& load) const {
  return solve(sub(kInnerTraction), {}, load);
}

namespace {

CVec region_residual(const RealCsr& a, const RealCsr& b, const std::vector<int>& pres, double mu1,
                     const CVec& u, const CVec& p) {
  CVec r = a * u;
  for (cplx& c : r) c *= mu1;
  // B^T p restricted to this region's pressure rows.
  const auto& rp = b.row_ptr();
  const auto& ci = b.col_index();
  const auto& vv = b.values();
  for (int q : pres) {
    if (p[q] == cplx(0.0)) continue;
    for (int k = rp[q]; k < rp[q + 1]; ++k) r[ci[k]] += vv[k] * p[q];
  }
  return r;
}

}  // namespace

CVec SplitOperators::host_residual(const CVec& u, const CVec& p) const {
  return region_residual(blocks_->a_host, blocks_->b, p_host_, mu1_, u, p);
}

CVec SplitOperators::inclusion_residual(const CVec& u, const CVec& p) const {
  return region_residual(blocks_->a_incl, blocks_->b, p_incl_, mu1_, u, p);
}

double SplitOperators::energy_norm(const CVec& u, Region region) const {
  const RealCsr& a = region == Region::Host ? blocks_->a_host : blocks_->a_incl;
  return std::sqrt(std::max(0.0, mu1_ * bilinear_conj(a, u, u).real()));
}

}  // namespace cellperm
