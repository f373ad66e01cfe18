// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cellperm/spectral.hpp"

using namespace cellperm;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

using Tensor = std::array<std::array<cplx, 2>, 2>;

double max_abs(const Tensor& t) {
  double m = 0.0;
  for (const auto& r : t)
    for (cplx c : r) m = std::max(m, std::abs(c));
  return m;
}

double rel_diff(const Tensor& a, const Tensor& b) {
  double d = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d / max_abs(b);
}

CellProblems& problems() {
  static CellProblems p;
  return p;
}

double worst_symmetry = 0.0;

PermeabilityTensor tensor(CaseKind kind, int level, std::optional<cplx> z,
                          Method m = Method::VelocityAvg) {
  const PermeabilityTensor t = permeability(solve_pair(problems(), kind, level, z), m);
  const double k11 = std::abs(t.k[0][0]);
  worst_symmetry = std::max({worst_symmetry, std::abs(t.k[0][1]) / k11, std::abs(t.k[1][0]) / k11,
                             std::abs(t.k[0][0] - t.k[1][1]) / k11});
  return t;
}

void criterion_1(Outcome& o) {
  double worst_d = 0.0, worst_b = 0.0;
  for (int level = 1; level <= 5; ++level) {
    const double kd = tensor(CaseKind::Solid, level, std::nullopt).k[0][0].real();
    const double kb = tensor(CaseKind::Bubble, level, std::nullopt).k[0][0].real();
    const double kl = tensor(CaseKind::TwoFluid, level, cplx(1e4)).k[0][0].real();
    const double ks = tensor(CaseKind::TwoFluid, level, cplx(1e-4)).k[0][0].real();
    worst_d = std::max(worst_d, std::abs(kl - kd) / kl);
    worst_b = std::max(worst_b, std::abs(ks - kb) / ks);
    o.require(std::abs(kl - kd) <= 5e-4 * kl, "z=1e4 vs solid at level " + std::to_string(level));
    o.require(std::abs(ks - kb) <= 5e-4 * ks, "z=1e-4 vs bubble at level " + std::to_string(level));
  }
  o.detail << "max rel gap to solid " << worst_d << ", to bubble " << worst_b << " (limit 5e-4)";
}

void criterion_2(Outcome& o) {
  struct Column {
    const char* name;
    CaseKind kind;
    std::optional<cplx> z;
    double lo, hi;
  };
  const Column cols[] = {{"solid", CaseKind::Solid, std::nullopt, 0.0123, 0.0136},
                         {"mu2=1", CaseKind::TwoFluid, cplx(1.0), 0.0153, 0.0170},
                         {"bubble", CaseKind::Bubble, std::nullopt, 0.0221, 0.0259}};
  for (const Column& c : cols) {
    std::vector<double> v;
    for (int level = 3; level <= 6; ++level) v.push_back(tensor(c.kind, level, c.z).k[0][0].real());
    const RichardsonEstimate r = richardson(v);
    o.detail << c.name << " L3..L6 " << v[0] << " " << v[1] << " " << v[2] << " " << v[3]
             << " -> " << r.extrapolated << " (p=" << r.order << ") in [" << c.lo << ", " << c.hi
             << "]; ";
    o.require(r.valid, std::string(c.name) + " extrapolation invalid");
    o.require(r.extrapolated >= c.lo && r.extrapolated <= c.hi,
              std::string(c.name) + " outside band");
  }
}

void criterion_3(Outcome& o) {
  double worst = 0.0;
  for (int level = 1; level <= 5; ++level) {
    for (double z : {1e-4, 1.0, 1e2}) {
      const CellPair pair = solve_pair(problems(), CaseKind::TwoFluid, level, cplx(z));
      const auto a = permeability(pair, Method::VelocityAvg);
      const auto e = permeability(pair, Method::Energy);
      worst = std::max(worst, rel_diff(e.k, a.k));
    }
  }
  o.require(worst <= 1e-8, "velocity-average vs energy");
  o.detail << "max rel difference " << worst << " (limit 1e-8)";
}

void criterion_4(Outcome& o) {
  const int level = 3;
  const SweepResult large = limiting_gaps(problems(), level, {1e2, 2e2, 4e2, 8e2});
  const SweepResult small = limiting_gaps(problems(), level, {1e-2, 5e-3, 2.5e-3});
  o.detail << "g_D ratios";
  for (std::size_t i = 0; i + 1 < large.entries.size(); ++i) {
    const double r = large.entries[i + 1].gap_darcy / large.entries[i].gap_darcy;
    o.detail << " " << r;
    o.require(r >= 0.4 && r <= 0.65, "g_D ratio");
  }
  o.detail << "; g_B ratios";
  // Entries are sorted by |z| ascending, so walk from the largest z down.
  for (std::size_t i = small.entries.size() - 1; i > 0; --i) {
    const double r = small.entries[i - 1].gap_bubble / small.entries[i].gap_bubble;
    o.detail << " " << r;
    o.require(r >= 0.4 && r <= 0.65, "g_B ratio");
  }
  o.detail << " (band [0.4, 0.65])";
}

struct Spectral {
  std::unique_ptr<OperatorContext> ctx;
  PowerResult norm;
};

Spectral& spectral_level3() {
  static Spectral s = [] {
    Spectral out;
    out.ctx = std::make_unique<OperatorContext>(problems(), 3);
    out.norm = gamma_norm(*out.ctx);
    return out;
  }();
  return s;
}

void criterion_5(Outcome& o) {
  Spectral& sp = spectral_level3();
  const MomentSequence mom = moments(*sp.ctx, 30);
  for (double s : {2.0, -2.0}) {
    const SeriesEstimate est = series_K(mom, s, 30, sp.norm.value);
    const auto direct = tensor(CaseKind::TwoFluid, 3, z_from_s(s));
    const double err = rel_diff(est.k, direct.k);
    const double bound = sp.norm.value / std::abs(s) + 1e-3;
    o.detail << "s=" << s << ": rel err " << err << ", ratio " << est.observed_ratio << " <= "
             << bound << "; ";
    o.require(err <= 1e-6, "series vs direct");
    o.require(est.observed_ratio <= bound, "convergence ratio");
  }
}

void criterion_6(Outcome& o) {
  Spectral& sp = spectral_level3();
  const OperatorContext& ctx = *sp.ctx;
  o.require(sp.norm.value > 0.0 && sp.norm.value <= 1.0 + 1e-8, "norm in (0, 1+1e-8]");
  o.require(sp.norm.converged, "power iteration converged");
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  auto random_field = [&] {
    CVec r(static_cast<std::size_t>(ctx.num_velocity()));
    for (cplx& c : r) c = cplx(nd(rng), nd(rng));
    return ctx.project(r);
  };
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const CVec u = random_field();
    const CVec v = random_field();
    const cplx lhs = ctx.inner(ctx.gamma_chi(u), v);
    const cplx rhs = ctx.inner(u, ctx.gamma_chi(v));
    const double scale = std::sqrt(ctx.inner(u, u).real() * ctx.inner(v, v).real());
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  o.require(worst <= 1e-10, "self-adjointness defect");
  o.detail << "norm " << sp.norm.value << " after " << sp.norm.iterations
           << " iterations; worst self-adjointness defect " << worst << " (limit 1e-10)";
}

void criterion_7(Outcome& o) {
  const std::vector<cplx> samples{{1, 1},   {1, -1},     {0.1, 2},   {10, 0.5},
                                  {-3, 0.1}, {0.01, 0.01}, {100, -50}, {-0.5, -0.5}};
  const StieltjesReport rep = stieltjes_checks(problems(), 3, samples, {0.1, 0.5, 1, 2, 10}, 1e-10);
  double sign = -1e300, pos = 1e300, mono = -1e300, conj = 0.0;
  for (const auto& c : rep.checks) {
    if (c.property == "imaginary_part_sign") sign = std::max(sign, c.value);
    if (c.property == "positivity") pos = std::min(pos, c.value);
    if (c.property == "monotonicity") mono = std::max(mono, c.value);
    if (c.property == "conjugation") conj = std::max(conj, c.value);
  }
  o.require(rep.passed(), rep.first_failure());
  o.detail << rep.checks.size() << " checks; max eig Im-part " << sign << ", min eig K " << pos
           << ", max eig K(x1)-K(x2) " << mono << ", conjugation " << conj;
}

void criterion_8(Outcome& o) {
  const int level = 3;
  const SeriesLedger large = large_z_iteration(problems(), level, 8);
  const SplitOperators& split = problems().split(level);
  bool zero_inner = true;
  for (int d = 0; d < 2; ++d) {
    for (int i : split.inclusion_dofs()) zero_inner &= large.velocity[d][0][i] == cplx(0.0);
    for (int i : split.interface_dofs()) zero_inner &= large.velocity[d][0][i] == cplx(0.0);
  }
  o.require(zero_inner && large.terms[0].norm_in == 0.0, "u0 inside the inclusion is zero");
  const double e_large = rel_diff(large.partial_sum(20.0), tensor(CaseKind::TwoFluid, level, cplx(20.0)).k);
  o.require(e_large <= 1e-4, "large-z partial sum");
  const SeriesLedger small = small_z_iteration(problems(), level, 8);
  const double e_small = rel_diff(small.partial_sum(0.02), tensor(CaseKind::TwoFluid, level, cplx(0.02)).k);
  o.require(e_small <= 1e-4, "small-z partial sum");
  o.detail << "z=20 rel err " << e_large << " (ratio " << large.ratio << "), z=0.02 rel err " << e_small
           << " (ratio " << small.ratio << "), u0 inside inclusion exactly zero: " << (zero_inner ? "yes" : "no");
}

void criterion_9(Outcome& o) {
  o.require(worst_symmetry <= 1e-8, "symmetry");
  o.detail << "worst relative |k12|, |k21|, |k11-k22| over every tensor computed: " << worst_symmetry;
}

void criterion_10(Outcome& o) {
  const int level = 4;
  OperatorContext ctx(problems(), level);
  const MomentSequence mom = moments(ctx, 2);
  const MomentRelation rel = moment_relation_check(problems(), ctx, mom);
  o.require(rel.lambda1_mismatch <= 1e-8, "first moment");
  o.require(rel.lambda0_mismatch <= 1e-8, "zeroth moment");
  o.require(rel.mu0_eigenvalues[0] >= -1e-8, "mu0 positive semidefinite");
  o.detail << "level " << level << ": first-moment mismatch " << rel.lambda1_mismatch
           << ", zeroth-moment mismatch " << rel.lambda0_mismatch << ", mu0 eigenvalues "
           << rel.mu0_eigenvalues[0] << " " << rel.mu0_eigenvalues[1];
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"limiting-case agreement", criterion_1}, {"converged values", criterion_2},
      {"energy identity", criterion_3},         {"asymptotic rates", criterion_4},
      {"spectral series", criterion_5},         {"operator properties", criterion_6},
      {"Stieltjes properties", criterion_7},    {"series construction", criterion_8},
      {"symmetry", criterion_9},                {"moment cross-check", criterion_10}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.str().c_str(), secs);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
