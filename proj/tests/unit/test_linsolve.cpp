// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cellperm/fem.hpp"
#include "cellperm/linsolve.hpp"

using namespace cellperm;

namespace {

Eigen::MatrixXcd dense(const ComplexCsr& a) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) d(r, a.col_index()[k]) += a.values()[k];
  return d;
}

InnerProduct euclid() {
  return [](std::span<const cplx> u, std::span<const cplx> v) { return simd::dot_conj(v, u); };
}

}  // namespace

TEST_CASE("identity system") {
  std::vector<Triplet<cplx>> t;
  for (int i = 0; i < 4; ++i) t.push_back({i, i, 1.0});
  const ComplexCsr a = ComplexCsr::from_triplets(4, 4, t);
  const CVec b{{1, 2}, {-3, 0}, {0, 0.5}, {7, -7}};
  const SolveOutput out = factor_solve(a, {b});
  for (int i = 0; i < 4; ++i) CHECK(out.solutions[0][i] == b[i]);
  CHECK(out.report.relative_residual == 0.0);
}

TEST_CASE("diagonal 2x2 system") {
  const ComplexCsr a = ComplexCsr::from_triplets(2, 2, {{0, 0, 2.0}, {1, 1, 4.0}});
  const SolveOutput out = factor_solve(a, {CVec{2.0, 4.0}});
  CHECK(std::abs(out.solutions[0][0] - 1.0) <= 1e-15);
  CHECK(std::abs(out.solutions[0][1] - 1.0) <= 1e-15);
}

TEST_CASE("singular systems are reported") {
  const ComplexCsr rank_one =
      ComplexCsr::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
  CHECK_THROWS_AS(factor_solve(rank_one, {CVec{1.0, 0.0}}), SingularSystem);
  const ComplexCsr empty_row = ComplexCsr::from_triplets(2, 2, {{0, 0, 1.0}});
  CHECK_THROWS_AS(factor_solve(empty_row, {CVec{1.0, 1.0}}), SingularSystem);
}

TEST_CASE("two-fluid system on the negative real axis is rejected") {
  CHECK_THROWS_AS((ViscosityField{1.0, cplx(-2.0, 0.0)}.validate_two_fluid()), std::invalid_argument);
  CHECK_THROWS_AS((ViscosityField{1.0, cplx(0.0, 0.0)}.validate_two_fluid()), std::invalid_argument);
  CHECK_NOTHROW((ViscosityField{1.0, cplx(-2.0, 1e-3)}.validate_two_fluid()));
}

TEST_CASE("sparse solve matches a dense LU oracle on a level 2 solid system") {
  const auto space = build_space(build_grid(2), CaseKind::Solid);
  const AssembledSystem sys = assemble(space, ViscosityField{});
  REQUIRE(sys.size() <= 2000);
  const Eigen::MatrixXcd d = dense(sys.matrix);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(d);
  const SolveOutput out = factor_solve(sys.matrix, {sys.rhs[0], sys.rhs[1]});
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(sys.rhs[k].data(), sys.size());
    const Eigen::VectorXcd x = lu.solve(b);
    const Eigen::VectorXcd y = Eigen::Map<const Eigen::VectorXcd>(out.solutions[k].data(), sys.size());
    CHECK((x - y).norm() / x.norm() <= 1e-12);
  }
  CHECK(out.report.relative_residual <= 1e-10);
}

TEST_CASE("factorization is deterministic and reusable") {
  const auto space = build_space(build_grid(2), CaseKind::TwoFluid);
  const AssembledSystem sys = assemble(space, ViscosityField{1.0, cplx(3.0, 0.0)});
  const Factorization f1(sys.matrix), f2(sys.matrix);
  const CVec a = f1.solve(sys.rhs[0]);
  const CVec b = f2.solve(sys.rhs[0]);
  CHECK(a == b);
  CHECK(f1.solve(sys.rhs[0]) == a);

  // Real matrix: a conjugated load gives the conjugate solution.
  CVec rhs(sys.size());
  for (int i = 0; i < sys.size(); ++i) rhs[i] = sys.rhs[0][i] * cplx(0.3, 0.8) + sys.rhs[1][i];
  CVec rhs_conj(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs_conj[i] = std::conj(rhs[i]);
  const CVec x = f1.solve(rhs), xc = f1.solve(rhs_conj);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(std::conj(x[i]) - xc[i]));
    scale = std::max(scale, std::abs(x[i]));
  }
  CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("power iteration on small operators") {
  const LinearOp half = [](std::span<const cplx> x, std::span<cplx> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.5 * x[i];
  };
  PowerResult r = power_iterate(half, euclid(), CVec{1.0, 2.0, 3.0}, 1e-14, 100);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-14));

  const LinearOp diag = [](std::span<const cplx> x, std::span<cplx> y) {
    y[0] = 0.1 * x[0];
    y[1] = 0.9 * x[1];
  };
  r = power_iterate(diag, euclid(), CVec{1.0, 1.0}, 1e-15, 500);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 0.9) <= 1e-12);

  r = power_iterate(diag, euclid(), CVec{1.0, 1.0}, 1e-15, 2);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
}
