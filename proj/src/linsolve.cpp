// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include "cellperm/linsolve.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#ifdef CELLPERM_HAVE_UMFPACK
#include <umfpack.h>
#else
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#endif

namespace cellperm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const ComplexCsr& a) {
  double m = 0.0;
  for (const cplx& v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

#ifdef CELLPERM_HAVE_UMFPACK

// The CSR arrays of A are the CSC arrays of A^T; UMFPACK factors A^T and we
// solve with the (non-conjugate) array transpose.
struct Factorization::Impl {
  ComplexCsr a;
  std::vector<SuiteSparse_long> ap, ai;
  void* numeric = nullptr;
  SolveReport rep;

  ~Impl() {
    if (numeric != nullptr) umfpack_zl_free_numeric(&numeric);
  }
};

Factorization::Factorization(const ComplexCsr& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("factorization needs a square matrix");
  const auto t0 = std::chrono::steady_clock::now();
  Impl& im = *impl_;
  im.a = a;
  im.ap.assign(a.row_ptr().begin(), a.row_ptr().end());
  im.ai.assign(a.col_index().begin(), a.col_index().end());
  const auto n = static_cast<SuiteSparse_long>(a.rows());
  const double* ax = reinterpret_cast<const double*>(im.a.values().data());

  if (a.empty_rows() > 0) throw SingularSystem("singular system: matrix has empty rows");

  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_zl_defaults(control);
  // The auto strategy sees the zero pressure block and goes unsymmetric,
  // which costs 40x in fill on these saddle systems.
  control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
  control[UMFPACK_ORDERING] = UMFPACK_ORDERING_AMD;
  void* symbolic = nullptr;
  SuiteSparse_long status =
      umfpack_zl_symbolic(n, n, im.ap.data(), im.ai.data(), ax, nullptr, &symbolic, control, info);
  if (status != UMFPACK_OK) {
    std::ostringstream msg;
    msg << "symbolic factorization failed (status " << status << ")";
    throw SingularSystem(msg.str());
  }
  status = umfpack_zl_numeric(im.ap.data(), im.ai.data(), ax, nullptr, symbolic, &im.numeric,
                              control, info);
  umfpack_zl_free_symbolic(&symbolic);
  if (status != UMFPACK_OK) {
    std::ostringstream msg;
    msg << "singular system: numeric factorization status " << status;
    throw SingularSystem(msg.str());
  }
  im.rep.n = a.rows();
  im.rep.nnz = a.nnz();
  im.rep.rcond = info[UMFPACK_RCOND];
  im.rep.backend = "umfpack";

  // Pivot growth: diag(U) against the row-scaled input.
  std::vector<double> udx(static_cast<std::size_t>(n)), udz(static_cast<std::size_t>(n));
  std::vector<double> rs(static_cast<std::size_t>(n));
  SuiteSparse_long do_recip = 0;
  status = umfpack_zl_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                                  nullptr, nullptr, nullptr, udx.data(), udz.data(), &do_recip,
                                  rs.data(), im.numeric);
  if (status == UMFPACK_OK) {
    double umax = 0.0;
    for (SuiteSparse_long i = 0; i < n; ++i) umax = std::max(umax, std::hypot(udx[i], udz[i]));
    // Scale factors apply to the rows of A^T, i.e. the columns of our CSR.
    double amax = 0.0;
    const auto& col = a.col_index();
    const auto& val = a.values();
    for (std::size_t k = 0; k < val.size(); ++k) {
      const double r = rs[static_cast<std::size_t>(col[k])];
      const double s = do_recip ? std::abs(val[k]) * r : std::abs(val[k]) / r;
      amax = std::max(amax, s);
    }
    im.rep.pivot_growth = amax > 0.0 ? umax / amax : 0.0;
  }
  im.rep.factor_seconds = seconds_since(t0);
}

CVec Factorization::solve(std::span<const cplx> b) const {
  const Impl& im = *impl_;
  if (static_cast<int>(b.size()) != im.a.rows()) throw std::invalid_argument("rhs size mismatch");
  CVec x(b.size());
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_zl_defaults(control);
  const SuiteSparse_long status = umfpack_zl_solve(
      UMFPACK_Aat, im.ap.data(), im.ai.data(), reinterpret_cast<const double*>(im.a.values().data()),
      nullptr, reinterpret_cast<double*>(x.data()), nullptr,
      reinterpret_cast<const double*>(b.data()), nullptr, im.numeric, control, info);
  if (status != UMFPACK_OK) {
    std::ostringstream msg;
    msg << "triangular solve failed (status " << status << ")";
    throw SingularSystem(msg.str());
  }
  return x;
}

#else  // Eigen SparseLU fallback

struct Factorization::Impl {
  ComplexCsr a;
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
  SolveReport rep;
};

Factorization::Factorization(const ComplexCsr& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("factorization needs a square matrix");
  const auto t0 = std::chrono::steady_clock::now();
  Impl& im = *impl_;
  im.a = a;
  if (a.empty_rows() > 0) throw SingularSystem("singular system: matrix has empty rows");
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(a.nnz()));
  for (int r = 0; r < a.rows(); ++r)
    for (int k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k)
      t.emplace_back(r, a.col_index()[k], a.values()[k]);
  Eigen::SparseMatrix<cplx> m(a.rows(), a.cols());
  m.setFromTriplets(t.begin(), t.end());
  im.lu.compute(m);
  if (im.lu.info() != Eigen::Success) throw SingularSystem("singular system: " + im.lu.lastErrorMessage());
  im.rep.n = a.rows();
  im.rep.nnz = a.nnz();
  im.rep.backend = "eigen-sparselu";
  im.rep.factor_seconds = seconds_since(t0);
}

CVec Factorization::solve(std::span<const cplx> b) const {
  const Impl& im = *impl_;
  Eigen::Map<const Eigen::VectorXcd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXcd xv = im.lu.solve(bv);
  return CVec(xv.data(), xv.data() + xv.size());
}

#endif

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

int Factorization::size() const { return impl_->a.rows(); }
const SolveReport& Factorization::report() const { return impl_->rep; }
const ComplexCsr& Factorization::matrix() const { return impl_->a; }

double relative_residual(const ComplexCsr& a, std::span<const cplx> x, std::span<const cplx> b) {
  CVec r = a * x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double rn = simd::norm(r);
  const double bn = simd::norm(b);
  if (bn == 0.0) return rn;
  return rn / bn;
}

SolveOutput solve_with(const Factorization& f, const std::vector<CVec>& rhs, double tol) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveOutput out;
  out.report = f.report();
  out.report.relative_residual = 0.0;
  out.solutions.reserve(rhs.size());
  const double scale = max_abs(f.matrix());
  for (const CVec& b : rhs) {
    CVec x = f.solve(b);
    double res = relative_residual(f.matrix(), x, b);
    // Zero right-hand side: measure the residual against the matrix scale.
    if (simd::norm(b) == 0.0 && scale > 0.0) res /= scale;
    if (!std::isfinite(res) || res > tol) {
      std::ostringstream msg;
      msg << "singular system: relative residual " << res << " exceeds " << tol;
      throw SingularSystem(msg.str());
    }
    out.report.relative_residual = std::max(out.report.relative_residual, res);
    out.solutions.push_back(std::move(x));
  }
  out.report.solve_seconds = seconds_since(t0);
  return out;
}

SolveOutput factor_solve(const ComplexCsr& a, const std::vector<CVec>& rhs, double tol) {
  const Factorization f(a);
  return solve_with(f, rhs, tol);
}

PowerResult power_iterate(const LinearOp& apply, const InnerProduct& inner, CVec start, double tol,
                          int max_iters) {
  PowerResult res;
  CVec x = std::move(start);
  CVec y(x.size());
  auto normalize = [&](CVec& v) {
    const double nv = std::sqrt(std::max(0.0, inner(v, v).real()));
    if (nv == 0.0) throw std::invalid_argument("power iteration hit the zero vector");
    for (cplx& c : v) c /= nv;
  };
  normalize(x);
  double prev = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    apply(x, y);
    const double rq = inner(y, x).real();  // (A x, x) with (x, x) = 1
    res.value = rq;
    res.iterations = it;
    if (it > 1) {
      res.last_change = std::abs(rq - prev) / std::max(std::abs(rq), 1e-300);
      if (res.last_change <= tol) {
        res.converged = true;
        return res;
      }
    }
    prev = rq;
    x.swap(y);
    normalize(x);
  }
  return res;
}

}  // namespace cellperm
