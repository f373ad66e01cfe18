// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include "cellperm/fem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace cellperm {

std::string to_string(CaseKind c) {
  switch (c) {
    case CaseKind::Solid: return "solid";
    case CaseKind::Bubble: return "bubble";
    case CaseKind::TwoFluid: return "two_fluid";
  }
  return "?";
}

CaseKind parse_case(std::string_view s) {
  std::string t(s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "solid") return CaseKind::Solid;
  if (t == "bubble") return CaseKind::Bubble;
  if (t == "two_fluid" || t == "twofluid" || t == "two-fluid") return CaseKind::TwoFluid;
  throw std::invalid_argument("unknown case '" + std::string(s) + "'");
}

int ConstraintSet::count(ConstraintKind k) const {
  return static_cast<int>(
      std::count_if(items.begin(), items.end(), [k](const Constraint& c) { return c.kind == k; }));
}

void ViscosityField::validate_two_fluid() const {
  if (!(mu1 > 0.0)) throw std::invalid_argument("mu1 must be positive");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument("viscosity ratio z must be finite");
  if (z.imag() == 0.0 && z.real() <= 0.0) {
    std::ostringstream msg;
    msg << "viscosity ratio z = " << z.real() << " lies on the cut (-inf, 0]";
    throw std::invalid_argument(msg.str());
  }
}

// ---------------------------------------------------------------------------
// Function space

FunctionSpace::FunctionSpace(PeriodicGrid grid, CaseKind kind)
    : grid_(std::move(grid)), kind_(kind), m_(2 * grid_.cells_per_side()) {
  const int n = grid_.cells_per_side();
  const int nodes = m_ * m_;
  vel_index_.assign(2 * static_cast<std::size_t>(nodes), -1);

  for (int node = 0; node < nodes; ++node) {
    const DofClass cls = node_class(node);
    const int ix = node % m_, iy = node / m_;
    for (int comp = 0; comp < 2; ++comp) {
      bool free = false;
      switch (cls) {
        case DofClass::Host: free = true; break;
        case DofClass::Inclusion: free = kind_ == CaseKind::TwoFluid; break;
        case DofClass::Interface: {
          if (kind_ == CaseKind::Solid) break;
          const bool vertical = ix == 2 * grid_.incl_lo_i() || ix == 2 * grid_.incl_hi_i();
          const bool horizontal = iy == 2 * grid_.incl_lo_j() || iy == 2 * grid_.incl_hi_j();
          if (vertical && horizontal) break;  // corner: both normals active
          // Only the tangential component survives u.n = 0.
          free = vertical ? comp == 1 : comp == 0;
          break;
        }
      }
      if (free) {
        vel_index_[2 * node + comp] = static_cast<int>(vel_.size());
        vel_.push_back({node, comp, cls});
      }
    }
  }

  p_host_.assign(static_cast<std::size_t>(n) * n, -1);
  p_incl_.assign(static_cast<std::size_t>(n) * n, -1);
  auto strictly_inside = [&](int i, int j) {
    return i > grid_.incl_lo_i() && i < grid_.incl_hi_i() && j > grid_.incl_lo_j() &&
           j < grid_.incl_hi_j();
  };
  auto in_closure = [&](int i, int j) {
    return i >= grid_.incl_lo_i() && i <= grid_.incl_hi_i() && j >= grid_.incl_lo_j() &&
           j <= grid_.incl_hi_j();
  };
  for (int v = 0; v < n * n; ++v) {
    if (!strictly_inside(v % n, v / n)) {
      p_host_[v] = static_cast<int>(pres_.size());
      pres_.push_back({v, Region::Host});
    }
  }
  gauges_ = 1;
  if (kind_ == CaseKind::TwoFluid) {
    // Pressure may jump across the interface: separate inclusion pressure.
    for (int v = 0; v < n * n; ++v) {
      if (in_closure(v % n, v / n)) {
        p_incl_[v] = static_cast<int>(pres_.size());
        pres_.push_back({v, Region::Inclusion});
      }
    }
    gauges_ = 2;
  }

  // Descriptive constraint list on the closed lattice.
  const int mc = m_ + 1;
  for (int cy = 0; cy < mc; ++cy) {
    for (int cx = 0; cx < mc; ++cx) {
      const int raw_node = cx + mc * cy;
      const int px = cx % m_, py = cy % m_;
      for (int comp = 0; comp < 2; ++comp) {
        if (px != cx || py != cy) {
          constraints_.items.push_back(
              {ConstraintKind::Tied, 2 * raw_node + comp, 2 * (px + mc * py) + comp});
        } else if (velocity_index(px + m_ * py, comp) < 0) {
          constraints_.items.push_back({ConstraintKind::Zero, 2 * raw_node + comp});
        }
      }
    }
  }
  for (int g = 0; g < gauges_; ++g) constraints_.items.push_back({ConstraintKind::MeanZero, g});
}

DofClass FunctionSpace::node_class(int node) const {
  const int ix = node % m_, iy = node / m_;
  const int x0 = 2 * grid_.incl_lo_i(), x1 = 2 * grid_.incl_hi_i();
  const int y0 = 2 * grid_.incl_lo_j(), y1 = 2 * grid_.incl_hi_j();
  if (ix < x0 || ix > x1 || iy < y0 || iy > y1) return DofClass::Host;
  if (ix > x0 && ix < x1 && iy > y0 && iy < y1) return DofClass::Inclusion;
  return DofClass::Interface;
}

Point2 FunctionSpace::node_position(int node) const {
  const double d = 1.0 / m_;
  return {(node % m_) * d, (node / m_) * d};
}

std::vector<int> FunctionSpace::velocity_indices(DofClass cls) const {
  std::vector<int> out;
  for (int k = 0; k < num_velocity(); ++k)
    if (vel_[k].cls == cls) out.push_back(k);
  return out;
}

std::vector<int> FunctionSpace::pressure_indices(Region side) const {
  std::vector<int> out;
  for (int k = 0; k < num_pressure(); ++k)
    if (pres_[k].side == side) out.push_back(k);
  return out;
}

std::shared_ptr<const FunctionSpace> build_space(const PeriodicGrid& grid, CaseKind kind) {
  return std::make_shared<const FunctionSpace>(grid, kind);
}

// ---------------------------------------------------------------------------
// Reference element on [0,1]^2, 3x3 Gauss

namespace {

struct ReferenceElement {
  double stiff[18][18] = {};  // local dof a*2+c, scale invariant
  double div[4][18] = {};     // -int psi_b d_c phi_a, multiply by h
  double mass1[9] = {};       // int phi_a, multiply by h^2
  double pmass[4] = {};       // int psi_b, multiply by h^2
};

double lag(int a, double x) {
  switch (a) {
    case 0: return 2.0 * (x - 0.5) * (x - 1.0);
    case 1: return -4.0 * x * (x - 1.0);
    default: return 2.0 * x * (x - 0.5);
  }
}

double dlag(int a, double x) {
  switch (a) {
    case 0: return 4.0 * x - 3.0;
    case 1: return -8.0 * x + 4.0;
    default: return 4.0 * x - 1.0;
  }
}

double lin(int b, double x) { return b == 0 ? 1.0 - x : x; }

ReferenceElement make_reference() {
  ReferenceElement r;
  const double g = std::sqrt(0.6) / 2.0;
  const double pts[3] = {0.5 - g, 0.5, 0.5 + g};
  const double wts[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  for (int qy = 0; qy < 3; ++qy) {
    for (int qx = 0; qx < 3; ++qx) {
      const double xi = pts[qx], eta = pts[qy], w = wts[qx] * wts[qy];
      double phi[9], grad[9][2];
      for (int a = 0; a < 9; ++a) {
        const int ax = a % 3, ay = a / 3;
        phi[a] = lag(ax, xi) * lag(ay, eta);
        grad[a][0] = dlag(ax, xi) * lag(ay, eta);
        grad[a][1] = lag(ax, xi) * dlag(ay, eta);
      }
      double psi[4];
      for (int b = 0; b < 4; ++b) psi[b] = lin(b % 2, xi) * lin(b / 2, eta);

      for (int a = 0; a < 9; ++a) {
        r.mass1[a] += w * phi[a];
        for (int b = 0; b < 9; ++b) {
          const double gg = grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1];
          for (int c = 0; c < 2; ++c) {
            for (int d = 0; d < 2; ++d) {
              // 2 e(phi_a e_c) : e(phi_b e_d)
              const double v = (c == d ? gg : 0.0) + grad[a][d] * grad[b][c];
              r.stiff[2 * a + c][2 * b + d] += w * v;
            }
          }
        }
        for (int b = 0; b < 4; ++b)
          for (int c = 0; c < 2; ++c) r.div[b][2 * a + c] -= w * psi[b] * grad[a][c];
      }
      for (int b = 0; b < 4; ++b) r.pmass[b] += w * psi[b];
    }
  }
  return r;
}

const ReferenceElement& reference() {
  static const ReferenceElement r = make_reference();
  return r;
}

}  // namespace

std::shared_ptr<const OperatorBlocks> assemble_blocks(std::shared_ptr<const FunctionSpace> space) {
  const FunctionSpace& sp = *space;
  const PeriodicGrid& grid = sp.grid();
  const ReferenceElement& ref = reference();
  const int n = grid.cells_per_side();
  const int m = sp.nodes_per_side();
  const double h = grid.h();
  const int nu = sp.num_velocity();
  const int np = sp.num_pressure();
  const bool two_fluid = sp.kind() == CaseKind::TwoFluid;

  auto blocks = std::make_shared<OperatorBlocks>();
  blocks->space = space;
  blocks->gauge.assign(static_cast<std::size_t>(sp.num_gauges()), std::vector<double>(np, 0.0));
  for (int k = 0; k < 2; ++k) {
    blocks->load_host[k].assign(nu, 0.0);
    blocks->load_incl[k].assign(nu, 0.0);
  }

  std::vector<Triplet<double>> th, ti, tb;
  const std::size_t host_cells = static_cast<std::size_t>(n) * n;
  th.reserve(host_cells * 18 * 18);
  if (two_fluid) ti.reserve(host_cells / 4 * 18 * 18);
  tb.reserve(host_cells * 4 * 18);

  int local_u[18];
  int local_p[4];
  for (const GridCell& cell : grid.cells()) {
    const bool incl = cell.region == Region::Inclusion;
    if (incl && !two_fluid) continue;
    for (int a = 0; a < 9; ++a) {
      const int ix = (2 * cell.i + a % 3) % m;
      const int iy = (2 * cell.j + a / 3) % m;
      for (int c = 0; c < 2; ++c) local_u[2 * a + c] = sp.velocity_index(ix + m * iy, c);
    }
    for (int b = 0; b < 4; ++b) {
      const int vx = (cell.i + b % 2) % n;
      const int vy = (cell.j + b / 2) % n;
      local_p[b] = sp.pressure_index(vx + n * vy, cell.region);
    }

    auto& tk = incl ? ti : th;
    auto& load = incl ? blocks->load_incl : blocks->load_host;
    for (int r = 0; r < 18; ++r) {
      if (local_u[r] < 0) continue;
      for (int s = 0; s < 18; ++s) {
        if (local_u[s] < 0) continue;
        tk.push_back({local_u[r], local_u[s], ref.stiff[r][s]});
      }
      load[r % 2][local_u[r]] += h * h * ref.mass1[r / 2];
    }
    const int g = incl ? 1 : 0;
    for (int b = 0; b < 4; ++b) {
      if (local_p[b] < 0) continue;
      blocks->gauge[g][local_p[b]] += h * h * ref.pmass[b];
      for (int s = 0; s < 18; ++s) {
        if (local_u[s] < 0) continue;
        tb.push_back({local_p[b], local_u[s], h * ref.div[b][s]});
      }
    }
  }

  blocks->a_host = RealCsr::from_triplets(nu, nu, std::move(th));
  blocks->a_incl = RealCsr::from_triplets(nu, nu, std::move(ti));
  blocks->b = RealCsr::from_triplets(np, nu, std::move(tb));
  for (int k = 0; k < 2; ++k) {
    blocks->load[k] = blocks->load_host[k];
    if (two_fluid)
      for (int v = 0; v < nu; ++v) blocks->load[k][v] += blocks->load_incl[k][v];
  }
  return blocks;
}

ComplexCsr saddle_matrix(const ComplexCsr& a, const RealCsr& b,
                         const std::vector<std::vector<double>>& gauge) {
  const int nu = a.rows();
  const int np = b.rows();
  const int ng = static_cast<int>(gauge.size());
  if (b.cols() != nu) throw std::invalid_argument("saddle_matrix: block size mismatch");
  std::vector<Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(a.nnz()) + 2 * static_cast<std::size_t>(b.nnz()) +
            2 * static_cast<std::size_t>(np));
  a.append_to(t, 0, 0, cplx(1.0));
  b.append_to(t, nu, 0, cplx(1.0));
  b.transpose().append_to(t, 0, nu, cplx(1.0));
  for (int g = 0; g < ng; ++g) {
    for (int p = 0; p < np; ++p) {
      const double c = gauge[g][p];
      if (c == 0.0) continue;
      t.push_back({nu + p, nu + np + g, cplx(c)});
      t.push_back({nu + np + g, nu + p, cplx(c)});
    }
  }
  return ComplexCsr::from_triplets(nu + np + ng, nu + np + ng, std::move(t));
}

AssembledSystem assemble(std::shared_ptr<const OperatorBlocks> blocks, const ViscosityField& visc) {
  const FunctionSpace& sp = *blocks->space;
  if (sp.kind() == CaseKind::TwoFluid) visc.validate_two_fluid();
  else if (!(visc.mu1 > 0.0)) throw std::invalid_argument("mu1 must be positive");

  AssembledSystem sys;
  sys.blocks = blocks;
  sys.visc = visc;
  const cplx zi = sp.kind() == CaseKind::TwoFluid ? visc.z * visc.mu1 : cplx(0.0);
  sys.velocity_block = combine(blocks->a_host, cplx(visc.mu1), blocks->a_incl, zi);
  sys.matrix = saddle_matrix(sys.velocity_block, blocks->b, blocks->gauge);
  for (int k = 0; k < 2; ++k) {
    sys.rhs[k].assign(static_cast<std::size_t>(sys.matrix.rows()), cplx(0.0));
    for (int v = 0; v < sp.num_velocity(); ++v) sys.rhs[k][v] = blocks->load[k][v];
  }
  return sys;
}

AssembledSystem assemble(std::shared_ptr<const FunctionSpace> space, const ViscosityField& visc) {
  return assemble(assemble_blocks(std::move(space)), visc);
}

CellSolution unpack_solution(std::shared_ptr<const OperatorBlocks> blocks, const CVec& x,
                             int direction, std::optional<cplx> z, double residual) {
  const FunctionSpace& sp = *blocks->space;
  if (static_cast<int>(x.size()) != sp.size()) throw std::invalid_argument("solution size mismatch");
  CellSolution sol;
  sol.kind = sp.kind();
  sol.z = sp.kind() == CaseKind::TwoFluid ? z : std::nullopt;
  sol.level = sp.grid().level();
  sol.direction = direction;
  sol.velocity.assign(x.begin(), x.begin() + sp.pressure_offset());
  sol.pressure.assign(x.begin() + sp.pressure_offset(), x.begin() + sp.gauge_offset());
  sol.multipliers.assign(x.begin() + sp.gauge_offset(), x.end());
  sol.residual = residual;
  sol.blocks = std::move(blocks);
  return sol;
}

PointValue evaluate(const CellSolution& sol, Point2 x) {
  const FunctionSpace& sp = sol.space();
  const PeriodicGrid& grid = sp.grid();
  const int n = grid.cells_per_side();
  const int m = sp.nodes_per_side();
  const double h = grid.h();
  const bool two_fluid = sp.kind() == CaseKind::TwoFluid;
  auto wrap = [](double t) { return t - std::floor(t); };
  const double px = wrap(x.x) / h, py = wrap(x.y) / h;

  // A point on a cell edge belongs to several cells; take one inside the fluid.
  auto candidates = [n](double t) {
    int c = std::min(static_cast<int>(std::floor(t)), n - 1);
    std::array<int, 2> out{c, c};
    if (std::abs(t - std::round(t)) < 1e-12) {
      const int e = static_cast<int>(std::round(t));
      out = {e % n, (e - 1 + n) % n};
    }
    return out;
  };
  PointValue pv;
  int ci = -1, cj = -1;
  for (int i : candidates(px)) {
    for (int j : candidates(py)) {
      if (ci < 0 && (two_fluid || grid.region(i, j) == Region::Host)) {
        ci = i;
        cj = j;
      }
    }
  }
  if (ci < 0) return pv;
  pv.in_fluid = true;
  auto local = [n](double t, int c) {
    double r = t - c;
    if (r > 1.5) r -= n;  // wrapped across the periodic seam
    if (r < -0.5) r += n;
    return std::clamp(r, 0.0, 1.0);
  };
  const double xi = local(px, ci), eta = local(py, cj);
  for (int a = 0; a < 9; ++a) {
    const int ax = a % 3, ay = a / 3;
    const double phi = lag(ax, xi) * lag(ay, eta);
    const double gx = dlag(ax, xi) * lag(ay, eta) / h;
    const double gy = lag(ax, xi) * dlag(ay, eta) / h;
    const int node = (2 * ci + ax) % m + m * ((2 * cj + ay) % m);
    for (int c = 0; c < 2; ++c) {
      const int d = sp.velocity_index(node, c);
      if (d < 0) continue;
      pv.u[c] += phi * sol.velocity[d];
      pv.grad[c][0] += gx * sol.velocity[d];
      pv.grad[c][1] += gy * sol.velocity[d];
    }
  }
  const Region side = grid.region(ci, cj);
  for (int b = 0; b < 4; ++b) {
    const int v = (ci + b % 2) % n + n * ((cj + b / 2) % n);
    const int q = sp.pressure_index(v, side);
    if (q >= 0) pv.p += lin(b % 2, xi) * lin(b / 2, eta) * sol.pressure[q];
  }
  return pv;
}

cplx functional_average(const CellSolution& sol, int l) {
  const auto& f = sol.blocks->load.at(static_cast<std::size_t>(l));
  cplx s = 0.0;
  for (std::size_t v = 0; v < f.size(); ++v) s += f[v] * sol.velocity[v];
  return s;
}

cplx functional_energy(const CellSolution& sol_j, const CellSolution& sol_i,
                       const ViscosityField& visc) {
  const OperatorBlocks& b = *sol_j.blocks;
  CVec au = b.a_host * sol_j.velocity;
  if (b.a_incl.nnz() > 0) {
    const CVec ai = b.a_incl * sol_j.velocity;
    simd::axpy(std::conj(visc.z), ai, au);
  }
  return visc.mu1 * simd::dot_conj(sol_i.velocity, au);
}

double region_energy(const CellSolution& sol, Region region, const ViscosityField& visc) {
  const OperatorBlocks& b = *sol.blocks;
  const RealCsr& a = region == Region::Host ? b.a_host : b.a_incl;
  if (a.nnz() == 0) return 0.0;
  return (visc.at(region) * bilinear_conj(a, sol.velocity, sol.velocity)).real();
}

}  // namespace cellperm
