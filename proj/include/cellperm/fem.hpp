// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Periodic Taylor-Hood (Q2 velocity / Q1 pressure) discretization of the cell
// Stokes problems. Velocity nodes live on the 2N x 2N periodic lattice of
// vertices, edge midpoints and cell centres; node id = ix + 2N * iy.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cellperm/grid.hpp"
#include "cellperm/sparse.hpp"

namespace cellperm {

enum class CaseKind { Solid, Bubble, TwoFluid };

std::string to_string(CaseKind c);
/// Accepts "solid", "bubble", "two_fluid" (case-insensitive). Throws std::invalid_argument.
CaseKind parse_case(std::string_view s);

/// Position of a velocity node relative to the inclusion.
enum class DofClass : std::uint8_t { Host, Interface, Inclusion };

enum class ConstraintKind { Zero, Tied, MeanZero };

/// Constraint on the raw closed-lattice numbering: velocity dof
/// 2 * (cx + (2N+1) * cy) + comp with 0 <= cx, cy <= 2N. MeanZero entries use
/// `dof` for the gauge number.
struct Constraint {
  ConstraintKind kind;
  int dof;
  int master = -1;  // Tied only
};

struct ConstraintSet {
  std::vector<Constraint> items;
  int count(ConstraintKind k) const;
};

struct VelocityDof {
  int node;
  int comp;  // 0 = x, 1 = y
  DofClass cls;
};

struct PressureDof {
  int vertex;   // periodic vertex id i + N * j
  Region side;  // which fluid's pressure this is
};

/// Free dofs of one cell problem after periodic identification and
/// interface constraints. Immutable.
class FunctionSpace {
 public:
  FunctionSpace(PeriodicGrid grid, CaseKind kind);

  const PeriodicGrid& grid() const { return grid_; }
  CaseKind kind() const { return kind_; }
  int nodes_per_side() const { return m_; }

  int num_velocity() const { return static_cast<int>(vel_.size()); }
  int num_pressure() const { return static_cast<int>(pres_.size()); }
  int num_gauges() const { return gauges_; }
  int size() const { return num_velocity() + num_pressure() + num_gauges(); }
  int pressure_offset() const { return num_velocity(); }
  int gauge_offset() const { return num_velocity() + num_pressure(); }

  const std::vector<VelocityDof>& velocity_dofs() const { return vel_; }
  const std::vector<PressureDof>& pressure_dofs() const { return pres_; }
  /// -1 when the component is eliminated.
  int velocity_index(int node, int comp) const { return vel_index_[2 * node + comp]; }
  int pressure_index(int vertex, Region side) const {
    return side == Region::Host ? p_host_[vertex] : p_incl_[vertex];
  }

  DofClass node_class(int node) const;
  Point2 node_position(int node) const;
  /// Velocity dof indices of one class, ascending.
  std::vector<int> velocity_indices(DofClass cls) const;
  /// Pressure dof indices of one side, ascending.
  std::vector<int> pressure_indices(Region side) const;

  const ConstraintSet& constraints() const { return constraints_; }

 private:
  PeriodicGrid grid_;
  CaseKind kind_;
  int m_;  // 2N
  std::vector<VelocityDof> vel_;
  std::vector<int> vel_index_;
  std::vector<PressureDof> pres_;
  std::vector<int> p_host_, p_incl_;
  int gauges_ = 0;
  ConstraintSet constraints_;
};

std::shared_ptr<const FunctionSpace> build_space(const PeriodicGrid& grid, CaseKind kind);

/// mu = mu1 on the host, z * mu1 in the inclusion.
struct ViscosityField {
  double mu1 = 1.0;
  cplx z{1.0, 0.0};

  cplx at(Region r) const { return r == Region::Host ? cplx(mu1) : z * mu1; }
  ViscosityField conjugate() const { return {mu1, std::conj(z)}; }
  /// Throws std::invalid_argument when z lies on (-inf, 0] or mu1 <= 0.
  void validate_two_fluid() const;
};

/// z-independent pieces of the discrete problem.
///   a_host, a_incl : int_region 2 e(u):e(v) over host / inclusion cells
///   b              : -int q div v (pressure rows, velocity columns)
///   gauge[g]       : int of each pressure basis function over its fluid
///   load[k]        : int e_k . v over the case's fluid domain
struct OperatorBlocks {
  std::shared_ptr<const FunctionSpace> space;
  RealCsr a_host;
  RealCsr a_incl;
  RealCsr b;
  std::vector<std::vector<double>> gauge;
  std::array<std::vector<double>, 2> load;
  std::array<std::vector<double>, 2> load_host;
  std::array<std::vector<double>, 2> load_incl;
};

/// Canonical cell-order assembly (bitwise reproducible).
std::shared_ptr<const OperatorBlocks> assemble_blocks(std::shared_ptr<const FunctionSpace> space);

/// [A B^T 0; B 0 C; 0 C^T 0] from a velocity block, divergence block and
/// gauge columns.
ComplexCsr saddle_matrix(const ComplexCsr& a, const RealCsr& b,
                         const std::vector<std::vector<double>>& gauge);

struct AssembledSystem {
  std::shared_ptr<const OperatorBlocks> blocks;
  ViscosityField visc;
  ComplexCsr velocity_block;  // mu1 (A_host + z A_incl)
  ComplexCsr matrix;
  std::array<CVec, 2> rhs;  // force e_1, e_2

  int size() const { return matrix.rows(); }
};

/// Builds the saddle system for both force directions. For Solid and Bubble
/// z is ignored.
AssembledSystem assemble(std::shared_ptr<const OperatorBlocks> blocks, const ViscosityField& visc);
AssembledSystem assemble(std::shared_ptr<const FunctionSpace> space, const ViscosityField& visc);

/// Discrete solution of one cell problem.
struct CellSolution {
  std::shared_ptr<const OperatorBlocks> blocks;
  CaseKind kind = CaseKind::Solid;
  std::optional<cplx> z;
  int level = 0;
  int direction = 0;  // force e_{direction+1}
  CVec velocity;
  CVec pressure;
  CVec multipliers;
  double residual = 0.0;

  const FunctionSpace& space() const { return *blocks->space; }
};

/// Splits a full saddle-system vector into a CellSolution.
CellSolution unpack_solution(std::shared_ptr<const OperatorBlocks> blocks, const CVec& x,
                             int direction, std::optional<cplx> z, double residual);

/// Velocity, velocity gradient and pressure of a solution at one point of
/// the unit cell. Outside the case's fluid domain everything is zero.
struct PointValue {
  std::array<cplx, 2> u{};
  std::array<std::array<cplx, 2>, 2> grad{};  // grad[c][d] = d u_c / d x_d
  cplx p{};
  bool in_fluid = false;
};

PointValue evaluate(const CellSolution& sol, Point2 x);

/// int_domain u . e_l  (l = 0, 1), domain = the case's fluid region, |Q| = 1.
cplx functional_average(const CellSolution& sol, int l);

/// int 2 mu(y; conj z) conj(e(u^i)) : e(u^j)
cplx functional_energy(const CellSolution& sol_j, const CellSolution& sol_i,
                       const ViscosityField& visc);

/// int_region 2 mu e(u):e(u) for real z.
double region_energy(const CellSolution& sol, Region region, const ViscosityField& visc);

}  // namespace cellperm
