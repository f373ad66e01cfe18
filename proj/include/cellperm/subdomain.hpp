// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Host / inclusion sub-problems carved out of the two-fluid discretization.
// Velocity dofs split into strictly-host (O), interface (G, tangential only)
// and strictly-inclusion (I). Tractions on G are never evaluated pointwise:
// they are the residual of the weak form on the G rows.

#include <memory>
#include <mutex>
#include <vector>

#include "cellperm/fem.hpp"
#include "cellperm/linsolve.hpp"

namespace cellperm {

class SplitOperators {
 public:
  /// `blocks` must come from a TwoFluid space.
  SplitOperators(std::shared_ptr<const OperatorBlocks> blocks, double mu1);
  ~SplitOperators();

  const OperatorBlocks& blocks() const { return *blocks_; }
  double mu1() const { return mu1_; }
  int num_velocity() const { return blocks_->space->num_velocity(); }
  int num_pressure() const { return blocks_->space->num_pressure(); }

  const std::vector<int>& host_dofs() const { return o_; }
  const std::vector<int>& interface_dofs() const { return g_; }
  const std::vector<int>& inclusion_dofs() const { return i_; }

  /// Full-length velocity / pressure vectors; entries outside the solved
  /// sub-problem are either the prescribed trace or zero.
  struct Field {
    CVec velocity;
    CVec pressure;
  };

  /// Host Stokes with velocity on G prescribed from `trace`, force `force`
  /// (full-length, may be empty).
  Field outer_dirichlet(const CVec& trace, const CVec& force) const;
  /// Host Stokes on O+G with u.n = 0 on G and load `load` on those rows.
  Field outer_traction(const CVec& load) const;
  /// Inclusion Stokes on I with velocity on G prescribed from `trace`.
  Field inner_dirichlet(const CVec& trace) const;
  /// Inclusion Stokes on G+I with load `load` on those rows.
  Field inner_traction(const CVec& load) const;

  /// mu1 A_host u + B_host^T p (full-length; the G rows carry the host traction).
  CVec host_residual(const CVec& u, const CVec& p) const;
  /// mu1 A_incl u + B_incl^T p
  CVec inclusion_residual(const CVec& u, const CVec& p) const;

  /// sqrt(u^H mu1 A_region u)
  double energy_norm(const CVec& u, Region region) const;

 private:
  struct Sub;
  const Sub& sub(int which) const;
  Field solve(const Sub& s, const CVec& trace, const CVec& load) const;

  std::shared_ptr<const OperatorBlocks> blocks_;
  double mu1_;
  std::vector<int> o_, g_, i_;
  std::vector<int> p_host_, p_incl_;
  mutable std::mutex mutex_;
  mutable std::unique_ptr<Sub> subs_[4];
};

}  // namespace cellperm
