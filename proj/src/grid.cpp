// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include "cellperm/grid.hpp"

#include <cmath>
#include <sstream>

namespace cellperm {

std::string to_string(Region r) { return r == Region::Host ? "host" : "inclusion"; }

void GeometryConfig::validate() const {
  auto ok = [](double lo, double hi) { return 0.0 < lo && lo < hi && hi < 1.0; };
  if (!ok(inclusion_lo.x, inclusion_hi.x) || !ok(inclusion_lo.y, inclusion_hi.y)) {
    std::ostringstream msg;
    msg << "inclusion must satisfy 0 < lo < hi < 1, got (" << inclusion_lo.x << ", "
        << inclusion_lo.y << ")-(" << inclusion_hi.x << ", " << inclusion_hi.y << ")";
    throw std::invalid_argument(msg.str());
  }
}

int cells_per_side_for_level(int level) {
  if (level < 1 || level > 12) throw std::invalid_argument("level must be in [1, 12]");
  return 4 << (level - 1);
}

namespace {

// Coordinate -> vertex index, requiring an exact hit on the lattice.
int snap(double coord, int n, const char* what) {
  const double scaled = coord * n;
  const double r = std::round(scaled);
  if (std::abs(scaled - r) > 1e-9) {
    std::ostringstream msg;
    msg << "unresolvable geometry: inclusion " << what << " = " << coord
        << " is not a multiple of 1/" << n;
    throw UnresolvableGeometry(msg.str());
  }
  return static_cast<int>(r);
}

}  // namespace

PeriodicGrid::PeriodicGrid(int level, GeometryConfig geom)
    : level_(level), n_(cells_per_side_for_level(level)), geom_(geom) {
  geom_.validate();
  lo_i_ = snap(geom_.inclusion_lo.x, n_, "lo.x");
  lo_j_ = snap(geom_.inclusion_lo.y, n_, "lo.y");
  hi_i_ = snap(geom_.inclusion_hi.x, n_, "hi.x");
  hi_j_ = snap(geom_.inclusion_hi.y, n_, "hi.y");

  cells_.reserve(static_cast<std::size_t>(n_) * n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      const bool inside = i >= lo_i_ && i < hi_i_ && j >= lo_j_ && j < hi_j_;
      cells_.push_back({i, j, inside ? Region::Inclusion : Region::Host});
    }
  }

  const double h = 1.0 / n_;
  auto add_edge = [&](int ia, int ja, int ib, int jb, Point2 normal) {
    edges_.push_back({closed_vertex(ia, ja), closed_vertex(ib, jb), {ia * h, ja * h},
                      {ib * h, jb * h}, normal});
  };
  // Counter-clockwise around the inclusion: bottom, right, top, left.
  for (int i = lo_i_; i < hi_i_; ++i) add_edge(i, lo_j_, i + 1, lo_j_, {0.0, -1.0});
  for (int j = lo_j_; j < hi_j_; ++j) add_edge(hi_i_, j, hi_i_, j + 1, {1.0, 0.0});
  for (int i = hi_i_; i > lo_i_; --i) add_edge(i, hi_j_, i - 1, hi_j_, {0.0, 1.0});
  for (int j = hi_j_; j > lo_j_; --j) add_edge(lo_i_, j, lo_i_, j - 1, {-1.0, 0.0});

  for (int j = 0; j <= n_; ++j) {
    for (int i = 0; i <= n_; ++i) {
      if (i == 0 || i == n_ || j == 0 || j == n_) {
        const int v = closed_vertex(i, j);
        pairs_.push_back({v, periodic_partner(v)});
      }
    }
  }
}

int PeriodicGrid::periodic_partner(int v) const {
  const int i = v % (n_ + 1);
  const int j = v / (n_ + 1);
  const int pi = (i == 0) ? n_ : (i == n_ ? 0 : i);
  const int pj = (j == 0) ? n_ : (j == n_ ? 0 : j);
  return closed_vertex(pi, pj);
}

PeriodicGrid build_grid(int level, const GeometryConfig& geom) { return PeriodicGrid(level, geom); }

std::vector<EdgeNormal> interface_normals(const PeriodicGrid& grid) {
  std::vector<EdgeNormal> out;
  out.reserve(grid.interface_edges().size());
  for (const auto& e : grid.interface_edges()) out.push_back({e, e.normal});
  return out;
}

}  // namespace cellperm
