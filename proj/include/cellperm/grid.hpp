// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cellperm {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Host fluid (Q1) or inclusion (Q2).
enum class Region : std::uint8_t { Host, Inclusion };

std::string to_string(Region r);

/// Axis-aligned rectangular inclusion inside the unit cell.
struct GeometryConfig {
  Point2 inclusion_lo{0.25, 0.25};
  Point2 inclusion_hi{0.75, 0.75};

  /// Throws std::invalid_argument unless 0 < lo < hi < 1 componentwise.
  void validate() const;
  double inclusion_area() const {
    return (inclusion_hi.x - inclusion_lo.x) * (inclusion_hi.y - inclusion_lo.y);
  }
};

/// Raised when the inclusion boundary does not fall on mesh lines.
class UnresolvableGeometry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GridCell {
  int i = 0;  // column, cell covers [i h, (i+1) h] in x
  int j = 0;  // row
  Region region = Region::Host;
};

/// Edge of the inclusion boundary between two lattice vertices.
struct InterfaceEdge {
  int vertex_a = 0;  // closed-lattice vertex ids, see PeriodicGrid::closed_vertex
  int vertex_b = 0;
  Point2 a;
  Point2 b;
  Point2 normal;  // unit, axis aligned, pointing out of the inclusion
};

/// Identification of a boundary vertex of the closed (N+1)x(N+1) lattice with
/// its image on the opposite face(s) of the unit cell.
struct PeriodicPair {
  int vertex = 0;
  int partner = 0;
};

/// Uniform N x N periodic mesh of the unit cell, N = 4 * 2^(level-1).
/// Immutable after construction.
class PeriodicGrid {
 public:
  PeriodicGrid(int level, GeometryConfig geom);

  int level() const { return level_; }
  int cells_per_side() const { return n_; }
  double h() const { return 1.0 / n_; }
  const GeometryConfig& geometry() const { return geom_; }

  std::span<const GridCell> cells() const { return cells_; }
  const GridCell& cell(int i, int j) const { return cells_[static_cast<std::size_t>(j) * n_ + i]; }
  Region region(int i, int j) const { return cell(i, j).region; }

  /// Inclusion bounds as vertex indices: the inclusion is
  /// [lo_i h, hi_i h] x [lo_j h, hi_j h].
  int incl_lo_i() const { return lo_i_; }
  int incl_hi_i() const { return hi_i_; }
  int incl_lo_j() const { return lo_j_; }
  int incl_hi_j() const { return hi_j_; }

  std::span<const InterfaceEdge> interface_edges() const { return edges_; }
  std::span<const PeriodicPair> periodic_pairs() const { return pairs_; }

  /// Vertex id on the closed (N+1)x(N+1) lattice.
  int closed_vertex(int i, int j) const { return j * (n_ + 1) + i; }
  /// Partner of a boundary vertex (identity for interior vertices).
  int periodic_partner(int closed_vertex_id) const;

 private:
  int level_;
  int n_;
  GeometryConfig geom_;
  int lo_i_ = 0, hi_i_ = 0, lo_j_ = 0, hi_j_ = 0;
  std::vector<GridCell> cells_;
  std::vector<InterfaceEdge> edges_;
  std::vector<PeriodicPair> pairs_;
};

/// Grid size for a refinement level.
int cells_per_side_for_level(int level);

PeriodicGrid build_grid(int level, const GeometryConfig& geom = {});

struct EdgeNormal {
  InterfaceEdge edge;
  Point2 normal;
};

std::vector<EdgeNormal> interface_normals(const PeriodicGrid& grid);

}  // namespace cellperm
