// SPDX-FileCopyrightText: 2026 The cellperm authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>

#include "cellperm/grid.hpp"

using namespace cellperm;

namespace {

int count_region(const PeriodicGrid& g, Region r) {
  int n = 0;
  for (const auto& c : g.cells()) n += c.region == r;
  return n;
}

}  // namespace

TEST_CASE("level 1 grid resolves the quarter points") {
  const PeriodicGrid g = build_grid(1);
  CHECK(g.cells_per_side() == 4);
  CHECK(g.cells().size() == 16);
  CHECK(count_region(g, Region::Inclusion) == 4);
  CHECK(count_region(g, Region::Host) == 12);
}

TEST_CASE("level 3 grid") {
  const PeriodicGrid g = build_grid(3);
  CHECK(g.cells_per_side() == 16);
  CHECK(count_region(g, Region::Inclusion) == 64);
}

TEST_CASE("misaligned inclusion is rejected") {
  GeometryConfig geom;
  geom.inclusion_lo = {0.3, 0.3};
  geom.inclusion_hi = {0.7, 0.7};
  CHECK_THROWS_AS(build_grid(2, geom), UnresolvableGeometry);
  CHECK_THROWS_AS(build_grid(0), std::invalid_argument);
}

TEST_CASE("non-square aligned inclusion") {
  GeometryConfig geom;
  geom.inclusion_lo = {0.125, 0.25};
  geom.inclusion_hi = {0.5, 0.875};
  CHECK_THROWS_AS(build_grid(1, geom), UnresolvableGeometry);
  const PeriodicGrid g = build_grid(2, geom);
  CHECK(count_region(g, Region::Inclusion) == 3 * 5);
}

TEST_CASE("cell areas") {
  for (int level = 1; level <= 5; ++level) {
    const PeriodicGrid g = build_grid(level);
    const double a = g.h() * g.h();
    double total = 0.0, incl = 0.0;
    for (const auto& c : g.cells()) {
      total += a;
      if (c.region == Region::Inclusion) incl += a;
    }
    CHECK(std::abs(total - 1.0) <= 1e-14);
    CHECK(std::abs(incl - 0.25) <= 1e-14);
  }
}

TEST_CASE("interface normals point out of the inclusion") {
  for (int level = 1; level <= 6; ++level) {
    const PeriodicGrid g = build_grid(level);
    double length = 0.0;
    bool saw_right = false, saw_bottom = false;
    for (const auto& [edge, n] : interface_normals(g)) {
      CHECK(std::abs(std::abs(n.x) + std::abs(n.y) - 1.0) == 0.0);
      CHECK((n.x == 0.0 || n.y == 0.0));
      length += std::hypot(edge.b.x - edge.a.x, edge.b.y - edge.a.y);
      const Point2 mid{0.5 * (edge.a.x + edge.b.x), 0.5 * (edge.a.y + edge.b.y)};
      const Point2 probe{mid.x + 1e-3 * n.x, mid.y + 1e-3 * n.y};
      const bool outside = probe.x < 0.25 || probe.x > 0.75 || probe.y < 0.25 || probe.y > 0.75;
      CHECK(outside);
      if (mid.x == 0.75) {
        saw_right = true;
        CHECK(n == Point2{1.0, 0.0});
      }
      if (mid.y == 0.25) {
        saw_bottom = true;
        CHECK(n == Point2{0.0, -1.0});
      }
    }
    CHECK(saw_right);
    CHECK(saw_bottom);
    CHECK(std::abs(length - 2.0) <= 1e-13);
  }
}

TEST_CASE("periodic pairing is an involution") {
  const PeriodicGrid g = build_grid(2);
  const int n = g.cells_per_side();
  for (const auto& p : g.periodic_pairs()) {
    CHECK(g.periodic_partner(p.vertex) == p.partner);
    CHECK(g.periodic_partner(p.partner) == p.vertex);
  }
  CHECK(g.periodic_partner(g.closed_vertex(0, 3)) == g.closed_vertex(n, 3));
  CHECK(g.periodic_partner(g.closed_vertex(2, n)) == g.closed_vertex(2, 0));
  CHECK(g.periodic_partner(g.closed_vertex(3, 3)) == g.closed_vertex(3, 3));
}

TEST_CASE("refinement nests cells") {
  for (int level = 1; level <= 4; ++level) {
    const PeriodicGrid coarse = build_grid(level);
    const PeriodicGrid fine = build_grid(level + 1);
    CHECK(fine.cells_per_side() == 2 * coarse.cells_per_side());
    for (const auto& c : coarse.cells()) {
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj)
          CHECK(fine.region(2 * c.i + di, 2 * c.j + dj) == c.region);
    }
  }
}
