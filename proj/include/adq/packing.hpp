#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adq/norm.hpp"
#include "adq/points.hpp"
#include "adq/region.hpp"

namespace adq {

// Centres of pairwise disjoint closed balls of radius m^-k, centred on
// support samples. The balls around each centre c:
//   E = B(c, m^-k), A = B(c, 2 m^-k) with diameter |A| = 4 m^-k,
//   D = B(c, (7/8) m^-k).
struct PackingFamily {
  int m = 2;
  int k = 0;
  double radius = 1.0;
  PointSet centers;
  std::uint64_t seed = 0;

  std::size_t phi() const noexcept { return centers.size(); }
  double e_radius() const noexcept { return radius; }
  double a_radius() const noexcept { return 2.0 * radius; }
  double a_diameter() const noexcept { return 4.0 * radius; }
  double d_radius() const noexcept { return 0.875 * radius; }
  Region e_ball(std::size_t i) const { return Region::ball(centers.point(i), e_radius()); }
  Region a_ball(std::size_t i) const { return Region::ball(centers.point(i), a_radius()); }
  Region d_ball(std::size_t i) const { return Region::ball(centers.point(i), d_radius()); }
};

// Greedy pass over the support in seed-shuffled order: a point becomes a
// centre iff it is farther than 2 * radius from every accepted centre.
// Result is maximal over the given points (not necessarily maximum).
PackingFamily maximal_packing(const PointSet& support, double radius, std::uint64_t seed,
                              NormKind norm = NormKind::Euclidean);
PackingFamily packing_at_level(const PointSet& support, int m, int k, std::uint64_t seed,
                               NormKind norm = NormKind::Euclidean);

// Every support point lies within 2 * radius of a centre, and centres are
// pairwise more than 2 * radius apart.
bool is_maximal_packing(const PackingFamily& family, const PointSet& support, NormKind norm = NormKind::Euclidean);

// Greedy cover by closed balls centred at input points. Points are visited in
// lexicographic order; for the first uncovered point p the centre is the point
// of B(p, radius) with the largest first coordinate (the optimal interval
// cover in one dimension).
std::size_t covering_count(const PointSet& points, double radius, NormKind norm = NormKind::Euclidean);

// Closed delta-neighbourhood. Balls grow in place, unions distribute and
// nested enlargements merge.
Region enlarge(const Region& region, double delta);

// Level k(n) = max{k >= 0 : c * phi_k <= n}; when no level qualifies, the
// largest k with phi_k <= n. Levels are scanned from 0 up to max_level.
PackingFamily select_level(const PointSet& support, int m, std::size_t n, double c, std::uint64_t seed,
                           NormKind norm = NormKind::Euclidean, int max_level = 40);

// CSV rows: k, m, radius, x0..x{q-1}.
std::string packing_csv(const PackingFamily& family, const std::string& header_comment = {});

}  // namespace adq
