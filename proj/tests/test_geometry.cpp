#include <algorithm>
#include <cmath>
#include <numeric>

#include "adq/measure.hpp"
#include "adq/packing.hpp"
#include "adq/rng.hpp"
#include "adq/voronoi.hpp"
#include "doctest.h"

using namespace adq;

namespace {

constexpr NormKind kNorms[] = {NormKind::Euclidean, NormKind::Chebyshev, NormKind::Taxicab};

PointSet random_points(std::size_t q, std::size_t n, Rng& rng, double scale = 1.0) {
  PointSet s(q, n);
  for (auto& v : s.raw()) v = scale * rng.uniform();
  return s;
}

// Lowest index among points within the tie tolerance of the minimum.
std::uint32_t brute_owner(std::span<const double> x, const PointSet& cb, NormKind norm, bool* tie) {
  double best = INFINITY;
  for (std::size_t a = 0; a < cb.size(); ++a) best = std::min(best, distance(x, cb[a], norm));
  std::uint32_t owner = UINT32_MAX;
  std::size_t count = 0;
  for (std::size_t a = 0; a < cb.size(); ++a) {
    if (distance(x, cb[a], norm) <= best + best * kTieTolerance) {
      if (owner == UINT32_MAX) owner = static_cast<std::uint32_t>(a);
      ++count;
    }
  }
  if (tie) *tie = count > 1;
  return owner;
}

// Minimum number of closed radius-balls centred at the given points that
// cover them all, on a line.
std::size_t interval_cover(std::vector<double> xs, double radius) {
  std::sort(xs.begin(), xs.end());
  std::size_t count = 0;
  double reach = -INFINITY;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > reach) {
      ++count;
      const double center = *(std::upper_bound(xs.begin(), xs.end(), xs[i] + radius) - 1);
      reach = center + radius;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("norms are norms") {
  Rng rng(1);
  for (NormKind norm : kNorms) {
    for (std::size_t q : {1u, 2u, 3u, 5u}) {
      for (int t = 0; t < 300; ++t) {
        const auto p = random_points(q, 3, rng, 4.0);
        const double ab = distance(p[0], p[1], norm), bc = distance(p[1], p[2], norm), ac = distance(p[0], p[2], norm);
        CHECK(ac <= ab + bc + 1e-12);
        std::vector<double> v(q), w(q);
        for (std::size_t i = 0; i < q; ++i) {
          v[i] = p[0][i] - p[1][i];
          w[i] = -2.5 * v[i];
        }
        CHECK(norm_of(w, norm) == doctest::Approx(2.5 * norm_of(v, norm)).epsilon(1e-12));
        CHECK(norm_of(v, norm) <= euclidean_to_norm_factor(norm, q) * norm_of(v, NormKind::Euclidean) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("voronoi examples") {
  const PointSet cb(1, {0.0, 1.0});
  const auto a = voronoi_assign(PointSet(1, {0.1, 0.9}), cb);
  CHECK(a.owner == std::vector<std::uint32_t>{0, 1});
  CHECK(a.boundary == std::vector<std::uint8_t>{0, 0});
  const auto t = voronoi_assign(PointSet(1, std::vector{0.5}), cb);
  CHECK(t.owner[0] == 0);
  CHECK(t.boundary[0] == 1);

  Rng rng(2);
  const auto u = sample(builtin::uniform_interval(), 10000, 3);
  const auto q = voronoi_assign(u, PointSet(1, {0.125, 0.375, 0.625, 0.875}));
  std::vector<double> mass(4);
  for (auto o : q.owner) mass[o] += 1e-4;
  for (double m : mass) CHECK(std::abs(m - 0.25) <= 0.02);
}

TEST_CASE("nearest-codepoint search matches brute force in every mode") {
  Rng rng(3);
  for (NormKind norm : kNorms) {
    for (std::size_t q : {1u, 2u, 3u, 4u}) {
      for (std::size_t n : {1u, 2u, 7u, 8u, 31u, 32u, 100u}) {
        const auto cb = random_points(q, n, rng);
        const auto pts = random_points(q, 2000, rng, 1.2);
        const auto fast = voronoi_assign(pts, cb, norm);
        for (std::size_t i = 0; i < pts.size(); ++i) {
          bool tie = false;
          const auto o = brute_owner(pts[i], cb, norm, &tie);
          CHECK(fast.owner[i] == o);
          CHECK(static_cast<bool>(fast.boundary[i]) == tie);
          CHECK(fast.distance[i] == distance(pts[i], cb[o], norm));
        }
      }
    }
  }
}

TEST_CASE("lattice ties resolve identically in every mode") {
  for (NormKind norm : kNorms) {
    for (std::size_t q : {1u, 2u, 3u}) {
      // Integer lattice codebook, queries on the half-integer lattice: heavy ties.
      const std::size_t side = q == 1 ? 64 : q == 2 ? 8 : 4;
      PointSet cb(q);
      std::vector<std::size_t> idx(q, 0);
      for (;;) {
        Point p(q);
        for (std::size_t i = 0; i < q; ++i) p[i] = static_cast<double>(idx[i]);
        cb.push_back(p);
        std::size_t i = 0;
        while (i < q && ++idx[i] == side) idx[i++] = 0;
        if (i == q) break;
      }
      Rng rng(4);
      PointSet pts(q);
      for (int t = 0; t < 3000; ++t) {
        Point p(q);
        for (auto& v : p) v = 0.5 * static_cast<double>(rng.below(2 * side + 1)) - 0.5;
        pts.push_back(p);
      }
      for (bool index : {false, true}) {
        NearestIndex nn(cb, norm, index);
        for (std::size_t i = 0; i < pts.size(); ++i) {
          bool tie = false;
          const auto o = brute_owner(pts[i], cb, norm, &tie);
          const auto h = nn.nearest(pts[i], TieRule::lowest_index());
          CHECK(h.owner == o);
          CHECK(h.tie == tie);
          // Random ties pick from the tied set, reproducibly.
          const auto r1 = nn.nearest(pts[i], TieRule::random(9), 12345 + i);
          const auto r2 = nn.nearest(pts[i], TieRule::random(9), 12345 + i);
          CHECK(r1.owner == r2.owner);
          const double d = distance(pts[i], cb[r1.owner], norm);
          CHECK(d <= h.distance + h.distance * kTieTolerance);
        }
      }
    }
  }
}

TEST_CASE("assignment is idempotent and equivariant under codebook permutation") {
  Rng rng(5);
  const auto cb = random_points(2, 40, rng);
  const auto pts = random_points(2, 5000, rng);
  const auto a = voronoi_assign(pts, cb);
  CHECK(voronoi_assign(pts, cb).owner == a.owner);
  std::vector<std::size_t> perm(cb.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  PointSet pcb(2);
  for (auto j : perm) pcb.push_back(cb[j]);
  const auto b = voronoi_assign(pts, pcb);
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!a.boundary[i]) CHECK(perm[b.owner[i]] == a.owner[i]);
}

TEST_CASE("maximal packing examples") {
  const auto u = sample(builtin::uniform_interval(), 10000, 6);
  const auto p = packing_at_level(u, 2, 2, 7);
  CHECK(p.radius == 0.25);
  CHECK(p.phi() == 2);
  CHECK(is_maximal_packing(p, u));

  const PointSet one(2, {0.0, 0.0});
  CHECK(maximal_packing(one, 0.3, 1).phi() == 1);
  CHECK(maximal_packing(one, 1e-9, 1).phi() == 1);

  const auto c = sample(builtin::cantor(), 100000, 8);
  const auto pc = packing_at_level(c, 3, 2, 9);
  CHECK(pc.radius == doctest::Approx(1.0 / 9));
  CHECK(pc.phi() == 4);
  CHECK(is_maximal_packing(pc, c));

  const auto s = sample(builtin::uniform_square(), 20000, 10);
  for (NormKind norm : kNorms) {
    for (int k = 0; k <= 5; ++k) {
      const auto f = packing_at_level(s, 2, k, 11, norm);
      CHECK(is_maximal_packing(f, s, norm));
      for (std::size_t i = 0; i < f.phi(); ++i)
        for (std::size_t j = i + 1; j < f.phi(); ++j)
          CHECK(distance(f.centers[i], f.centers[j], norm) > 2 * f.radius);
      CHECK(f.e_radius() == f.radius);
      CHECK(f.a_radius() == 2 * f.radius);
      CHECK(f.a_diameter() == 4 * f.radius);
      CHECK(f.d_radius() == 0.875 * f.radius);
    }
  }
}

TEST_CASE("level selection") {
  const auto u = sample(builtin::uniform_interval(), 20000, 12);
  for (std::size_t n : {1u, 4u, 16u, 100u}) {
    const auto f = select_level(u, 2, n, 4.0, 13);
    const auto next = packing_at_level(u, 2, f.k + 1, 13);
    if (n >= 4) {
      CHECK(4 * f.phi() <= n);
      CHECK(4 * next.phi() > n);
    } else {
      CHECK(f.phi() <= n);
    }
  }
  const auto g = select_level(u, 2, 1, 4.0, 13);
  CHECK(g.phi() == 1);
}

TEST_CASE("covering counts") {
  PointSet grid(1);
  std::vector<double> xs;
  for (int i = 0; i < 1000; ++i) {
    xs.push_back(i / 999.0);
    grid.push_back(std::vector{xs.back()});
  }
  const auto c = covering_count(grid, 1.0 / 16);
  CHECK(c <= 9);
  CHECK(c == interval_cover(xs, 1.0 / 16));
  CHECK(covering_count(PointSet(1, std::vector{0.3}), 0.01) == 1);
  CHECK(covering_count(PointSet(1, {0.0, 1.0}), 0.4) == 2);

  Rng rng(14);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v;
    PointSet s(1);
    for (int i = 0; i < 300; ++i) {
      v.push_back(rng.uniform());
      s.push_back(std::vector{v.back()});
    }
    const double r = 0.001 + 0.1 * rng.uniform();
    CHECK(covering_count(s, r) == interval_cover(v, r));
  }
  // In the plane every point ends up within radius of some centre.
  const auto sq = random_points(2, 2000, rng);
  const std::size_t l = covering_count(sq, 0.1);
  CHECK(l >= 1);
  CHECK(l <= static_cast<std::size_t>(std::ceil(std::pow(1.0 / 0.1 + 2, 2))));
}

TEST_CASE("enlarge") {
  const auto n = NormKind::Euclidean;
  const Region b = enlarge(Region::ball({0.0}, 1.0), 1.0 / 16);
  CHECK(b.kind() == Region::Kind::Ball);
  CHECK(b.radius() == 17.0 / 16);
  const int m = 2, k = 3;
  const double rad = std::pow(m, -k);
  PackingFamily f;
  f.m = m;
  f.k = k;
  f.radius = rad;
  f.centers = PointSet(1, std::vector{0.5});
  const Region e = enlarge(f.a_ball(0), f.a_diameter() / 16);
  CHECK(e.radius() == doctest::Approx(2 * rad + 0.25 * rad));
  const Region u = Region::union_of({Region::ball({0.0}, 0.1), Region::ball({1.0}, 0.1)});
  const Region u0 = enlarge(u, 0.0);
  Rng rng(15);
  for (int t = 0; t < 500; ++t) {
    const Point x{rng.uniform() * 1.4 - 0.2};
    CHECK(u0.contains(x, n) == u.contains(x, n));
  }
  const Region d = Region::difference(Region::ball({0.0}, 1.0), Region::ball({0.0}, 0.5));
  const Region de = enlarge(d, 0.0);
  for (int t = 0; t < 500; ++t) {
    const Point x{rng.uniform() * 2.4 - 1.2};
    CHECK(de.contains(x, n) == d.contains(x, n));
  }
  // Nested enlargements merge.
  const Region nested = enlarge(enlarge(u, 0.1), 0.2);
  CHECK(nested.contains(std::vector{0.4}, n));
  CHECK_FALSE(nested.contains(std::vector{0.5}, n));
}

TEST_CASE("packing csv") {
  PackingFamily f;
  f.m = 3;
  f.k = 1;
  f.radius = 1.0 / 3;
  f.centers = PointSet(2, {0.0, 0.25, 1.0, 0.5});
  const std::string csv = packing_csv(f);
  CHECK(csv.find("k,m,radius,x0,x1\n") != std::string::npos);
  CHECK(csv.find("1,3,0.33333333333333331,1,0.5\n") != std::string::npos);
}
