#include <cmath>
#include <numeric>

#include "adq/error.hpp"
#include "adq/measure.hpp"
#include "adq/measure_io.hpp"
#include "adq/parallel.hpp"
#include "adq/rng.hpp"
#include "doctest.h"

using namespace adq;

namespace {

struct Moments {
  double mean = 0.0, var = 0.0;
};

Moments moments(const PointSet& s, std::size_t coord = 0) {
  Moments m;
  for (std::size_t i = 0; i < s.size(); ++i) m.mean += s[i][coord];
  m.mean /= static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) m.var += (s[i][coord] - m.mean) * (s[i][coord] - m.mean);
  m.var /= static_cast<double>(s.size());
  return m;
}

// Independent Cantor mass of [lo, hi] by cylinder recursion.
double cantor_interval_mass(double a, double len, double lo, double hi, int depth) {
  if (hi < a || lo > a + len) return 0.0;
  if (lo <= a && a + len <= hi) return 1.0;
  if (depth == 0) return 0.5;
  return 0.5 * cantor_interval_mass(a, len / 3, lo, hi, depth - 1) +
         0.5 * cantor_interval_mass(a + 2 * len / 3, len / 3, lo, hi, depth - 1);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an adq::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("similitude scales distances by its ratio") {
  Rng rng(7);
  const double c = std::cos(0.7), s = std::sin(0.7);
  Similitude f(0.37, {c, -s, s, c}, {0.2, -1.5});
  for (int t = 0; t < 200; ++t) {
    Point a{rng.uniform() * 4 - 2, rng.uniform() * 4 - 2}, b{rng.uniform() * 4 - 2, rng.uniform() * 4 - 2};
    const double d0 = distance(a, b, NormKind::Euclidean);
    const double d1 = distance(f.apply(a), f.apply(b), NormKind::Euclidean);
    CHECK(d1 == doctest::Approx(0.37 * d0).epsilon(1e-10));
    const Point back = f.apply_inverse(f.apply(a));
    CHECK(back[0] == doctest::Approx(a[0]).epsilon(1e-12));
    CHECK(back[1] == doctest::Approx(a[1]).epsilon(1e-12));
  }
  const Point fp = f.fixed_point();
  const Point img = f.apply(fp);
  CHECK(img[0] == doctest::Approx(fp[0]));
  CHECK(f.is_similarity_for(NormKind::Euclidean));
  CHECK_FALSE(f.is_similarity_for(NormKind::Chebyshev));
  CHECK(Similitude::scaling(2, 0.5).is_similarity_for(NormKind::Taxicab));
  CHECK(kind_of([] { Similitude(1.0, {1, 1, 0, 1}, {0, 0}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("region membership") {
  const auto n = NormKind::Euclidean;
  const Region b = Region::ball({0.0}, 1.0);
  for (double x : {-1.5, -1.0, -0.3, 0.0, 0.99, 1.0, 1.01}) {
    CHECK(Region::enlarged(b, 0.0).contains(std::vector{x}, n) == b.contains(std::vector{x}, n));
    CHECK_FALSE(Region::difference(b, b).contains(std::vector{x}, n));
  }
  const Region u = Region::union_of({Region::ball({0.0}, 0.1), Region::ball({1.0}, 0.1)});
  CHECK(u.contains(std::vector{0.95}, n));
  CHECK_FALSE(u.contains(std::vector{0.5}, n));
  CHECK(Region::enlarged(u, 0.4).contains(std::vector{0.5}, n));
  CHECK(u.distance_to(std::vector{0.5}, n) == doctest::Approx(0.4));
  const Region i = Region::intersection({Region::ball({0.0}, 1.0), Region::ball({1.5}, 1.0)});
  CHECK(i.contains(std::vector{0.75}, n));
  CHECK_FALSE(i.contains(std::vector{0.25}, n));
  CHECK(kind_of([&] { Region::difference(b, b).distance_to(std::vector{0.0}, n); }) ==
        ErrorKind::InvalidArgument);
  // Chebyshev ball is a square.
  const Region sq = Region::ball({0.0, 0.0}, 1.0);
  CHECK(sq.contains(std::vector{0.9, 0.9}, NormKind::Chebyshev));
  CHECK_FALSE(sq.contains(std::vector{0.9, 0.9}, NormKind::Euclidean));
  CHECK_FALSE(sq.contains(std::vector{0.6, 0.6}, NormKind::Taxicab));
}

TEST_CASE("make_ifs validation") {
  CHECK(kind_of([] {
          make_ifs({Similitude::scaling(1, 0.5), Similitude::scaling(1, 0.5, {0.5})}, {0.5, 0.5});
        }) == ErrorKind::SSCViolation);
  CHECK(kind_of([] {
          make_ifs({Similitude::scaling(1, 1.0 / 3), Similitude::scaling(1, 1.0 / 3, {2.0 / 3})}, {0.5, 0.6});
        }) == ErrorKind::InvalidProbs);
  CHECK(kind_of([] {
          make_ifs({Similitude::scaling(1, 1.0 / 3), Similitude::scaling(1, 1.0 / 3, {2.0 / 3})}, {1.0, 0.0});
        }) == ErrorKind::InvalidProbs);
  const Measure c = builtin::cantor();
  const auto* ifs = c.as<SelfSimilarIFS>();
  REQUIRE(ifs);
  CHECK(ifs->bound_center[0] - ifs->bound_radius <= 1e-12);
  CHECK(ifs->bound_center[0] + ifs->bound_radius >= 1.0 - 1e-12);
  // x/4, x/4 + 3/4 with unequal weights is a valid IFS.
  const Measure w = make_ifs({Similitude::scaling(1, 0.25), Similitude::scaling(1, 0.25, {0.75})}, {1.0 / 3, 2.0 / 3});
  CHECK(w.dim() == 1);
}

TEST_CASE("sample moments") {
  const auto u = sample(builtin::uniform_interval(), 100000, 11);
  const auto mu = moments(u);
  CHECK(std::abs(mu.mean - 0.5) < 0.01);
  CHECK(std::abs(mu.var - 1.0 / 12) < 0.005);

  const auto c = sample(builtin::cantor(), 100000, 12);
  const auto mc = moments(c);
  CHECK(std::abs(mc.mean - 0.5) < 0.01);
  CHECK(std::abs(mc.var - 0.125) < 0.005);

  const Measure d = Measure::discrete(PointSet(2, {0.0, 0.0, 1.0, 1.0}), {0.3, 0.7});
  const auto ds = sample(d, 10000, 13);
  double ones = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) ones += ds[i][0] == 1.0 && ds[i][1] == 1.0;
  CHECK(std::abs(ones / 10000 - 0.7) < 0.02);
}

TEST_CASE("sampling is deterministic for any worker count") {
  for (const Measure& m : {builtin::cantor_dust(), builtin::uniform_square()}) {
    set_thread_count(1);
    const auto a = sample(m, 50000, 99);
    set_thread_count(3);
    const auto b = sample(m, 50000, 99);
    set_thread_count(1);
    CHECK(a == b);
    CHECK_FALSE(a == sample(m, 50000, 100));
  }
}

TEST_CASE("ball_mass examples") {
  const auto u = ball_mass(builtin::uniform_interval(), std::vector{0.5}, 0.25);
  CHECK(u.mass == 0.5);
  CHECK(u.abs_error_bound == 0.0);

  const auto c = ball_mass(builtin::cantor(), std::vector{0.0}, 1.0 / 3);
  CHECK(std::abs(c.mass - 0.5) <= 1e-9);
  CHECK(c.abs_error_bound <= 1e-9);

  const Measure d = Measure::discrete(PointSet(1, {0.0, 1.0}), {0.5, 0.5});
  const auto dm = ball_mass(d, std::vector{0.0}, 0.5);
  CHECK(dm.mass == 0.5);
  CHECK(dm.abs_error_bound == 0.0);

  // Closed form on the square: a disc of radius 0.1 inside has area pi/100.
  const auto sq = ball_mass(builtin::uniform_square(), std::vector{0.5, 0.5}, 0.1);
  CHECK(sq.mass == doctest::Approx(M_PI * 0.01).epsilon(1e-9));
  const auto corner = ball_mass(builtin::uniform_square(), std::vector{0.0, 0.0}, 0.2, NormKind::Chebyshev);
  CHECK(corner.mass == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("Cantor ball masses agree with cylinder recursion") {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const double c = rng.uniform() * 1.2 - 0.1, r = std::pow(10.0, -3.0 * rng.uniform());
    const auto est = ball_mass(builtin::cantor(), std::vector{c}, r);
    const double ref = cantor_interval_mass(0.0, 1.0, c - r, c + r, 40);
    CHECK(std::abs(est.mass - ref) <= est.abs_error_bound + 1e-9);
  }
}

TEST_CASE("ball_mass brackets contain Monte Carlo frequencies") {
  const std::size_t N = 100000;
  for (const Measure& m : {builtin::cantor(), builtin::cantor_dust(), builtin::cantor(1.0 / 3)}) {
    const auto s = sample(m, N, 21);
    Rng rng(22);
    for (int t = 0; t < 100; ++t) {
      Point c(m.dim());
      for (auto& v : c) v = rng.uniform();
      const double r = 0.02 + 0.3 * rng.uniform();
      const auto est = ball_mass(m, c, r);
      std::size_t hits = 0;
      for (std::size_t i = 0; i < N; ++i) hits += distance(s[i], c, NormKind::Euclidean) <= r;
      const double f = static_cast<double>(hits) / N;
      const double p = std::clamp(est.mass, 1.0 / N, 1.0 - 1.0 / N);
      const double se = std::sqrt(p * (1 - p) / N);
      CHECK(f >= est.mass - est.abs_error_bound - 4 * se);
      CHECK(f <= est.mass + est.abs_error_bound + 4 * se);
    }
  }
}

TEST_CASE("mass queries can run out of budget") {
  MassOptions tight{0.0, 50};
  try {
    ball_mass(builtin::cantor(), std::vector{0.4}, 0.3, NormKind::Euclidean, tight);
    FAIL("expected BudgetExhausted");
  } catch (const BudgetExhausted& e) {
    CHECK(e.kind() == ErrorKind::BudgetExhausted);
    const double ref = cantor_interval_mass(0.0, 1.0, 0.1, 0.7, 40);
    CHECK(e.lower() <= ref);
    CHECK(ref <= e.upper());
  }
}

TEST_CASE("condition_rescale") {
  const auto n = NormKind::Euclidean;
  // Uniform conditioned on [0, 1/2] and pushed back by x/2 is uniform again.
  const Measure lu = condition_rescale(builtin::uniform_interval(), Region::ball({0.25}, 0.25), Similitude::scaling(1, 0.5));
  for (double c : {0.1, 0.5, 0.93}) {
    CHECK(ball_mass(lu, std::vector{c}, 0.05).mass == doctest::Approx(0.1).epsilon(1e-9));
  }
  const auto lus = sample(lu, 100000, 3);
  const auto mm = moments(lus);
  CHECK(std::abs(mm.mean - 0.5) < 0.01);
  CHECK(std::abs(mm.var - 1.0 / 12) < 0.005);

  // The left Cantor cylinder is a copy of the whole.
  const Measure cantor = builtin::cantor();
  const Region left = Region::ball({0.0}, 1.0 / 3);
  const Similitude third = Similitude::scaling(1, 1.0 / 3);
  const Measure lc = condition_rescale(cantor, left, third);
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const Point c{rng.uniform()};
    const double r = 0.01 + 0.3 * rng.uniform();
    const auto a = ball_mass(lc, c, r);
    const auto b = ball_mass(cantor, c, r);
    CHECK(std::abs(a.mass - b.mass) <= 1e-6);
  }

  // Push-pull: samples mapped by the similitude land in the region.
  const auto ls = sample(lc, 20000, 4);
  for (std::size_t i = 0; i < ls.size(); ++i) CHECK_UNARY(left.contains(third.apply(ls[i]), n));

  CHECK(kind_of([&] {
          condition_rescale(builtin::uniform_interval(), Region::ball({10.0}, 0.01), Similitude::scaling(1, 0.02));
        }) == ErrorKind::ZeroMassRegion);
}

TEST_CASE("rescaled conditional masses respect the transferred regularity bound") {
  // B = [0,1/3] for Cantor: |B|^{s0} / mu(B) = 1, so lambda_B inherits C2.
  const double s0 = std::log(2.0) / std::log(3.0);
  const Measure cantor = builtin::cantor();
  const Region B = Region::ball({1.0 / 6}, 1.0 / 6);
  const double muB = ball_mass(cantor, std::vector{1.0 / 6}, 1.0 / 6).mass;
  const double factor = std::pow(1.0 / 3, s0) / muB;
  const Measure lam = condition_rescale(cantor, B, Similitude::scaling(1, 1.0 / 3));
  const auto centers = sample(lam, 200, 17);
  double c2 = 0.0;  // sup of mu(B(x,e)) / e^{s0} over the same centres and scales, base measure
  const auto base_centers = sample(cantor, 200, 18);
  for (double e = 1e-3; e < 0.5; e *= 1.7)
    for (std::size_t i = 0; i < base_centers.size(); ++i)
      c2 = std::max(c2, ball_mass(cantor, base_centers[i], e).mass / std::pow(e, s0));
  for (double e = 1e-3; e < 0.5; e *= 1.7)
    for (std::size_t i = 0; i < centers.size(); ++i)
      CHECK(ball_mass(lam, centers[i], e).mass <= factor * c2 * std::pow(e, s0) * 1.05);
}

TEST_CASE("rejection sampling stalls on negligible regions") {
  const Measure tiny = condition_rescale(builtin::uniform_interval(), Region::ball({0.5}, 1e-10),
                                         Similitude::scaling(1, 2e-10, {0.5 - 1e-10}));
  CHECK(kind_of([&] { sample(tiny, 1, 1); }) == ErrorKind::RejectionStall);
}

TEST_CASE("measure JSON round trip") {
  const Measure base = builtin::cantor_dust();
  const Measure cond = condition_rescale(base, Region::union_of({Region::ball({0.1, 0.1}, 0.2), Region::ball({0.9, 0.9}, 0.2)}),
                                         Similitude::scaling(2, 0.5));
  for (const Measure& m : {base, cond, builtin::uniform_square(),
                           Measure::discrete(PointSet(1, {0.1, 1.0 / 3}), {0.25, 0.75})}) {
    const std::string j = measure_to_json(m);
    const Measure back = measure_from_json(j);
    CHECK(measure_to_json(back) == j);
    CHECK(sample(back, 1000, 5) == sample(m, 1000, 5));
  }
  CHECK(kind_of([] { measure_from_json("{\"kind\": \"nope\", \"dim\": 1}"); }) == ErrorKind::Parse);
  CHECK(resolve_measure("cantor_weighted").as<SelfSimilarIFS>()->probs[0] == doctest::Approx(1.0 / 3));
}
