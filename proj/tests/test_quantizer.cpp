#include <algorithm>
#include <cmath>

#include "adq/diagnostics.hpp"
#include "adq/error.hpp"
#include "adq/measure.hpp"
#include "adq/quantizer.hpp"
#include "doctest.h"

using namespace adq;

namespace {

// Exact Cantor energy of a sorted 1-D codebook: a cylinder [x, x+L] of mass
// p lying in one cell contributes p ((x + L/2 - c)^2 + L^2/8).
double cantor_energy_rec(const std::vector<double>& cb, double x, double len, double p, int depth) {
  auto owner = [&](double y) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < cb.size(); ++i)
      if (std::abs(y - cb[i]) < std::abs(y - cb[best])) best = i;
    return best;
  };
  const std::size_t a = owner(x), b = owner(x + len);
  if (a == b || depth == 0) {
    const double c = cb[owner(x + len / 2)];
    const double m = x + len / 2 - c;
    return p * (m * m + len * len / 8);
  }
  return cantor_energy_rec(cb, x, len / 3, p / 2, depth - 1) +
         cantor_energy_rec(cb, x + 2 * len / 3, len / 3, p / 2, depth - 1);
}

double cantor_energy(std::vector<double> cb) {
  std::sort(cb.begin(), cb.end());
  return cantor_energy_rec(cb, 0.0, 1.0, 1.0, 30);
}

// Exact uniform [0,1] energy of a 1-D codebook, r = 2.
double uniform_energy(std::vector<double> cb) {
  std::sort(cb.begin(), cb.end());
  double e = 0.0;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const double lo = i == 0 ? 0.0 : 0.5 * (cb[i - 1] + cb[i]);
    const double hi = i + 1 == cb.size() ? 1.0 : 0.5 * (cb[i] + cb[i + 1]);
    e += (std::pow(hi - cb[i], 3) - std::pow(lo - cb[i], 3)) / 3;
  }
  return e;
}

std::vector<double> coords(const PointSet& s) { return s.raw(); }

OptimizeConfig cfg(std::uint64_t seed, std::size_t pool = 200000) {
  OptimizeConfig c;
  c.seed = seed;
  c.pool_size = pool;
  return c;
}

}  // namespace

TEST_CASE("estimate_error examples") {
  const auto u = builtin::uniform_interval();
  const auto e1 = estimate_error(u, PointSet(1, std::vector{0.5}), 2.0, 200000, 1);
  CHECK(std::abs(e1.energy - 1.0 / 12) <= 3 * e1.std_error);
  CHECK(e1.std_error > 0);
  const auto e4 = estimate_error(u, PointSet(1, {0.125, 0.375, 0.625, 0.875}), 2.0, 200000, 2);
  CHECK(std::abs(e4.energy - 1.0 / 192) <= 3 * e4.std_error);
  const auto ec = estimate_error(builtin::cantor(), PointSet(1, std::vector{0.5}), 2.0, 200000, 3);
  CHECK(std::abs(ec.energy - 0.125) <= 3 * ec.std_error);
  CHECK(estimate_error(u, PointSet(1, std::vector{0.5}), 2.0, 1000, 9).energy ==
        estimate_error(u, PointSet(1, std::vector{0.5}), 2.0, 1000, 9).energy);
  // Discrete measures are evaluated exactly.
  const Measure d = Measure::discrete(PointSet(1, {0.0, 1.0}), {0.25, 0.75});
  const auto ed = estimate_error(d, PointSet(1, std::vector{0.0}), 2.0, 1000, 4);
  CHECK(ed.energy == 0.75);
  CHECK(ed.std_error == 0.0);
}

TEST_CASE("uniform two-point optimum") {
  const auto cb = optimize(builtin::uniform_interval(), 2, 2.0, cfg(5));
  auto x = coords(cb.points);
  std::sort(x.begin(), x.end());
  CHECK(std::abs(x[0] - 0.25) <= 1e-3);
  CHECK(std::abs(x[1] - 0.75) <= 1e-3);
  CHECK(std::abs(cb.energy / (1.0 / 48) - 1) <= 0.005);
  CHECK(std::abs(uniform_energy(x) / (1.0 / 48) - 1) <= 0.005);
  CHECK(cb.n() == 2);
  CHECK(cb.method == "lloyd");
}

TEST_CASE("discrete support is covered exactly") {
  const Measure d = Measure::discrete(PointSet(1, {0.0, 1.0}), {0.5, 0.5});
  const auto cb = optimize(d, 2, 2.0, cfg(6));
  auto x = coords(cb.points);
  std::sort(x.begin(), x.end());
  CHECK(x == std::vector{0.0, 1.0});
  CHECK(cb.energy == 0.0);
}

TEST_CASE("Cantor two-point optimum agrees with a grid search") {
  double best = INFINITY, ba = 0, bb = 0;
  for (int i = 0; i <= 500; ++i)
    for (int j = 500; j <= 1000; ++j) {
      const double e = cantor_energy({i * 1e-3, j * 1e-3});
      if (e < best) {
        best = e;
        ba = i * 1e-3;
        bb = j * 1e-3;
      }
    }
  CHECK(std::abs(ba - 1.0 / 6) <= 2e-3);
  CHECK(std::abs(bb - 5.0 / 6) <= 2e-3);
  CHECK(std::abs(best / (1.0 / 72) - 1) <= 0.01);

  const auto cb = optimize(builtin::cantor(), 2, 2.0, cfg(7));
  auto x = coords(cb.points);
  std::sort(x.begin(), x.end());
  CHECK(std::abs(x[0] - 1.0 / 6) <= 2e-2);
  CHECK(std::abs(x[1] - 5.0 / 6) <= 2e-2);
  CHECK(std::abs(cb.energy / (1.0 / 72) - 1) <= 0.1);
  CHECK(cantor_energy(x) <= best * (1 + 1e-3));
}

TEST_CASE("Lloyd pool energy never increases") {
  for (const Measure& m : {builtin::uniform_square(), builtin::cantor_dust(), builtin::cantor()}) {
    OptimizeTrace trace;
    auto c = cfg(8, 30000);
    c.restarts = 3;
    const auto cb = optimize(m, 12, 2.0, c, &trace);
    REQUIRE(trace.energies.size() >= 2);
    for (std::size_t i = 1; i < trace.energies.size(); ++i)
      CHECK(trace.energies[i] <= trace.energies[i - 1] * (1 + 1e-12));
    CHECK(trace.restart_energies.size() == 3);
    CHECK(cb.energy == doctest::Approx(*std::min_element(trace.restart_energies.begin(), trace.restart_energies.end())).epsilon(1e-12));
    CHECK(min_pairwise_distance(cb.points) > 0);
  }
}

TEST_CASE("brute-force oracle examples") {
  const Measure two = Measure::discrete(PointSet(1, {0.0, 1.0}), {0.5, 0.5});
  const auto b1 = brute_force_discrete(two, 1, 2.0);
  CHECK(b1.points[0][0] == 0.5);
  CHECK(b1.energy == 0.25);
  CHECK(brute_force_discrete(two, 2, 2.0).energy == 0.0);

  const Measure three = Measure::discrete(PointSet(1, {0.0, 1.0, 2.0}), {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto b2 = brute_force_discrete(three, 2, 2.0);
  CHECK(b2.energy == doctest::Approx(1.0 / 6).epsilon(1e-12));
  auto x = coords(b2.points);
  std::sort(x.begin(), x.end());
  const bool left = std::abs(x[0] - 0.5) < 1e-12 && x[1] == 2.0;
  const bool right = x[0] == 0.0 && std::abs(x[1] - 1.5) < 1e-12;
  CHECK((left || right));

  // r = 1: the median minimises absolute deviation.
  const auto med = brute_force_discrete(three, 1, 1.0);
  CHECK(med.points[0][0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(med.energy == doctest::Approx(2.0 / 3).epsilon(1e-9));

  PointSet many(1);
  std::vector<double> w;
  for (int i = 0; i < 13; ++i) {
    many.push_back(std::vector{static_cast<double>(i)});
    w.push_back(1.0 / 13);
  }
  w.back() = 1.0 - 12.0 / 13;
  try {
    brute_force_discrete(Measure::discrete(many, w), 2, 2.0);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
  try {
    brute_force_discrete(three, 5, 2.0);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLarge);
  }
}

TEST_CASE("optimiser matches the exhaustive oracle on random discrete instances") {
  for (std::size_t i = 0; i < 50; ++i) {
    const auto inst = random_oracle_instance(2024, i);
    CHECK(inst.measure.dim() <= 2);
    const auto* d = inst.measure.as<Discrete>();
    REQUIRE(d);
    CHECK(d->atoms.size() <= 10);
    CHECK(inst.n <= 3);
    const auto oracle = brute_force_discrete(inst.measure, inst.n, 2.0);
    const auto got = optimize(inst.measure, inst.n, 2.0, cfg(100 + i));
    CHECK(got.energy <= oracle.energy * (1 + 1e-6) + 1e-300);
    CHECK(got.energy >= oracle.energy * (1 - 1e-6));
  }
}

TEST_CASE("energy is non-increasing in n on a fixed pool") {
  for (const Measure& m : {builtin::uniform_interval(), builtin::cantor(), builtin::uniform_square()}) {
    const Pool pool = make_pool(m, 20000, 9);
    auto c = cfg(10);
    c.restarts = 2;
    double prev = INFINITY;
    PointSet warm;
    for (std::size_t n = 1; n <= 20; ++n) {
      const auto cb = optimize_on_pool(pool, n, 2.0, c, n > 1 ? &warm : nullptr);
      CHECK(cb.energy <= prev);
      CHECK(cb.energy == pool_energy(pool, cb.points, 2.0));
      prev = cb.energy;
      warm = cb.points;
    }
  }
}

TEST_CASE("Lloyd fixed points are covariant under similitudes") {
  const Pool pool = make_pool(builtin::uniform_square(), 20000, 11);
  const double rho = 0.3, c = std::cos(0.5), s = std::sin(0.5);
  const Similitude f(rho, {c, -s, s, c}, {2.0, -1.0});
  Pool image = pool;
  for (std::size_t i = 0; i < pool.size(); ++i) f.apply(pool.points[i], image.points[i]);
  auto conf = cfg(12);
  conf.restarts = 1;
  conf.tolerance = 0.0;
  conf.max_iters = 400;  // both runs take exactly this many steps
  for (std::size_t n : {1u, 3u, 6u}) {
    const auto a = optimize_on_pool(pool, n, 2.0, conf);
    const auto b = optimize_on_pool(image, n, 2.0, conf);
    CHECK(b.energy == doctest::Approx(a.energy * rho * rho).epsilon(1e-9));
    for (std::size_t j = 0; j < n; ++j) {
      const Point fa = f.apply(a.points[j]);
      CHECK(distance(fa, b.points[j], NormKind::Euclidean) <= 1e-9 * rho);
    }
  }
}

TEST_CASE("SGD for other orders and norms") {
  auto c = cfg(13, 100000);
  c.method = OptimizeConfig::Method::Sgd;
  c.restarts = 2;
  // r = 1 on [0,1]: medians of the halves, energy 1/8.
  const auto cb = optimize(builtin::uniform_interval(), 2, 1.0, c);
  auto x = coords(cb.points);
  std::sort(x.begin(), x.end());
  CHECK(std::abs(x[0] - 0.25) <= 0.02);
  CHECK(std::abs(x[1] - 0.75) <= 0.02);
  CHECK(cb.energy <= 0.125 * 1.02);
  CHECK(cb.method == "sgd");
  // Chebyshev on the square, one point: E max(|X|,|Y|)^2 = 1/8 about the centre.
  c.norm = NormKind::Chebyshev;
  const auto ch = optimize(builtin::uniform_square(), 1, 2.0, c);
  CHECK(std::abs(ch.points[0][0] - 0.5) <= 0.03);
  CHECK(std::abs(ch.points[0][1] - 0.5) <= 0.03);
  CHECK(ch.energy <= 0.125 * 1.02);
  c.norm = NormKind::Taxicab;
  const auto tx = optimize(builtin::uniform_square(), 1, 1.0, c);
  CHECK(tx.energy <= 0.5 * 1.02);  // E|X - 1/2| + E|Y - 1/2| = 1/4 + 1/4
}

TEST_CASE("configuration validation") {
  auto bad = [](auto mutate, double r) {
    OptimizeConfig c;
    mutate(c);
    try {
      c.validate(r);
    } catch (const Error& e) {
      return e.kind() == ErrorKind::InvalidConfig;
    }
    return false;
  };
  CHECK(bad([](OptimizeConfig& c) { c.restarts = 0; }, 2.0));
  CHECK(bad([](OptimizeConfig& c) { c.pool_size = 0; }, 2.0));
  CHECK(bad([](OptimizeConfig&) {}, 1.0));  // Lloyd needs r = 2
  CHECK(bad([](OptimizeConfig& c) { c.norm = NormKind::Taxicab; }, 2.0));
  CHECK(bad([](OptimizeConfig& c) { c.tolerance = -1; }, 2.0));
  CHECK(bad([](OptimizeConfig& c) { c.method = OptimizeConfig::Method::Sgd; }, 0.0));
  CHECK_FALSE(bad([](OptimizeConfig& c) { c.method = OptimizeConfig::Method::Sgd; }, 0.5));
}

TEST_CASE("codebook csv round trip") {
  Codebook cb;
  cb.points = PointSet(2, {0.1, 1.0 / 3, -2.5, 1e-17});
  cb.r = 2.0;
  cb.seed = 77;
  cb.method = "lloyd";
  cb.energy = 0.0123456789;
  cb.iterations = 4;
  cb.measure_id = "uniform_square";
  const std::string text = codebook_csv(cb);
  CHECK(text.rfind("# n=2 r=2 seed=77 method=lloyd energy=", 0) == 0);
  const auto back = parse_codebook_csv(text);
  CHECK(back.points == cb.points);
  CHECK(back.energy == cb.energy);
  CHECK(back.seed == 77);
  CHECK(codebook_csv(back) == text);
}
