#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "adq/measure.hpp"
#include "adq/norm.hpp"
#include "adq/points.hpp"

namespace adq {

// An n-point codebook alpha with its order r and provenance.
struct Codebook {
  PointSet points;
  double r = 2.0;
  std::string measure_id;
  double energy = std::numeric_limits<double>::quiet_NaN();  // estimate of e^r_{n,r}
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::string method;

  std::size_t n() const noexcept { return points.size(); }
};

// Minimum pairwise distance; +inf for fewer than two points.
double min_pairwise_distance(const PointSet& points, NormKind norm = NormKind::Euclidean);

struct OptimizeConfig {
  enum class Method { Lloyd, Sgd };

  Method method = Method::Lloyd;
  std::size_t restarts = 8;
  std::size_t max_iters = 0;      // 0: 10000 for Lloyd, 50 for SGD
  std::size_t pool_size = 200000;  // fixed sample pool per optimisation
  std::size_t sgd_batch = 0;      // samples per SGD iteration; 0: min(pool, 1e5)
  double sgd_c0 = 0.0;            // 0: half the pool diameter
  double sgd_decay = 0.0;         // 0: pool size
  double tolerance = 1e-10;       // relative pool-energy improvement to stop at
  std::uint64_t seed = 0;
  NormKind norm = NormKind::Euclidean;

  void validate(double r) const;  // throws InvalidConfig
  std::size_t iteration_cap() const noexcept {
    return max_iters != 0 ? max_iters : (method == Method::Lloyd ? 10000 : 50);
  }
};

std::string_view to_string(OptimizeConfig::Method method) noexcept;

// Empirical measure used by the optimiser: i.i.d. draws with equal weight,
// or the exact atoms for a discrete measure.
struct Pool {
  PointSet points;
  std::vector<double> weights;  // empty: every point weighs 1/size
  bool exact = false;

  std::size_t size() const noexcept { return points.size(); }
  double weight(std::size_t i) const noexcept {
    return weights.empty() ? 1.0 / static_cast<double>(points.size()) : weights[i];
  }
};

Pool make_pool(const Measure& measure, std::size_t samples, std::uint64_t seed);

// Sum over pool points of weight * d(x, alpha)^r.
double pool_energy(const Pool& pool, const PointSet& codebook, double r, NormKind norm = NormKind::Euclidean);

struct ErrorEstimate {
  double energy = 0.0;
  double std_error = 0.0;
};

// Monte Carlo mean of d(x, alpha)^r (exact for discrete measures).
ErrorEstimate estimate_error(const Measure& measure, const PointSet& codebook, double r, std::size_t samples,
                             std::uint64_t seed, NormKind norm = NormKind::Euclidean);

struct OptimizeTrace {
  // Pool energy after every Lloyd step of the winning restart.
  std::vector<double> energies;
  std::vector<double> restart_energies;
};

// Best-of-restarts codebook on a fixed pool. A warm start with n points is
// used as restart 0; with fewer points it is split up to n.
Codebook optimize_on_pool(const Pool& pool, std::size_t n, double r, const OptimizeConfig& config,
                          const PointSet* warm_start = nullptr, OptimizeTrace* trace = nullptr);

Codebook optimize(const Measure& measure, std::size_t n, double r, const OptimizeConfig& config,
                  OptimizeTrace* trace = nullptr);

// Exact optimum for small discrete measures by enumerating every partition
// of the atoms into at most n groups. Throws TooLarge beyond 12 atoms or n > 4.
Codebook brute_force_discrete(const Measure& measure, std::size_t n, double r,
                              NormKind norm = NormKind::Euclidean);

// Seeded random discrete instance for oracle comparisons: q in {1, 2},
// 2..10 atoms in the unit cube with random positive weights, n in 1..3.
struct OracleInstance {
  Measure measure;
  std::size_t n;
};
OracleInstance random_oracle_instance(std::uint64_t seed, std::size_t index);

// CSV, one point per row, preceded by "# n=... r=... seed=... method=... energy=..."
std::string codebook_csv(const Codebook& codebook, const std::string& extra_comment = {});
Codebook parse_codebook_csv(const std::string& text);

}  // namespace adq
