#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "adq/norm.hpp"
#include "adq/points.hpp"
#include "adq/region.hpp"
#include "adq/similitude.hpp"

namespace adq {

class Measure;

struct UniformBox {
  Point lo;
  Point hi;
};

// Self-similar measure nu = sum_i p_i nu o f_i^{-1} under the strong
// separation condition.
struct SelfSimilarIFS {
  std::vector<Similitude> maps;
  std::vector<double> probs;
  // Euclidean ball mapped into itself by every map; contains the attractor.
  Point bound_center;
  double bound_radius = 0.0;
};

struct Discrete {
  PointSet atoms;
  std::vector<double> weights;
};

// lambda(T) = base(sim(T) & region) / base(region).
struct ConditionalRescaled {
  std::shared_ptr<const Measure> base;
  Region region;
  Similitude sim;
  NormKind norm = NormKind::Euclidean;
  double region_mass = 0.0;
  double region_mass_error = 0.0;
};

// Immutable Borel probability measure on R^q.
class Measure {
 public:
  using Spec = std::variant<UniformBox, SelfSimilarIFS, Discrete, ConditionalRescaled>;

  static Measure uniform_box(Point lo, Point hi);
  static Measure discrete(PointSet atoms, std::vector<double> weights);

  std::size_t dim() const noexcept { return dim_; }
  const Spec& spec() const noexcept { return spec_; }
  const std::string& id() const noexcept { return id_; }
  Measure with_id(std::string id) const;

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&spec_);
  }

 private:
  friend Measure make_ifs(std::vector<Similitude>, std::vector<double>);
  friend Measure condition_rescale(const Measure&, const Region&, const Similitude&, NormKind);

  Measure(Spec spec, std::size_t dim, std::string id)
      : spec_(std::move(spec)), dim_(dim), id_(std::move(id)) {}

  Spec spec_;
  std::size_t dim_ = 0;
  std::string id_;
};

// Throws SSCViolation when the images of the attractor bounding ball are not
// pairwise disjoint, InvalidProbs for bad weights.
Measure make_ifs(std::vector<Similitude> maps, std::vector<double> probs);

// Throws ZeroMassRegion when the base gives the region no mass.
Measure condition_rescale(const Measure& base, const Region& region, const Similitude& sim,
                          NormKind norm = NormKind::Euclidean);

// Validates a probability vector: nonempty, strictly positive, sum 1 +- 1e-12.
void check_probabilities(const std::vector<double>& p);

inline constexpr int kChaosGameBurnIn = 64;
inline constexpr double kMinAcceptance = 1e-6;

// I.i.d. draws, reproducible per seed for any worker count.
PointSet sample(const Measure& measure, std::size_t count, std::uint64_t seed);

struct MassOptions {
  double tolerance = 1e-9;         // unresolved weight allowed
  std::size_t max_nodes = 4000000;  // subdivision nodes expanded before giving up
};

struct MassEstimate {
  double mass = 0.0;
  // Total unresolved weight; the exact mass lies in mass +- abs_error_bound.
  double abs_error_bound = 0.0;
};

MassEstimate mass_in(const Measure& measure, const Region& region, NormKind norm = NormKind::Euclidean,
                     const MassOptions& options = {});

MassEstimate ball_mass(const Measure& measure, std::span<const double> center, double radius,
                       NormKind norm = NormKind::Euclidean, const MassOptions& options = {});

namespace builtin {

Measure uniform_interval();
Measure uniform_square();
// Maps x/3 and x/3 + 2/3 with the given weights.
Measure cantor(double p_left = 0.5);
// Four corner maps of ratio 1/3 on the unit square.
Measure cantor_dust();

}  // namespace builtin

}  // namespace adq
