#pragma once

#include <span>
#include <vector>

#include "adq/norm.hpp"
#include "adq/points.hpp"

namespace adq {

// x -> ratio * rotation * x + translation, with rotation orthogonal.
class Similitude {
 public:
  Similitude() = default;
  Similitude(double ratio, std::vector<double> rotation, Point translation);

  static Similitude scaling(std::size_t dim, double ratio, Point translation = {});
  static Similitude identity(std::size_t dim) { return scaling(dim, 1.0); }

  std::size_t dim() const noexcept { return translation_.size(); }
  double ratio() const noexcept { return ratio_; }
  const std::vector<double>& rotation() const noexcept { return rotation_; }
  const Point& translation() const noexcept { return translation_; }

  void apply(std::span<const double> x, std::span<double> out) const noexcept;
  Point apply(std::span<const double> x) const;
  void apply_inverse(std::span<const double> y, std::span<double> out) const noexcept;
  Point apply_inverse(std::span<const double> y) const;

  // (this o other)(x) = this(other(x)).
  Similitude compose(const Similitude& other) const;
  Similitude inverse() const;

  // Unique fixed point; requires ratio != 1 or a rotation without eigenvalue 1.
  Point fixed_point() const;

  // True when the map scales distances of the given norm by exactly ratio.
  bool is_similarity_for(NormKind norm) const noexcept;

 private:
  double ratio_ = 1.0;
  std::vector<double> rotation_;
  Point translation_;
};

}  // namespace adq
