#pragma once

#include <span>
#include <vector>

#include "adq/norm.hpp"
#include "adq/points.hpp"
#include "adq/similitude.hpp"

namespace adq {

// Closed subsets of R^q built from norm balls. Every ball uses the norm
// passed at query time.
class Region {
 public:
  enum class Kind { Ball, Enlarged, Difference, Union, Intersection };

  // Position of a closed query ball relative to the region.
  enum class Relation { Inside, Outside, Straddles };

  static Region ball(Point center, double radius);
  // Raw closed delta-neighbourhood; see enlarge() in geometry for the
  // normalising constructor.
  static Region enlarged(Region base, double delta);
  static Region difference(Region a, Region b);
  static Region union_of(std::vector<Region> parts);
  static Region intersection(std::vector<Region> parts);

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  const Point& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  double delta() const noexcept { return radius_; }
  const std::vector<Region>& parts() const noexcept { return parts_; }

  bool contains(std::span<const double> x, NormKind norm) const;

  // Distance from x to the region. Defined for Ball, Union and Enlarged
  // trees; throws InvalidArgument for Difference/Intersection.
  double distance_to(std::span<const double> x, NormKind norm) const;
  bool supports_distance() const noexcept;

  // Sound classification of the closed ball B(center, radius): Inside and
  // Outside are certain, Straddles means undecided.
  Relation classify(std::span<const double> center, double radius, NormKind norm) const;

  // Image under a similitude; the map must be a similarity for the norm.
  Region transformed(const Similitude& map) const;

 private:
  Region() = default;

  Kind kind_ = Kind::Ball;
  std::size_t dim_ = 0;
  Point center_;
  double radius_ = 0.0;  // ball radius or enlargement delta
  std::vector<Region> parts_;
};

}  // namespace adq
