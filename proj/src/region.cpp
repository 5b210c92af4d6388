#include "adq/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adq {

Region Region::ball(Point center, double radius) {
  if (center.empty()) throw Error(ErrorKind::InvalidArgument, "ball center is empty");
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw Error(ErrorKind::InvalidArgument, "ball radius must be finite and nonnegative");
  Region r;
  r.kind_ = Kind::Ball;
  r.dim_ = center.size();
  r.center_ = std::move(center);
  r.radius_ = radius;
  return r;
}

Region Region::enlarged(Region base, double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw Error(ErrorKind::InvalidArgument, "enlargement must be finite and nonnegative");
  if (delta > 0.0 && !base.supports_distance())
    throw Error(ErrorKind::InvalidArgument,
                "enlarging a difference or intersection is not supported (no exact distance)");
  Region r;
  r.kind_ = Kind::Enlarged;
  r.dim_ = base.dim_;
  r.radius_ = delta;
  r.parts_.push_back(std::move(base));
  return r;
}

Region Region::difference(Region a, Region b) {
  if (a.dim_ != b.dim_) throw Error(ErrorKind::InvalidArgument, "region dimension mismatch");
  Region r;
  r.kind_ = Kind::Difference;
  r.dim_ = a.dim_;
  r.parts_.push_back(std::move(a));
  r.parts_.push_back(std::move(b));
  return r;
}

namespace {

Region::Kind check_parts(const std::vector<Region>& parts) {
  if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "region list is empty");
  for (const auto& p : parts)
    if (p.dim() != parts.front().dim())
      throw Error(ErrorKind::InvalidArgument, "region dimension mismatch");
  return parts.front().kind();
}

}  // namespace

Region Region::union_of(std::vector<Region> parts) {
  check_parts(parts);
  Region r;
  r.kind_ = Kind::Union;
  r.dim_ = parts.front().dim_;
  r.parts_ = std::move(parts);
  return r;
}

Region Region::intersection(std::vector<Region> parts) {
  check_parts(parts);
  Region r;
  r.kind_ = Kind::Intersection;
  r.dim_ = parts.front().dim_;
  r.parts_ = std::move(parts);
  return r;
}

bool Region::supports_distance() const noexcept {
  switch (kind_) {
    case Kind::Ball:
      return true;
    case Kind::Enlarged:
      return parts_.front().supports_distance();
    case Kind::Union:
      return std::all_of(parts_.begin(), parts_.end(), [](const Region& p) { return p.supports_distance(); });
    case Kind::Difference:
    case Kind::Intersection:
      return false;
  }
  return false;
}

double Region::distance_to(std::span<const double> x, NormKind norm) const {
  switch (kind_) {
    case Kind::Ball:
      return std::max(0.0, distance(x, center_, norm) - radius_);
    case Kind::Enlarged:
      return std::max(0.0, parts_.front().distance_to(x, norm) - radius_);
    case Kind::Union: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : parts_) best = std::min(best, p.distance_to(x, norm));
      return best;
    }
    case Kind::Difference:
    case Kind::Intersection:
      break;
  }
  throw Error(ErrorKind::InvalidArgument, "distance to a difference or intersection is not supported");
}

bool Region::contains(std::span<const double> x, NormKind norm) const {
  switch (kind_) {
    case Kind::Ball:
      return distance(x, center_, norm) <= radius_;
    case Kind::Enlarged:
      if (radius_ == 0.0) return parts_.front().contains(x, norm);
      return parts_.front().distance_to(x, norm) <= radius_;
    case Kind::Difference:
      return parts_[0].contains(x, norm) && !parts_[1].contains(x, norm);
    case Kind::Union:
      return std::any_of(parts_.begin(), parts_.end(), [&](const Region& p) { return p.contains(x, norm); });
    case Kind::Intersection:
      return std::all_of(parts_.begin(), parts_.end(), [&](const Region& p) { return p.contains(x, norm); });
  }
  return false;
}

Region::Relation Region::classify(std::span<const double> c, double rho, NormKind norm) const {
  switch (kind_) {
    case Kind::Ball: {
      const double d = distance(c, center_, norm);
      if (d + rho <= radius_) return Relation::Inside;
      if (d > radius_ + rho) return Relation::Outside;
      return Relation::Straddles;
    }
    case Kind::Enlarged: {
      if (radius_ == 0.0) return parts_.front().classify(c, rho, norm);
      // distance-to-set is 1-Lipschitz
      const double d = parts_.front().distance_to(c, norm);
      if (d + rho <= radius_) return Relation::Inside;
      if (d - rho > radius_) return Relation::Outside;
      return Relation::Straddles;
    }
    case Kind::Difference: {
      const Relation a = parts_[0].classify(c, rho, norm);
      if (a == Relation::Outside) return Relation::Outside;
      const Relation b = parts_[1].classify(c, rho, norm);
      if (b == Relation::Inside) return Relation::Outside;
      if (a == Relation::Inside && b == Relation::Outside) return Relation::Inside;
      return Relation::Straddles;
    }
    case Kind::Union: {
      bool all_outside = true;
      for (const auto& p : parts_) {
        const Relation rel = p.classify(c, rho, norm);
        if (rel == Relation::Inside) return Relation::Inside;
        if (rel != Relation::Outside) all_outside = false;
      }
      return all_outside ? Relation::Outside : Relation::Straddles;
    }
    case Kind::Intersection: {
      bool all_inside = true;
      for (const auto& p : parts_) {
        const Relation rel = p.classify(c, rho, norm);
        if (rel == Relation::Outside) return Relation::Outside;
        if (rel != Relation::Inside) all_inside = false;
      }
      return all_inside ? Relation::Inside : Relation::Straddles;
    }
  }
  return Relation::Straddles;
}

Region Region::transformed(const Similitude& map) const {
  if (map.dim() != dim_) throw Error(ErrorKind::InvalidArgument, "similitude dimension mismatch");
  Region r;
  r.kind_ = kind_;
  r.dim_ = dim_;
  switch (kind_) {
    case Kind::Ball:
      r.center_ = map.apply(center_);
      r.radius_ = radius_ * map.ratio();
      return r;
    case Kind::Enlarged:
      r.radius_ = radius_ * map.ratio();
      break;
    default:
      break;
  }
  r.parts_.reserve(parts_.size());
  for (const auto& p : parts_) r.parts_.push_back(p.transformed(map));
  return r;
}

}  // namespace adq
