#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adq/error.hpp"

namespace adq {

using Point = std::vector<double>;

// Row-major set of points in R^q.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::size_t count) : dim_(dim), data_(dim * count, 0.0) {}
  PointSet(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
    if (dim_ == 0 || data_.size() % dim_ != 0)
      throw Error(ErrorKind::InvalidArgument, "point data size is not a multiple of dim");
  }

  static PointSet from_points(const std::vector<Point>& pts) {
    if (pts.empty()) return {};
    PointSet s(pts.front().size());
    for (const auto& p : pts) s.push_back(p);
    return s;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }

  Point point(std::size_t i) const {
    auto s = (*this)[i];
    return {s.begin(), s.end()};
  }

  void push_back(std::span<const double> p) {
    if (dim_ == 0) dim_ = p.size();
    if (p.size() != dim_) throw Error(ErrorKind::InvalidArgument, "point dimension mismatch");
    data_.insert(data_.end(), p.begin(), p.end());
  }

  void append(const PointSet& other) {
    if (other.empty()) return;
    if (dim_ == 0) dim_ = other.dim_;
    if (other.dim_ != dim_) throw Error(ErrorKind::InvalidArgument, "point dimension mismatch");
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  }

  void reserve(std::size_t count) { data_.reserve(count * dim_); }

  const std::vector<double>& raw() const noexcept { return data_; }
  std::vector<double>& raw() noexcept { return data_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace adq
