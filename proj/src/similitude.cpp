#include "adq/similitude.hpp"

#include <cmath>

namespace adq {

Similitude::Similitude(double ratio, std::vector<double> rotation, Point translation)
    : ratio_(ratio), rotation_(std::move(rotation)), translation_(std::move(translation)) {
  const std::size_t q = translation_.size();
  if (q == 0) throw Error(ErrorKind::InvalidArgument, "similitude needs dim >= 1");
  if (!(ratio_ > 0.0) || !std::isfinite(ratio_))
    throw Error(ErrorKind::InvalidArgument, "similitude ratio must be positive");
  if (rotation_.size() != q * q)
    throw Error(ErrorKind::InvalidArgument, "rotation must be a q x q matrix");
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      double dot = 0.0;
      for (std::size_t l = 0; l < q; ++l) dot += rotation_[i * q + l] * rotation_[j * q + l];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-10)
        throw Error(ErrorKind::InvalidArgument, "rotation is not orthogonal");
    }
  }
}

Similitude Similitude::scaling(std::size_t dim, double ratio, Point translation) {
  std::vector<double> rot(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) rot[i * dim + i] = 1.0;
  if (translation.empty()) translation.assign(dim, 0.0);
  return {ratio, std::move(rot), std::move(translation)};
}

void Similitude::apply(std::span<const double> x, std::span<double> out) const noexcept {
  const std::size_t q = dim();
  for (std::size_t i = 0; i < q; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < q; ++j) acc += rotation_[i * q + j] * x[j];
    out[i] = ratio_ * acc + translation_[i];
  }
}

Point Similitude::apply(std::span<const double> x) const {
  Point out(dim());
  apply(x, out);
  return out;
}

void Similitude::apply_inverse(std::span<const double> y, std::span<double> out) const noexcept {
  const std::size_t q = dim();
  for (std::size_t j = 0; j < q; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q; ++i) acc += rotation_[i * q + j] * (y[i] - translation_[i]);
    out[j] = acc / ratio_;
  }
}

Point Similitude::apply_inverse(std::span<const double> y) const {
  Point out(dim());
  apply_inverse(y, out);
  return out;
}

Similitude Similitude::compose(const Similitude& other) const {
  const std::size_t q = dim();
  if (other.dim() != q) throw Error(ErrorKind::InvalidArgument, "similitude dimension mismatch");
  std::vector<double> rot(q * q, 0.0);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t l = 0; l < q; ++l) rot[i * q + j] += rotation_[i * q + l] * other.rotation_[l * q + j];
  return {ratio_ * other.ratio_, std::move(rot), apply(other.translation_)};
}

Similitude Similitude::inverse() const {
  const std::size_t q = dim();
  std::vector<double> rot(q * q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) rot[i * q + j] = rotation_[j * q + i];
  Point zero(q, 0.0);
  return {1.0 / ratio_, std::move(rot), apply_inverse(zero)};
}

Point Similitude::fixed_point() const {
  // Solve (I - ratio * R) x = t by Gaussian elimination with partial pivoting.
  const std::size_t q = dim();
  std::vector<double> a(q * (q + 1));
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) a[i * (q + 1) + j] = (i == j ? 1.0 : 0.0) - ratio_ * rotation_[i * q + j];
    a[i * (q + 1) + q] = translation_[i];
  }
  for (std::size_t col = 0; col < q; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < q; ++i)
      if (std::abs(a[i * (q + 1) + col]) > std::abs(a[pivot * (q + 1) + col])) pivot = i;
    if (std::abs(a[pivot * (q + 1) + col]) < 1e-14)
      throw Error(ErrorKind::InvalidArgument, "similitude has no unique fixed point");
    if (pivot != col)
      for (std::size_t j = 0; j <= q; ++j) std::swap(a[col * (q + 1) + j], a[pivot * (q + 1) + j]);
    for (std::size_t i = 0; i < q; ++i) {
      if (i == col) continue;
      const double f = a[i * (q + 1) + col] / a[col * (q + 1) + col];
      for (std::size_t j = col; j <= q; ++j) a[i * (q + 1) + j] -= f * a[col * (q + 1) + j];
    }
  }
  Point x(q);
  for (std::size_t i = 0; i < q; ++i) x[i] = a[i * (q + 1) + q] / a[i * (q + 1) + i];
  return x;
}

bool Similitude::is_similarity_for(NormKind norm) const noexcept {
  if (norm == NormKind::Euclidean) return true;
  // Chebyshev and taxicab isometries among orthogonal maps are the signed permutations.
  const std::size_t q = dim();
  for (std::size_t i = 0; i < q; ++i) {
    int nonzero = 0;
    for (std::size_t j = 0; j < q; ++j) {
      const double v = rotation_[i * q + j];
      if (std::abs(v) < 1e-12) continue;
      if (std::abs(std::abs(v) - 1.0) > 1e-12) return false;
      ++nonzero;
    }
    if (nonzero != 1) return false;
  }
  return true;
}

}  // namespace adq
