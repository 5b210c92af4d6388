#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>

namespace adq {

enum class NormKind { Euclidean, Chebyshev, Taxicab };

std::string_view to_string(NormKind norm) noexcept;
NormKind parse_norm(std::string_view name);

inline double norm_of(std::span<const double> v, NormKind norm) noexcept {
  double acc = 0.0;
  switch (norm) {
    case NormKind::Euclidean:
      for (double x : v) acc += x * x;
      return std::sqrt(acc);
    case NormKind::Chebyshev:
      for (double x : v) acc = std::max(acc, std::abs(x));
      return acc;
    case NormKind::Taxicab:
      for (double x : v) acc += std::abs(x);
      return acc;
  }
  return acc;
}

inline double distance(std::span<const double> a, std::span<const double> b, NormKind norm) noexcept {
  double acc = 0.0;
  const std::size_t q = a.size();
  switch (norm) {
    case NormKind::Euclidean:
      for (std::size_t i = 0; i < q; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
      }
      return std::sqrt(acc);
    case NormKind::Chebyshev:
      for (std::size_t i = 0; i < q; ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
      return acc;
    case NormKind::Taxicab:
      for (std::size_t i = 0; i < q; ++i) acc += std::abs(a[i] - b[i]);
      return acc;
  }
  return acc;
}

// Smallest kappa with |v|_norm <= kappa * |v|_2 in dimension q, so a
// Euclidean ball of radius R lies in the norm ball of radius kappa * R.
inline double euclidean_to_norm_factor(NormKind norm, std::size_t q) noexcept {
  return norm == NormKind::Taxicab ? std::sqrt(static_cast<double>(q)) : 1.0;
}

}  // namespace adq
