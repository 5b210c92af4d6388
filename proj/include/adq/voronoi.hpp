#pragma once

#include <cstdint>
#include <vector>

#include "adq/norm.hpp"
#include "adq/points.hpp"

namespace adq {

// Relative tolerance under which two codepoint distances count as a tie.
inline constexpr double kTieTolerance = 1e-12;

struct TieRule {
  enum class Kind { LowestIndex, Random };
  Kind kind = Kind::LowestIndex;
  std::uint64_t seed = 0;

  static TieRule lowest_index() { return {}; }
  static TieRule random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

struct Assignment {
  std::vector<std::uint32_t> owner;
  std::vector<std::uint8_t> boundary;  // 1 where the nearest distance is tied
  std::vector<double> distance;        // d(p, codebook[owner(p)])
};

// Nearest-codepoint queries. Uses a sorted array for q = 1, a k-d tree for
// q <= 3 and brute force otherwise; every path returns the same answers.
class NearestIndex {
 public:
  NearestIndex(const PointSet& codebook, NormKind norm, bool allow_index = true);

  struct Hit {
    std::uint32_t owner;
    double distance;
    bool tie;
  };

  // Ties (distances within kTieTolerance of the minimum) go to the lowest
  // index, or to a uniform pick among the tied set when rng_word is used.
  Hit nearest(std::span<const double> x, const TieRule& rule, std::uint64_t rng_word = 0) const;

 private:
  struct Candidate {
    std::uint32_t index;
    double distance;
  };
  struct KdNode {
    std::uint32_t point;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t axis = 0;
  };

  std::int32_t build(std::vector<std::uint32_t>& idx, std::size_t lo, std::size_t hi, std::size_t depth);
  void search(std::int32_t node, std::span<const double> x, double& best, std::vector<Candidate>& cand) const;

  const PointSet* codebook_;
  NormKind norm_;
  enum class Mode { Brute, Sorted, KdTree } mode_ = Mode::Brute;
  std::vector<std::uint32_t> sorted_;  // q = 1: indices by coordinate
  std::vector<double> sorted_x_;
  std::vector<KdNode> nodes_;
  std::int32_t root_ = -1;
};

Assignment voronoi_assign(const PointSet& points, const PointSet& codebook, NormKind norm = NormKind::Euclidean,
                          const TieRule& rule = TieRule::lowest_index());

}  // namespace adq
