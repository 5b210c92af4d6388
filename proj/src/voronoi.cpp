#include "adq/voronoi.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "adq/parallel.hpp"
#include "adq/rng.hpp"

namespace adq {

NearestIndex::NearestIndex(const PointSet& codebook, NormKind norm, bool allow_index)
    : codebook_(&codebook), norm_(norm) {
  if (codebook.empty()) throw Error(ErrorKind::InvalidArgument, "codebook is empty");
  const std::size_t n = codebook.size();
  const std::size_t q = codebook.dim();
  if (!allow_index || n < 8 || (q > 1 && n < 32)) return;
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0U);
  if (q == 1) {
    mode_ = Mode::Sorted;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return codebook[a][0] < codebook[b][0]; });
    sorted_ = idx;
    for (auto i : idx) sorted_x_.push_back(codebook[i][0]);
  } else if (q <= 3) {
    mode_ = Mode::KdTree;
    nodes_.reserve(n);
    root_ = build(idx, 0, n, 0);
  }
}

std::int32_t NearestIndex::build(std::vector<std::uint32_t>& idx, std::size_t lo, std::size_t hi, std::size_t depth) {
  if (lo >= hi) return -1;
  const std::size_t q = codebook_->dim();
  const auto axis = static_cast<std::uint8_t>(depth % q);
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(idx.begin() + static_cast<std::ptrdiff_t>(lo), idx.begin() + static_cast<std::ptrdiff_t>(mid),
                   idx.begin() + static_cast<std::ptrdiff_t>(hi), [&](auto a, auto b) {
                     const double va = (*codebook_)[a][axis], vb = (*codebook_)[b][axis];
                     return va < vb || (va == vb && a < b);
                   });
  const auto self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(KdNode{idx[mid], -1, -1, axis});
  const std::int32_t left = build(idx, lo, mid, depth + 1);
  const std::int32_t right = build(idx, mid + 1, hi, depth + 1);
  nodes_[static_cast<std::size_t>(self)].left = left;
  nodes_[static_cast<std::size_t>(self)].right = right;
  return self;
}

namespace {

inline double tie_limit(double d) { return d + d * kTieTolerance; }

}  // namespace

// Every point within the final tie limit is visited: a subtree is skipped only
// when its coordinate gap exceeds the running limit, which never grows.
void NearestIndex::search(std::int32_t node, std::span<const double> x, double& best,
                          std::vector<Candidate>& cand) const {
  while (node >= 0) {
    const KdNode& nd = nodes_[static_cast<std::size_t>(node)];
    const auto p = (*codebook_)[nd.point];
    const double d = distance(x, p, norm_);
    if (d <= tie_limit(best)) {
      cand.push_back({nd.point, d});
      best = std::min(best, d);
    }
    const double diff = x[nd.axis] - p[nd.axis];
    const std::int32_t near = diff < 0 ? nd.left : nd.right;
    const std::int32_t far = diff < 0 ? nd.right : nd.left;
    search(near, x, best, cand);
    // a coordinate gap never exceeds the distance in any of the supported norms
    if (!(std::abs(diff) <= tie_limit(best))) return;
    node = far;
  }
}

NearestIndex::Hit NearestIndex::nearest(std::span<const double> x, const TieRule& rule, std::uint64_t rng_word) const {
  const PointSet& cb = *codebook_;
  const std::size_t n = cb.size();
  thread_local std::vector<Candidate> cand;
  cand.clear();
  double best = std::numeric_limits<double>::infinity();
  auto offer = [&](std::uint32_t j) {
    const double d = distance(x, cb[j], norm_);
    if (d <= tie_limit(best)) {
      cand.push_back({j, d});
      best = std::min(best, d);
    }
  };

  switch (mode_) {
    case Mode::Brute:
      for (std::size_t j = 0; j < n; ++j) offer(static_cast<std::uint32_t>(j));
      break;
    case Mode::Sorted: {
      const auto pos = static_cast<std::size_t>(std::lower_bound(sorted_x_.begin(), sorted_x_.end(), x[0]) - sorted_x_.begin());
      if (pos < n) offer(sorted_[pos]);
      if (pos > 0) offer(sorted_[pos - 1]);
      for (std::size_t i = pos + 1; i < n && sorted_x_[i] - x[0] <= tie_limit(best); ++i) offer(sorted_[i]);
      for (std::size_t i = pos; i > 1 && x[0] - sorted_x_[i - 2] <= tie_limit(best); --i) offer(sorted_[i - 2]);
      break;
    }
    case Mode::KdTree:
      search(root_, x, best, cand);
      break;
  }

  // Final tied set: candidates within the limit of the exact minimum.
  const double limit = tie_limit(best);
  std::uint32_t owner = std::numeric_limits<std::uint32_t>::max();
  std::size_t tied_count = 0;
  for (const auto& c : cand)
    if (c.distance <= limit) {
      ++tied_count;
      owner = std::min(owner, c.index);
    }
  if (rule.kind == TieRule::Kind::Random && tied_count > 1) {
    std::vector<std::uint32_t> tied;
    for (const auto& c : cand)
      if (c.distance <= limit) tied.push_back(c.index);
    std::sort(tied.begin(), tied.end());
    owner = tied[rng_word % tied_count];
  }
  return {owner, distance(x, cb[owner], norm_), tied_count > 1};
}

Assignment voronoi_assign(const PointSet& points, const PointSet& codebook, NormKind norm, const TieRule& rule) {
  if (codebook.empty()) throw Error(ErrorKind::InvalidArgument, "codebook is empty");
  if (!points.empty() && points.dim() != codebook.dim())
    throw Error(ErrorKind::InvalidArgument, "points and codebook differ in dimension");
  const NearestIndex index(codebook, norm);
  const std::size_t count = points.size();
  Assignment out;
  out.owner.resize(count);
  out.boundary.resize(count);
  out.distance.resize(count);
  parallel_for(chunk_count(count), [&](std::size_t chunk) {
    const std::size_t begin = chunk * kChunkSize, end = std::min(count, begin + kChunkSize);
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t word = rule.kind == TieRule::Kind::Random ? splitmix64(rule.seed ^ splitmix64(i)) : 0;
      const auto hit = index.nearest(points[i], rule, word);
      out.owner[i] = hit.owner;
      out.boundary[i] = hit.tie ? 1 : 0;
      out.distance[i] = hit.distance;
    }
  });
  return out;
}

}  // namespace adq
