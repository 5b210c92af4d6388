#include "adq/packing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "adq/csv.hpp"
#include "adq/rng.hpp"

namespace adq {
namespace {

// Uniform grid over accepted centres with cell side equal to the exclusion
// distance, so conflicting centres sit in adjacent cells.
class CenterGrid {
 public:
  CenterGrid(std::size_t dim, double cell) : dim_(dim), cell_(cell), enabled_(dim <= 3 && cell > 0.0) {}

  bool enabled_for(std::span<const double> x) const {
    if (!enabled_) return false;
    for (double v : x)
      if (std::abs(v / cell_) > 1e15) return false;
    return true;
  }

  void insert(std::span<const double> x, std::uint32_t id) { cells_[key(coords(x))].push_back(id); }

  template <class F>
  void for_neighbours(std::span<const double> x, F&& f) const {
    const auto base = coords(x);
    std::array<std::int64_t, 3> off{};
    const int total = static_cast<int>(std::pow(3, dim_));
    for (int code = 0; code < total; ++code) {
      int c = code;
      auto probe = base;
      for (std::size_t i = 0; i < dim_; ++i) {
        off[i] = c % 3 - 1;
        c /= 3;
        probe[i] += off[i];
      }
      const auto it = cells_.find(key(probe));
      if (it == cells_.end()) continue;
      for (auto id : it->second)
        if (!f(id)) return;
    }
  }

 private:
  std::array<std::int64_t, 3> coords(std::span<const double> x) const {
    std::array<std::int64_t, 3> c{};
    for (std::size_t i = 0; i < dim_; ++i) c[i] = static_cast<std::int64_t>(std::floor(x[i] / cell_));
    return c;
  }
  static std::uint64_t key(const std::array<std::int64_t, 3>& c) {
    std::uint64_t h = 0;
    for (auto v : c) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    return h;
  }

  std::size_t dim_;
  double cell_;
  bool enabled_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace

PackingFamily maximal_packing(const PointSet& support, double radius, std::uint64_t seed, NormKind norm) {
  if (support.empty()) throw Error(ErrorKind::InvalidArgument, "packing needs support points");
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "packing radius must be positive");
  std::vector<std::uint32_t> order(support.size());
  std::iota(order.begin(), order.end(), 0U);
  Rng rng(derive_seed(seed, 0x7061636b));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  const double exclusion = 2.0 * radius;
  PackingFamily fam;
  fam.radius = radius;
  fam.seed = seed;
  fam.centers = PointSet(support.dim());
  CenterGrid grid(support.dim(), exclusion);
  std::vector<std::uint32_t> unindexed;  // centres too far out for the grid
  for (auto i : order) {
    const auto x = support[i];
    bool free = true;
    auto check = [&](std::uint32_t c) {
      if (distance(x, fam.centers[c], norm) <= exclusion) free = false;
      return free;
    };
    if (grid.enabled_for(x)) {
      grid.for_neighbours(x, check);
      for (std::size_t u = 0; free && u < unindexed.size(); ++u) check(unindexed[u]);
    } else {
      for (std::size_t c = 0; free && c < fam.centers.size(); ++c) check(static_cast<std::uint32_t>(c));
    }
    if (!free) continue;
    const auto id = static_cast<std::uint32_t>(fam.centers.size());
    fam.centers.push_back(x);
    if (grid.enabled_for(x))
      grid.insert(x, id);
    else
      unindexed.push_back(id);
  }
  return fam;
}

PackingFamily packing_at_level(const PointSet& support, int m, int k, std::uint64_t seed, NormKind norm) {
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "packing base m must be >= 2");
  PackingFamily fam = maximal_packing(support, std::pow(static_cast<double>(m), -k), derive_seed(seed, 0x6c76, static_cast<std::uint64_t>(k)), norm);
  fam.m = m;
  fam.k = k;
  fam.seed = seed;
  return fam;
}

bool is_maximal_packing(const PackingFamily& family, const PointSet& support, NormKind norm) {
  const double exclusion = 2.0 * family.radius;
  for (std::size_t i = 0; i < family.phi(); ++i)
    for (std::size_t j = i + 1; j < family.phi(); ++j)
      if (!(distance(family.centers[i], family.centers[j], norm) > exclusion)) return false;
  for (std::size_t p = 0; p < support.size(); ++p) {
    bool near = false;
    for (std::size_t i = 0; i < family.phi() && !near; ++i)
      near = distance(support[p], family.centers[i], norm) <= exclusion;
    if (!near) return false;
  }
  return true;
}

std::size_t covering_count(const PointSet& points, double radius, NormKind norm) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "covering radius must be positive");
  const std::size_t n = points.size();
  if (n == 0) return 0;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0U);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    const auto pa = points[a], pb = points[b];
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end()) || (std::equal(pa.begin(), pa.end(), pb.begin()) && a < b);
  });
  std::vector<double> first(n);
  for (std::size_t i = 0; i < n; ++i) first[i] = points[order[i]][0];
  std::vector<char> covered(n, 0);
  auto window = [&](double lo, double hi) {
    const auto b = std::lower_bound(first.begin(), first.end(), lo) - first.begin();
    const auto e = std::upper_bound(first.begin(), first.end(), hi) - first.begin();
    return std::pair<std::size_t, std::size_t>(static_cast<std::size_t>(b), static_cast<std::size_t>(e));
  };

  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (covered[i]) continue;
    const auto p = points[order[i]];
    std::size_t center = i;
    const auto [b, e] = window(p[0] - radius, p[0] + radius);
    for (std::size_t j = b; j < e; ++j)
      if (first[j] > first[center] && distance(p, points[order[j]], norm) <= radius) center = j;
    const auto c = points[order[center]];
    const auto [cb, ce] = window(c[0] - radius, c[0] + radius);
    for (std::size_t j = cb; j < ce; ++j)
      if (!covered[j] && distance(c, points[order[j]], norm) <= radius) covered[j] = 1;
    covered[i] = 1;
    ++count;
  }
  return count;
}

Region enlarge(const Region& region, double delta) {
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "enlargement must be nonnegative");
  if (delta == 0.0) return region;
  switch (region.kind()) {
    case Region::Kind::Ball:
      return Region::ball(region.center(), region.radius() + delta);
    case Region::Kind::Enlarged:
      return enlarge(region.parts().front(), region.delta() + delta);
    case Region::Kind::Union: {
      std::vector<Region> parts;
      for (const auto& p : region.parts()) parts.push_back(enlarge(p, delta));
      return Region::union_of(std::move(parts));
    }
    case Region::Kind::Difference:
    case Region::Kind::Intersection:
      break;
  }
  return Region::enlarged(region, delta);  // throws: no exact distance
}

PackingFamily select_level(const PointSet& support, int m, std::size_t n, double c, std::uint64_t seed,
                           NormKind norm, int max_level) {
  std::vector<PackingFamily> levels;
  for (int k = 0; k <= max_level; ++k) {
    levels.push_back(packing_at_level(support, m, k, seed, norm));
    if (static_cast<double>(levels.back().phi()) > static_cast<double>(n)) break;
  }
  const PackingFamily* best = nullptr;
  for (const auto& f : levels)
    if (c * static_cast<double>(f.phi()) <= static_cast<double>(n)) best = &f;
  if (best == nullptr)
    for (const auto& f : levels)
      if (f.phi() <= n) best = &f;
  if (best == nullptr)
    throw Error(ErrorKind::PackingLevelMismatch, "no packing level has phi_k <= n");
  return *best;
}

std::string packing_csv(const PackingFamily& family, const std::string& header_comment) {
  std::string out = header_comment;
  std::vector<std::string> head{"k", "m", "radius"};
  for (std::size_t i = 0; i < family.centers.dim(); ++i) head.push_back("x" + std::to_string(i));
  out += csv_row(head);
  for (std::size_t i = 0; i < family.phi(); ++i) {
    std::vector<std::string> row{std::to_string(family.k), std::to_string(family.m), fmt17(family.radius)};
    for (double v : family.centers[i]) row.push_back(fmt17(v));
    out += csv_row(row);
  }
  return out;
}

}  // namespace adq
