#include "adq/quantizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "adq/csv.hpp"
#include "adq/parallel.hpp"
#include "adq/rng.hpp"
#include "adq/voronoi.hpp"

namespace adq {

#if defined(__SIZEOF_FLOAT128__)
using Wide = __float128;
#else
using Wide = long double;
#endif

std::string_view to_string(OptimizeConfig::Method method) noexcept {
  return method == OptimizeConfig::Method::Lloyd ? "lloyd" : "sgd";
}

void OptimizeConfig::validate(double r) const {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidConfig, "order r must be positive");
  if (restarts < 1) throw Error(ErrorKind::InvalidConfig, "restarts must be >= 1");
  if (pool_size < 1) throw Error(ErrorKind::InvalidConfig, "pool size must be positive");
  if (!(tolerance >= 0.0)) throw Error(ErrorKind::InvalidConfig, "tolerance must be nonnegative");
  if (sgd_c0 < 0.0 || sgd_decay < 0.0) throw Error(ErrorKind::InvalidConfig, "SGD schedule must be positive");
  if (method == Method::Lloyd) {
    if (r != 2.0) throw Error(ErrorKind::InvalidConfig, "Lloyd iteration requires r = 2; use sgd");
    if (norm != NormKind::Euclidean)
      throw Error(ErrorKind::InvalidConfig, "Lloyd centroid update requires the Euclidean norm; use sgd");
  }
}

double min_pairwise_distance(const PointSet& points, NormKind norm) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::min(best, distance(points[i], points[j], norm));
  return best;
}

Pool make_pool(const Measure& measure, std::size_t samples, std::uint64_t seed) {
  if (const auto* d = measure.as<Discrete>()) return Pool{d->atoms, d->weights, true};
  return Pool{sample(measure, samples, derive_seed(seed, 0x706f6f6c)), {}, false};
}

namespace {

double power_r(double d, double r) { return r == 2.0 ? d * d : (r == 1.0 ? d : std::pow(d, r)); }

struct CellAccum {
  std::vector<double> weight;
  std::vector<double> sums;  // n x q weighted coordinate sums
  std::vector<double> energy;
  double total = 0.0;
};

// Assignment plus per-cell statistics of a pool for a candidate codebook.
class Engine {
 public:
  virtual ~Engine() = default;
  virtual CellAccum stats(const PointSet& codebook) = 0;
  // Pool index of a random member of the cell from the last stats() call.
  virtual std::size_t random_member(std::size_t cell, Rng& rng) = 0;
  virtual std::span<const double> point(std::size_t pool_index) const = 0;
};

class GeneralEngine final : public Engine {
 public:
  GeneralEngine(const Pool& pool, double r, NormKind norm) : pool_(pool), r_(r), norm_(norm) {}

  CellAccum stats(const PointSet& cb) override {
    const std::size_t n = cb.size(), q = cb.dim(), count = pool_.size();
    owner_.resize(count);
    const NearestIndex index(cb, norm_);
    const std::size_t chunks = chunk_count(count);
    std::vector<CellAccum> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
      CellAccum& acc = partial[c];
      acc.weight.assign(n, 0.0);
      acc.sums.assign(n * q, 0.0);
      acc.energy.assign(n, 0.0);
      const std::size_t begin = c * kChunkSize, end = std::min(count, begin + kChunkSize);
      for (std::size_t i = begin; i < end; ++i) {
        const auto x = pool_.points[i];
        const auto hit = index.nearest(x, TieRule::lowest_index());
        owner_[i] = hit.owner;
        const double w = pool_.weight(i);
        acc.weight[hit.owner] += w;
        for (std::size_t k = 0; k < q; ++k) acc.sums[hit.owner * q + k] += w * x[k];
        acc.energy[hit.owner] += w * power_r(hit.distance, r_);
      }
    });
    CellAccum out;
    out.weight.assign(n, 0.0);
    out.sums.assign(n * q, 0.0);
    out.energy.assign(n, 0.0);
    for (const auto& p : partial) {
      for (std::size_t j = 0; j < n; ++j) {
        out.weight[j] += p.weight[j];
        out.energy[j] += p.energy[j];
      }
      for (std::size_t k = 0; k < n * q; ++k) out.sums[k] += p.sums[k];
    }
    for (double e : out.energy) out.total += e;
    return out;
  }

  std::size_t random_member(std::size_t cell, Rng& rng) override {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < owner_.size(); ++i)
      if (owner_[i] == cell) members.push_back(i);
    return members.empty() ? rng.below(pool_.size()) : members[rng.below(members.size())];
  }

  std::span<const double> point(std::size_t i) const override { return pool_.points[i]; }

 private:
  const Pool& pool_;
  double r_;
  NormKind norm_;
  std::vector<std::uint32_t> owner_;
};

// q = 1, r = 2: cells are contiguous runs of the sorted pool, so weights,
// first and second moments come from prefix sums in extended precision.
struct SortedPool {
  std::vector<double> x;
  std::vector<Wide> p0, p1, p2;

  explicit SortedPool(const Pool& pool) {
    const std::size_t count = pool.size();
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pool.points[a][0] < pool.points[b][0]; });
    x.resize(count);
    p0.assign(count + 1, 0);
    p1.assign(count + 1, 0);
    p2.assign(count + 1, 0);
    for (std::size_t i = 0; i < count; ++i) {
      const double v = pool.points[order[i]][0];
      const Wide w = pool.weight(order[i]);
      x[i] = v;
      p0[i + 1] = p0[i] + w;
      p1[i + 1] = p1[i] + w * v;
      p2[i + 1] = p2[i] + w * v * v;
    }
  }
};

class IntervalEngine final : public Engine {
 public:
  explicit IntervalEngine(std::shared_ptr<const SortedPool> sorted)
      : sorted_(std::move(sorted)), x_(sorted_->x), p0_(sorted_->p0), p1_(sorted_->p1), p2_(sorted_->p2) {}

  CellAccum stats(const PointSet& cb) override {
    const std::size_t n = cb.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return cb[a][0] < cb[b][0]; });
    CellAccum out;
    out.weight.assign(n, 0.0);
    out.sums.assign(n, 0.0);
    out.energy.assign(n, 0.0);
    range_lo_.assign(n, 0);
    range_hi_.assign(n, 0);
    std::size_t lo = 0;
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t j = order[s];
      std::size_t hi = x_.size();
      if (s + 1 < n) {
        const double boundary = 0.5 * (cb[j][0] + cb[order[s + 1]][0]);
        hi = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), boundary) - x_.begin());
        hi = std::max(hi, lo);
      }
      const Wide w = p0_[hi] - p0_[lo], s1 = p1_[hi] - p1_[lo], s2 = p2_[hi] - p2_[lo];
      const Wide a = cb[j][0];
      const Wide e = s2 - 2 * a * s1 + a * a * w;
      out.weight[j] = static_cast<double>(w);
      out.sums[j] = static_cast<double>(s1);
      out.energy[j] = e > 0 ? static_cast<double>(e) : 0.0;
      range_lo_[j] = lo;
      range_hi_[j] = hi;
      lo = hi;
    }
    for (double e : out.energy) out.total += e;
    return out;
  }

  std::size_t random_member(std::size_t cell, Rng& rng) override {
    const std::size_t lo = range_lo_[cell], hi = range_hi_[cell];
    return hi > lo ? lo + rng.below(hi - lo) : rng.below(x_.size());
  }

  std::span<const double> point(std::size_t i) const override { return {&x_[i], 1}; }

 private:
  std::shared_ptr<const SortedPool> sorted_;
  const std::vector<double>& x_;
  const std::vector<Wide>&p0_, &p1_, &p2_;
  std::vector<std::size_t> range_lo_, range_hi_;
};

std::unique_ptr<Engine> make_engine(const Pool& pool, double r, NormKind norm,
                                    const std::shared_ptr<const SortedPool>& sorted) {
  if (sorted) return std::make_unique<IntervalEngine>(sorted);
  return std::make_unique<GeneralEngine>(pool, r, norm);
}

bool contains_point(const PointSet& cb, std::span<const double> x) {
  for (std::size_t j = 0; j < cb.size(); ++j)
    if (std::equal(x.begin(), x.end(), cb[j].begin())) return true;
  return false;
}

// Cells ordered by decreasing contribution, ties by index.
std::vector<std::size_t> cells_by_contribution(const CellAccum& st) {
  std::vector<std::size_t> order(st.energy.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return st.energy[a] > st.energy[b]; });
  return order;
}

// A pool sample of the given cell that is not already a codepoint.
bool pick_new_point(Engine& eng, std::size_t cell, const PointSet& cb, Rng& rng, Point& out) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    const auto x = eng.point(eng.random_member(cell, rng));
    if (!contains_point(cb, x)) {
      out.assign(x.begin(), x.end());
      return true;
    }
  }
  return false;
}

struct LloydRun {
  PointSet codebook;
  CellAccum stats;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

LloydRun lloyd(Engine& eng, PointSet cb, std::size_t max_iters, double tol, Rng& rng, bool record) {
  LloydRun run;
  CellAccum st = eng.stats(cb);
  if (record) run.trace.push_back(st.total);
  const std::size_t n = cb.size(), q = cb.dim();
  std::size_t it = 0;
  while (it < max_iters && st.total > 0.0) {
    ++it;
    PointSet next = cb;
    std::vector<std::size_t> empty;
    for (std::size_t j = 0; j < n; ++j) {
      if (st.weight[j] > 0.0)
        for (std::size_t k = 0; k < q; ++k) next[j][k] = st.sums[j * q + k] / st.weight[j];
      else
        empty.push_back(j);
    }
    // Empty cells: move the orphan onto a sample of the largest-contribution cell.
    bool repaired = false;
    if (!empty.empty()) {
      const auto ranked = cells_by_contribution(st);
      std::size_t next_rank = 0;
      for (auto orphan : empty) {
        while (next_rank < ranked.size() && st.weight[ranked[next_rank]] <= 0.0) ++next_rank;
        if (next_rank >= ranked.size() || st.energy[ranked[next_rank]] <= 0.0) break;
        Point p;
        if (pick_new_point(eng, ranked[next_rank], next, rng, p)) {
          std::copy(p.begin(), p.end(), next[orphan].begin());
          repaired = true;
        }
        ++next_rank;
      }
    }
    CellAccum nst = eng.stats(next);
    if (nst.total > st.total * (1.0 + 1e-12) + 1e-300)
      throw Error(ErrorKind::NumericFailure, "Lloyd pool energy increased from " + fmt17(st.total) + " to " +
                                                 fmt17(nst.total));
    const double improvement = st.total > 0.0 ? (st.total - nst.total) / st.total : 0.0;
    cb = std::move(next);
    st = std::move(nst);
    if (record) run.trace.push_back(st.total);
    if (!repaired && improvement < tol) break;
  }
  run.codebook = std::move(cb);
  run.stats = std::move(st);
  run.iterations = it;
  return run;
}

double pool_diameter(const Pool& pool) {
  const std::size_t q = pool.points.dim();
  Point lo(q, std::numeric_limits<double>::infinity()), hi(q, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t k = 0; k < q; ++k) {
      lo[k] = std::min(lo[k], pool.points[i][k]);
      hi[k] = std::max(hi[k], pool.points[i][k]);
    }
  double acc = 0.0;
  for (std::size_t k = 0; k < q; ++k) acc += (hi[k] - lo[k]) * (hi[k] - lo[k]);
  return std::sqrt(acc);
}

// Shifts coincident codepoints apart along the first axis.
void make_distinct(PointSet& cb, double scale) {
  const double step = (scale > 0.0 ? scale : 1.0) * 1e-9;
  for (std::size_t j = 1; j < cb.size(); ++j) {
    for (int guard = 0; guard < 64; ++guard) {
      bool dup = false;
      for (std::size_t i = 0; i < j && !dup; ++i) dup = std::equal(cb[i].begin(), cb[i].end(), cb[j].begin());
      if (!dup) break;
      cb[j][0] += step * static_cast<double>(j);
    }
  }
}

std::size_t pick_weighted(const Pool& pool, const std::vector<double>& score, double total, Rng& rng) {
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < score.size(); ++i) {
    u -= score[i];
    if (u < 0.0) return i;
  }
  for (std::size_t i = score.size(); i > 0; --i)
    if (score[i - 1] > 0.0) return i - 1;
  return rng.below(pool.size());
}

// D^r-weighted seeding (k-means++).
PointSet seed_plus_plus(const Pool& pool, std::size_t n, double r, NormKind norm, Rng& rng) {
  const std::size_t count = pool.size();
  PointSet cb(pool.points.dim());
  std::vector<double> score(count);
  for (std::size_t i = 0; i < count; ++i) score[i] = pool.weight(i);
  cb.push_back(pool.points[pick_weighted(pool, score, 1.0, rng)]);
  std::vector<double> dist(count, std::numeric_limits<double>::infinity());
  while (cb.size() < n) {
    const auto last = cb[cb.size() - 1];
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      dist[i] = std::min(dist[i], distance(pool.points[i], last, norm));
      score[i] = pool.weight(i) * power_r(dist[i], r);
      total += score[i];
    }
    if (!(total > 0.0)) {
      cb.push_back(pool.points[rng.below(count)]);
      continue;
    }
    cb.push_back(pool.points[pick_weighted(pool, score, total, rng)]);
  }
  return cb;
}

PointSet pool_centroid(const Pool& pool) {
  const std::size_t q = pool.points.dim();
  Point c(q, 0.0);
  double w = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double wi = pool.weight(i);
    w += wi;
    for (std::size_t k = 0; k < q; ++k) c[k] += wi * pool.points[i][k];
  }
  for (double& v : c) v /= w;
  PointSet cb(q);
  cb.push_back(c);
  return cb;
}

// Grow the codebook by repeatedly splitting the highest-contribution cells,
// with a short Lloyd pass between rounds.
PointSet split_up(Engine& eng, const Pool& pool, PointSet cb, std::size_t n, double tol, Rng& rng) {
  constexpr std::size_t kSplitIters = 30;
  while (cb.size() < n) {
    const LloydRun run = lloyd(eng, cb, kSplitIters, tol, rng, false);
    cb = run.codebook;
    const auto ranked = cells_by_contribution(run.stats);
    const std::size_t want = std::min(cb.size(), n - cb.size());
    std::size_t added = 0;
    for (std::size_t i = 0; i < ranked.size() && added < want; ++i) {
      if (run.stats.energy[ranked[i]] <= 0.0) break;
      Point p;
      if (pick_new_point(eng, ranked[i], cb, rng, p)) {
        cb.push_back(p);
        ++added;
      }
    }
    if (added == 0) break;
  }
  while (cb.size() < n) cb.push_back(pool.points[rng.below(pool.size())]);
  make_distinct(cb, pool_diameter(pool));
  return cb;
}

// Hartigan single-point moves for exact weighted pools (r = 2): escapes
// Lloyd fixed points that are not partition-optimal.
bool hartigan_pass(const Pool& pool, PointSet& cb) {
  const std::size_t count = pool.size(), n = cb.size(), q = cb.dim();
  if (count > 4096 || n < 2) return false;
  const Assignment asg = voronoi_assign(pool.points, cb);
  std::vector<std::uint32_t> owner = asg.owner;
  std::vector<double> W(n, 0.0), S(n * q, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    W[owner[i]] += pool.weight(i);
    for (std::size_t k = 0; k < q; ++k) S[owner[i] * q + k] += pool.weight(i) * pool.points[i][k];
  }
  auto sq_to_mean = [&](std::size_t i, std::size_t c) {
    double acc = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
      const double d = pool.points[i][k] - S[c * q + k] / W[c];
      acc += d * d;
    }
    return acc;
  };
  bool moved_any = false;
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool moved = false;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t a = owner[i];
      const double w = pool.weight(i);
      if (W[a] - w <= 1e-15) continue;
      const double gain = W[a] * w / (W[a] - w) * sq_to_mean(i, a);
      std::size_t best = a;
      double best_delta = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        if (b == a) continue;
        const double cost = W[b] > 0.0 ? W[b] * w / (W[b] + w) * sq_to_mean(i, b) : 0.0;
        const double delta = cost - gain;
        if (delta < best_delta - 1e-15 * (gain + cost)) {
          best_delta = delta;
          best = b;
        }
      }
      if (best == a) continue;
      W[a] -= w;
      W[best] += w;
      for (std::size_t k = 0; k < q; ++k) {
        S[a * q + k] -= w * pool.points[i][k];
        S[best * q + k] += w * pool.points[i][k];
      }
      owner[i] = static_cast<std::uint32_t>(best);
      moved = moved_any = true;
    }
    if (!moved) break;
  }
  if (!moved_any) return false;
  for (std::size_t c = 0; c < n; ++c)
    if (W[c] > 0.0)
      for (std::size_t k = 0; k < q; ++k) cb[c][k] = S[c * q + k] / W[c];
  return true;
}

struct RestartResult {
  PointSet codebook;
  double energy = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::vector<double> trace;
};

RestartResult run_lloyd_restart(const Pool& pool, std::size_t n, const OptimizeConfig& cfg, std::size_t restart,
                                const PointSet* warm, bool record, const std::shared_ptr<const SortedPool>& sorted) {
  Rng rng(derive_seed(cfg.seed, 0x7273, restart));
  auto eng = make_engine(pool, 2.0, cfg.norm, sorted);
  PointSet init;
  if (restart == 0) {
    if (warm != nullptr && warm->size() == n)
      init = *warm;
    else
      init = split_up(*eng, pool, warm != nullptr && warm->size() < n && !warm->empty() ? *warm : pool_centroid(pool), n,
                      cfg.tolerance, rng);
  } else {
    init = seed_plus_plus(pool, n, 2.0, cfg.norm, rng);
    make_distinct(init, pool_diameter(pool));
  }
  LloydRun run = lloyd(*eng, std::move(init), cfg.iteration_cap(), cfg.tolerance, rng, record);
  std::size_t iterations = run.iterations;
  std::vector<double> trace = std::move(run.trace);
  if (pool.exact && cfg.norm == NormKind::Euclidean) {
    for (int round = 0; round < 16; ++round) {
      PointSet cb = run.codebook;
      if (!hartigan_pass(pool, cb)) break;
      LloydRun again = lloyd(*eng, std::move(cb), cfg.iteration_cap(), cfg.tolerance, rng, record);
      if (!(again.stats.total < run.stats.total)) break;
      iterations += again.iterations;
      trace.insert(trace.end(), again.trace.begin(), again.trace.end());
      run = std::move(again);
    }
  }
  return {std::move(run.codebook), run.stats.total, iterations, std::move(trace)};
}

void sgd_direction(std::span<const double> diff, double d, NormKind norm, std::span<double> u) {
  const std::size_t q = diff.size();
  switch (norm) {
    case NormKind::Euclidean:
      for (std::size_t k = 0; k < q; ++k) u[k] = diff[k] / d;
      return;
    case NormKind::Chebyshev: {
      // subgradient of the max norm: signs on the maximal coordinates
      double mx = 0.0;
      for (double v : diff) mx = std::max(mx, std::abs(v));
      std::size_t count = 0;
      for (double v : diff) count += std::abs(v) >= mx * (1.0 - 1e-12) ? 1 : 0;
      for (std::size_t k = 0; k < q; ++k)
        u[k] = std::abs(diff[k]) >= mx * (1.0 - 1e-12) ? std::copysign(1.0, diff[k]) / static_cast<double>(count) : 0.0;
      return;
    }
    case NormKind::Taxicab:
      for (std::size_t k = 0; k < q; ++k) u[k] = diff[k] == 0.0 ? 0.0 : std::copysign(1.0, diff[k]);
      return;
  }
}

RestartResult run_sgd_restart(const Pool& pool, std::size_t n, double r, const OptimizeConfig& cfg,
                              std::size_t restart, const PointSet* warm) {
  Rng rng(derive_seed(cfg.seed, 0x736764, restart));
  const std::size_t q = pool.points.dim(), count = pool.size();
  PointSet cb;
  if (restart == 0 && warm != nullptr && warm->size() == n) {
    cb = *warm;
  } else {
    cb = seed_plus_plus(pool, n, r, cfg.norm, rng);
    make_distinct(cb, pool_diameter(pool));
  }
  const double c0 = cfg.sgd_c0 > 0.0 ? cfg.sgd_c0 : 0.5 * pool_diameter(pool);
  const double decay = cfg.sgd_decay > 0.0 ? cfg.sgd_decay : static_cast<double>(count);
  const std::size_t batch = cfg.sgd_batch > 0 ? cfg.sgd_batch : std::min<std::size_t>(count, 100000);
  std::vector<double> cumulative;
  if (!pool.weights.empty()) {
    cumulative.resize(count);
    std::partial_sum(pool.weights.begin(), pool.weights.end(), cumulative.begin());
  }

  RestartResult best{cb, pool_energy(pool, cb, r, cfg.norm), 0, {}};
  Point diff(q), u(q);
  std::size_t t = 0;
  for (std::size_t it = 0; it < cfg.iteration_cap(); ++it) {
    for (std::size_t s = 0; s < batch; ++s, ++t) {
      std::size_t idx;
      if (cumulative.empty()) {
        idx = rng.below(count);
      } else {
        const double v = rng.uniform() * cumulative.back();
        idx = std::min<std::size_t>(count - 1, static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), v) - cumulative.begin()));
      }
      const auto x = pool.points[idx];
      std::size_t j = 0;
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < n; ++c) {
        const double dc = distance(x, cb[c], cfg.norm);
        if (dc < d) {
          d = dc;
          j = c;
        }
      }
      if (!(d > 0.0)) continue;
      for (std::size_t k = 0; k < q; ++k) diff[k] = x[k] - cb[j][k];
      sgd_direction(diff, d, cfg.norm, u);
      const double gamma = c0 / (1.0 + static_cast<double>(t) / decay);
      // never step past the sample
      const double step = std::min(gamma * r * std::pow(d, r - 1.0), d);
      for (std::size_t k = 0; k < q; ++k) cb[j][k] += step * u[k];
    }
    const double e = pool_energy(pool, cb, r, cfg.norm);
    if (e < best.energy) {
      best.codebook = cb;
      best.energy = e;
    }
    best.iterations = it + 1;
  }
  make_distinct(best.codebook, pool_diameter(pool));
  best.energy = pool_energy(pool, best.codebook, r, cfg.norm);
  return best;
}

}  // namespace

double pool_energy(const Pool& pool, const PointSet& codebook, double r, NormKind norm) {
  const Assignment asg = voronoi_assign(pool.points, codebook, norm);
  const std::size_t chunks = chunk_count(pool.size());
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * kChunkSize, end = std::min(pool.size(), begin + kChunkSize);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += pool.weight(i) * power_r(asg.distance[i], r);
    partial[c] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

ErrorEstimate estimate_error(const Measure& measure, const PointSet& codebook, double r, std::size_t samples,
                             std::uint64_t seed, NormKind norm) {
  if (samples < 100) throw Error(ErrorKind::InvalidArgument, "estimate_error needs at least 100 samples");
  const Pool pool = make_pool(measure, samples, seed);
  if (pool.exact) return {pool_energy(pool, codebook, r, norm), 0.0};
  const Assignment asg = voronoi_assign(pool.points, codebook, norm);
  const std::size_t count = pool.size();
  const std::size_t chunks = chunk_count(count);
  std::vector<double> s1(chunks, 0.0), s2(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * kChunkSize, end = std::min(count, begin + kChunkSize);
    for (std::size_t i = begin; i < end; ++i) {
      const double v = power_r(asg.distance[i], r);
      s1[c] += v;
      s2[c] += v * v;
    }
  });
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    sum += s1[c];
    sum2 += s2[c];
  }
  const double nn = static_cast<double>(count);
  const double mean = sum / nn;
  const double var = std::max(0.0, (sum2 - nn * mean * mean) / (nn - 1.0));
  return {mean, std::sqrt(var / nn)};
}

Codebook optimize_on_pool(const Pool& pool, std::size_t n, double r, const OptimizeConfig& config,
                          const PointSet* warm_start, OptimizeTrace* trace) {
  config.validate(r);
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "codebook size must be >= 1");
  if (pool.size() == 0) throw Error(ErrorKind::InvalidArgument, "pool is empty");
  std::vector<RestartResult> results(config.restarts);
  const bool record = trace != nullptr;
  std::shared_ptr<const SortedPool> sorted;
  if (config.method == OptimizeConfig::Method::Lloyd && pool.points.dim() == 1)
    sorted = std::make_shared<const SortedPool>(pool);
  parallel_for(config.restarts, [&](std::size_t k) {
    results[k] = config.method == OptimizeConfig::Method::Lloyd
                     ? run_lloyd_restart(pool, n, config, k, warm_start, record, sorted)
                     : run_sgd_restart(pool, n, r, config, k, warm_start);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k)
    if (results[k].energy < results[best].energy) best = k;
  if (!std::isfinite(results[best].energy)) throw Error(ErrorKind::NumericFailure, "optimiser produced no finite energy");
  if (trace != nullptr) {
    trace->energies = results[best].trace;
    trace->restart_energies.clear();
    for (const auto& res : results) trace->restart_energies.push_back(res.energy);
  }
  Codebook cb;
  cb.points = std::move(results[best].codebook);
  cb.r = r;
  cb.energy = pool_energy(pool, cb.points, r, config.norm);
  cb.seed = config.seed;
  cb.iterations = results[best].iterations;
  cb.method = std::string(to_string(config.method));
  return cb;
}

Codebook optimize(const Measure& measure, std::size_t n, double r, const OptimizeConfig& config,
                  OptimizeTrace* trace) {
  config.validate(r);
  const Pool pool = make_pool(measure, config.pool_size, config.seed);
  Codebook cb = optimize_on_pool(pool, n, r, config, nullptr, trace);
  cb.measure_id = measure.id();
  return cb;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

namespace {

struct GroupOptimum {
  Point point;
  double energy = 0.0;
};

double group_cost(const Discrete& d, std::uint32_t mask, std::span<const double> a, double r, NormKind norm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.atoms.size(); ++i)
    if (mask >> i & 1U) acc += d.weights[i] * power_r(distance(d.atoms[i], a, norm), r);
  return acc;
}

GroupOptimum optimise_group(const Discrete& d, std::uint32_t mask, double r, NormKind norm) {
  const std::size_t q = d.atoms.dim();
  GroupOptimum out;
  out.point.assign(q, 0.0);
  if ((mask & (mask - 1)) == 0) {  // a single atom is its own optimum
    const auto atom = d.atoms[static_cast<std::size_t>(std::countr_zero(mask))];
    out.point.assign(atom.begin(), atom.end());
    return out;
  }
  if (r == 2.0 && norm == NormKind::Euclidean) {
    double w = 0.0;
    for (std::size_t i = 0; i < d.atoms.size(); ++i)
      if (mask >> i & 1U) {
        w += d.weights[i];
        for (std::size_t k = 0; k < q; ++k) out.point[k] += d.weights[i] * d.atoms[i][k];
      }
    for (double& v : out.point) v /= w;
    out.energy = group_cost(d, mask, out.point, r, norm);
    return out;
  }
  // Nested grid refinement over the group's bounding box; atoms are also
  // candidates since for r < 1 the optimum can sit on one.
  Point lo(q, std::numeric_limits<double>::infinity()), hi(q, -std::numeric_limits<double>::infinity());
  out.energy = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.atoms.size(); ++i)
    if (mask >> i & 1U) {
      for (std::size_t k = 0; k < q; ++k) {
        lo[k] = std::min(lo[k], d.atoms[i][k]);
        hi[k] = std::max(hi[k], d.atoms[i][k]);
      }
      const double e = group_cost(d, mask, d.atoms[i], r, norm);
      if (e < out.energy) {
        out.energy = e;
        out.point.assign(d.atoms[i].begin(), d.atoms[i].end());
      }
    }
  constexpr int kGrid = 10;
  Point center(q), half(q), probe(q);
  for (std::size_t k = 0; k < q; ++k) {
    center[k] = 0.5 * (lo[k] + hi[k]);
    half[k] = 0.5 * (hi[k] - lo[k]);
  }
  Point best = center;
  double best_e = group_cost(d, mask, center, r, norm);
  while (*std::max_element(half.begin(), half.end()) > 1e-10) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < q; ++k) total *= kGrid + 1;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      for (std::size_t k = 0; k < q; ++k) {
        probe[k] = center[k] - half[k] + 2.0 * half[k] * static_cast<double>(c % (kGrid + 1)) / kGrid;
        c /= kGrid + 1;
      }
      const double e = group_cost(d, mask, probe, r, norm);
      if (e < best_e) {
        best_e = e;
        best = probe;
      }
    }
    center = best;
    for (double& h : half) h *= 0.35;
  }
  if (best_e < out.energy) {
    out.energy = best_e;
    out.point = best;
  }
  return out;
}

}  // namespace

Codebook brute_force_discrete(const Measure& measure, std::size_t n, double r, NormKind norm) {
  const auto* d = measure.as<Discrete>();
  if (d == nullptr) throw Error(ErrorKind::InvalidArgument, "brute force oracle needs a discrete measure");
  const std::size_t atoms = d->atoms.size();
  if (atoms > 12 || n > 4) throw Error(ErrorKind::TooLarge, "oracle limited to 12 atoms and n <= 4");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "codebook size must be >= 1");
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "order r must be positive");

  std::vector<GroupOptimum> memo(std::size_t{1} << atoms);
  std::vector<char> known(memo.size(), 0);
  auto group = [&](std::uint32_t mask) -> const GroupOptimum& {
    if (!known[mask]) {
      memo[mask] = optimise_group(*d, mask, r, norm);
      known[mask] = 1;
    }
    return memo[mask];
  };

  // Restricted growth strings: label[i] <= 1 + max(label[0..i-1]), < n.
  std::vector<std::uint32_t> label(atoms, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> best_masks;
  std::vector<std::uint32_t> masks;
  auto evaluate = [&](std::size_t groups) {
    masks.assign(groups, 0);
    for (std::size_t i = 0; i < atoms; ++i) masks[label[i]] |= 1U << i;
    double total = 0.0;
    for (auto m : masks) total += group(m).energy;
    if (total < best) {
      best = total;
      best_masks = masks;
    }
  };
  auto recurse = [&](auto&& self, std::size_t i, std::size_t used) -> void {
    if (i == atoms) {
      evaluate(used);
      return;
    }
    const std::size_t limit = std::min(used + 1, n);
    for (std::size_t g = 0; g < limit; ++g) {
      label[i] = static_cast<std::uint32_t>(g);
      self(self, i + 1, std::max(used, g + 1));
    }
  };
  recurse(recurse, 0, 0);

  Codebook cb;
  cb.points = PointSet(d->atoms.dim());
  for (auto m : best_masks) cb.points.push_back(group(m).point);
  cb.r = r;
  cb.energy = best;
  cb.measure_id = measure.id();
  cb.method = "brute_force";
  return cb;
}

OracleInstance random_oracle_instance(std::uint64_t seed, std::size_t index) {
  Rng rng(derive_seed(seed, 0x6f7261636c65, index));
  const std::size_t q = 1 + rng.below(2);
  const std::size_t atoms = 2 + rng.below(9);
  const std::size_t n = 1 + rng.below(3);
  PointSet pts(q);
  Point x(q);
  std::vector<double> w(atoms);
  double total = 0.0;
  for (std::size_t i = 0; i < atoms; ++i) {
    for (auto& v : x) v = rng.uniform();
    pts.push_back(x);
    w[i] = 0.05 + rng.uniform();
    total += w[i];
  }
  for (auto& v : w) v /= total;
  // renormalise exactly enough for the probability check
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < atoms; ++i) sum += w[i];
  w.back() = 1.0 - sum;
  return {Measure::discrete(std::move(pts), std::move(w)).with_id("oracle_" + std::to_string(index)), n};
}

// ---------------------------------------------------------------------------
// CSV

std::string codebook_csv(const Codebook& codebook, const std::string& extra_comment) {
  std::string out = "# n=" + std::to_string(codebook.n()) + " r=" + fmt17(codebook.r) +
                    " seed=" + std::to_string(codebook.seed) + " method=" + codebook.method +
                    " energy=" + fmt17(codebook.energy) + "\n";
  if (!codebook.measure_id.empty())
    out += "# measure=" + codebook.measure_id + " iterations=" + std::to_string(codebook.iterations) + "\n";
  out += extra_comment;
  std::vector<std::string> head;
  for (std::size_t k = 0; k < codebook.points.dim(); ++k) head.push_back("x" + std::to_string(k));
  out += csv_row(head);
  for (std::size_t j = 0; j < codebook.n(); ++j) {
    std::vector<std::string> row;
    for (double v : codebook.points[j]) row.push_back(fmt17(v));
    out += csv_row(row);
  }
  return out;
}

Codebook parse_codebook_csv(const std::string& text) {
  Codebook cb;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream kv(line.substr(1));
      std::string tok;
      while (kv >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        try {
          if (key == "r") cb.r = std::stod(val);
          else if (key == "seed") cb.seed = std::stoull(val);
          else if (key == "method") cb.method = val;
          else if (key == "energy") cb.energy = std::stod(val);
          else if (key == "measure") cb.measure_id = val;
          else if (key == "iterations") cb.iterations = std::stoull(val);
        } catch (const std::exception&) {
          throw Error(ErrorKind::Parse, "bad codebook comment value '" + tok + "'");
        }
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line[0] == 'x') continue;
    }
    Point p;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        p.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, "bad codebook coordinate '" + cell + "'");
      }
    }
    cb.points.push_back(p);
  }
  if (cb.points.empty()) throw Error(ErrorKind::Parse, "codebook file has no points");
  return cb;
}

}  // namespace adq
