#include "adq/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "adq/parallel.hpp"
#include "adq/rng.hpp"

namespace adq {

void check_probabilities(const std::vector<double>& p) {
  if (p.empty()) throw Error(ErrorKind::InvalidProbs, "probability vector is empty");
  double total = 0.0;
  for (double v : p) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::InvalidProbs, "probabilities must be strictly positive");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidProbs, "probabilities sum to " + std::to_string(total));
}

Measure Measure::uniform_box(Point lo, Point hi) {
  if (lo.empty() || lo.size() != hi.size())
    throw Error(ErrorKind::InvalidArgument, "box corners must have equal nonzero dimension");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw Error(ErrorKind::InvalidArgument, "box needs lo < hi in every coordinate");
  const std::size_t q = lo.size();
  return {UniformBox{std::move(lo), std::move(hi)}, q, "uniform_box"};
}

Measure Measure::discrete(PointSet atoms, std::vector<double> weights) {
  if (atoms.empty()) throw Error(ErrorKind::InvalidArgument, "discrete measure needs atoms");
  if (atoms.size() != weights.size())
    throw Error(ErrorKind::InvalidProbs, "atom and weight counts differ");
  check_probabilities(weights);
  const std::size_t q = atoms.dim();
  return {Discrete{std::move(atoms), std::move(weights)}, q, "discrete"};
}

Measure Measure::with_id(std::string id) const {
  Measure copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

Measure make_ifs(std::vector<Similitude> maps, std::vector<double> probs) {
  if (maps.empty()) throw Error(ErrorKind::InvalidArgument, "IFS needs at least one map");
  if (maps.size() != probs.size()) throw Error(ErrorKind::InvalidProbs, "map and weight counts differ");
  check_probabilities(probs);
  const std::size_t q = maps.front().dim();
  for (const auto& f : maps) {
    if (f.dim() != q) throw Error(ErrorKind::InvalidArgument, "IFS maps differ in dimension");
    if (!(f.ratio() < 1.0)) throw Error(ErrorKind::InvalidArgument, "IFS maps must be contractions");
  }

  // Center at the mean of the fixed points; the radius R = max |f_i(c)-c| / (1 - r_i)
  // makes every f_i map B(c, R) into itself, so B(c, R) contains the attractor.
  Point c(q, 0.0);
  for (const auto& f : maps) {
    const Point fp = f.fixed_point();
    for (std::size_t i = 0; i < q; ++i) c[i] += fp[i] / static_cast<double>(maps.size());
  }
  double radius = 0.0;
  std::vector<Point> images;
  for (const auto& f : maps) {
    images.push_back(f.apply(c));
    radius = std::max(radius, distance(images.back(), c, NormKind::Euclidean) / (1.0 - f.ratio()));
  }

  for (std::size_t i = 0; i < maps.size(); ++i)
    for (std::size_t j = i + 1; j < maps.size(); ++j) {
      const double gap = distance(images[i], images[j], NormKind::Euclidean);
      if (!(gap > (maps[i].ratio() + maps[j].ratio()) * radius))
        throw Error(ErrorKind::SSCViolation, "images of the bounding ball under maps " + std::to_string(i) +
                                                 " and " + std::to_string(j) + " intersect");
    }

  return {SelfSimilarIFS{std::move(maps), std::move(probs), std::move(c), radius}, q, "ifs"};
}

Measure condition_rescale(const Measure& base, const Region& region, const Similitude& sim, NormKind norm) {
  if (region.dim() != base.dim() || sim.dim() != base.dim())
    throw Error(ErrorKind::InvalidArgument, "region/similitude dimension differs from the measure");
  if (!sim.is_similarity_for(norm))
    throw Error(ErrorKind::InvalidArgument, "similitude does not scale the chosen norm uniformly");
  const MassEstimate m = mass_in(base, region, norm);
  if (!(m.mass - m.abs_error_bound > 0.0))
    throw Error(ErrorKind::ZeroMassRegion, "conditioning region has no mass under the base measure");
  ConditionalRescaled cr{std::make_shared<const Measure>(base), region, sim, norm, m.mass, m.abs_error_bound};
  return {std::move(cr), base.dim(), "conditional(" + base.id() + ")"};
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

struct DrawState {
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;
};

std::size_t pick_index(const std::vector<double>& weights, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

void draw(const Measure& m, Rng& rng, std::span<double> out, DrawState& state);

void draw_ifs(const SelfSimilarIFS& ifs, Rng& rng, std::span<double> out) {
  const std::size_t q = out.size();
  Point x = ifs.maps.front().fixed_point();
  Point y(q);
  // Random composition of burn-in depth started on the attractor: exact up
  // to a contraction of ratio^64 of the bounding ball.
  for (int step = 0; step < kChaosGameBurnIn; ++step) {
    const auto& f = ifs.maps[pick_index(ifs.probs, rng.uniform())];
    f.apply(x, y);
    std::swap(x, y);
  }
  std::copy(x.begin(), x.end(), out.begin());
}

void draw(const Measure& m, Rng& rng, std::span<double> out, DrawState& state) {
  if (const auto* box = m.as<UniformBox>()) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = box->lo[i] + (box->hi[i] - box->lo[i]) * rng.uniform();
  } else if (const auto* ifs = m.as<SelfSimilarIFS>()) {
    draw_ifs(*ifs, rng, out);
  } else if (const auto* d = m.as<Discrete>()) {
    const auto atom = d->atoms[pick_index(d->weights, rng.uniform())];
    std::copy(atom.begin(), atom.end(), out.begin());
  } else if (const auto* cr = m.as<ConditionalRescaled>()) {
    Point x(out.size());
    for (;;) {
      draw(*cr->base, rng, x, state);
      ++state.attempts;
      if (cr->region.contains(x, cr->norm)) {
        ++state.accepted;
        break;
      }
      if (state.attempts >= 10'000'000 &&
          static_cast<double>(state.accepted) < kMinAcceptance * static_cast<double>(state.attempts))
        throw Error(ErrorKind::RejectionStall, "rejection acceptance rate fell below 1e-6");
    }
    cr->sim.apply_inverse(x, out);
  }
}

}  // namespace

PointSet sample(const Measure& measure, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  const std::size_t q = measure.dim();
  PointSet out(q, count);
  parallel_for(chunk_count(count), [&](std::size_t chunk) {
    Rng rng(derive_seed(seed, 0x5a4d, chunk));
    DrawState state;
    const std::size_t begin = chunk * kChunkSize;
    const std::size_t end = std::min(count, begin + kChunkSize);
    for (std::size_t i = begin; i < end; ++i) draw(measure, rng, out[i], state);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Mass queries

namespace {

// Length of [c - rad, c + rad] & [lo, hi].
double overlap(double c, double rad, double lo, double hi) {
  return std::max(0.0, std::min(hi, c + rad) - std::max(lo, c - rad));
}

// Exact area of a Euclidean or taxicab disc intersected with a rectangle,
// integrating the vertical chord length piecewise in closed form.
double disc_rectangle_area(std::span<const double> c, double rad, const Point& lo, const Point& hi, NormKind norm) {
  const double cx = c[0], cy = c[1];
  auto half = [&](double x) {
    const double u = x - cx;
    if (norm == NormKind::Euclidean) return std::sqrt(std::max(0.0, rad * rad - u * u));
    return std::max(0.0, rad - std::abs(u));
  };
  // Antiderivative of half(x) in u = x - cx on a piece not crossing u = 0 (taxicab) .
  auto half_integral = [&](double x0, double x1) {
    const double u0 = std::clamp(x0 - cx, -rad, rad), u1 = std::clamp(x1 - cx, -rad, rad);
    if (norm == NormKind::Euclidean) {
      auto f = [&](double u) {
        return 0.5 * (u * std::sqrt(std::max(0.0, rad * rad - u * u)) + rad * rad * std::asin(std::clamp(u / rad, -1.0, 1.0)));
      };
      return f(u1) - f(u0);
    }
    auto f = [&](double u) { return u >= 0 ? rad * u - 0.5 * u * u : rad * u + 0.5 * u * u; };
    return f(u1) - f(u0);
  };
  auto inverse_half = [&](double v) {
    if (v > rad) return -1.0;
    return norm == NormKind::Euclidean ? std::sqrt(rad * rad - v * v) : rad - v;
  };

  const double x_lo = std::max(lo[0], cx - rad), x_hi = std::min(hi[0], cx + rad);
  if (!(x_lo < x_hi)) return 0.0;
  std::vector<double> cuts{x_lo, x_hi, cx};
  for (double v : {std::abs(hi[1] - cy), std::abs(lo[1] - cy)}) {
    const double w = inverse_half(v);
    if (w >= 0.0) {
      cuts.push_back(cx - w);
      cuts.push_back(cx + w);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(cuts[i], x_lo), b = std::min(cuts[i + 1], x_hi);
    if (!(a < b)) continue;
    const double h = half(0.5 * (a + b));
    const bool top_is_box = hi[1] <= cy + h;
    const bool bottom_is_box = lo[1] >= cy - h;
    const double top = top_is_box ? hi[1] : cy + h;
    const double bottom = bottom_is_box ? lo[1] : cy - h;
    if (top <= bottom) continue;
    // chord = alpha + beta * half(x)
    const double alpha = (top_is_box ? hi[1] : cy) - (bottom_is_box ? lo[1] : cy);
    const double beta = (top_is_box ? 0.0 : 1.0) + (bottom_is_box ? 0.0 : 1.0);
    area += alpha * (b - a) + (beta == 0.0 ? 0.0 : beta * half_integral(a, b));
  }
  return std::max(0.0, area);
}

bool box_ball_closed_form(const UniformBox& box, const Region& region, NormKind norm, double& mass) {
  if (region.kind() != Region::Kind::Ball) return false;
  const std::size_t q = box.lo.size();
  const auto& c = region.center();
  const double rad = region.radius();
  if (q == 1 || norm == NormKind::Chebyshev) {
    double frac = 1.0;
    for (std::size_t i = 0; i < q; ++i) frac *= overlap(c[i], rad, box.lo[i], box.hi[i]) / (box.hi[i] - box.lo[i]);
    mass = frac;
    return true;
  }
  if (q == 2) {
    const double area = (box.hi[0] - box.lo[0]) * (box.hi[1] - box.lo[1]);
    mass = std::min(1.0, disc_rectangle_area(c, rad, box.lo, box.hi, norm) / area);
    return true;
  }
  return false;
}

// Best-first refinement of pieces with known weight and bounding ball.
template <class Node, class Children>
MassEstimate refine(Node root, double root_radius, const Region& region, NormKind norm, const MassOptions& opt,
                    Children&& children) {
  struct Entry {
    double weight;
    double radius;
    Node node;
    bool operator<(const Entry& o) const { return weight < o.weight; }
  };
  double inside = 0.0;
  double pending = 0.0;
  std::priority_queue<Entry> heap;
  auto consider = [&](double w, double rad, Node&& n) {
    switch (region.classify(n.center, rad, norm)) {
      case Region::Relation::Inside:
        inside += w;
        break;
      case Region::Relation::Outside:
        break;
      case Region::Relation::Straddles:
        pending += w;
        heap.push(Entry{w, rad, std::move(n)});
        break;
    }
  };
  consider(1.0, root_radius, std::move(root));
  std::size_t expanded = 0;
  while (pending > opt.tolerance && !heap.empty()) {
    if (++expanded > opt.max_nodes) throw BudgetExhausted(inside, std::min(1.0, inside + pending));
    Entry e = heap.top();
    heap.pop();
    pending -= e.weight;
    children(e.node, e.weight, e.radius, consider);
  }
  if (heap.empty()) pending = 0.0;
  pending = std::max(0.0, pending);
  return {inside + 0.5 * pending, pending};
}

struct IfsNode {
  Point center;
  std::vector<double> linear;  // q x q, ratio * rotation of the composed word
};

MassEstimate ifs_mass(const SelfSimilarIFS& ifs, const Region& region, NormKind norm, const MassOptions& opt) {
  const std::size_t q = ifs.bound_center.size();
  const double kappa = euclidean_to_norm_factor(norm, q);
  std::vector<Point> offsets;  // f_i(c) - c
  std::vector<std::vector<double>> linears;
  for (const auto& f : ifs.maps) {
    Point img = f.apply(ifs.bound_center);
    for (std::size_t i = 0; i < q; ++i) img[i] -= ifs.bound_center[i];
    offsets.push_back(std::move(img));
    std::vector<double> lin(f.rotation());
    for (double& v : lin) v *= f.ratio();
    linears.push_back(std::move(lin));
  }
  std::vector<double> eye(q * q, 0.0);
  for (std::size_t i = 0; i < q; ++i) eye[i * q + i] = 1.0;

  auto children = [&](const IfsNode& node, double w, double rad, auto& consider) {
    for (std::size_t k = 0; k < ifs.maps.size(); ++k) {
      IfsNode child{Point(q), std::vector<double>(q * q, 0.0)};
      for (std::size_t i = 0; i < q; ++i) {
        double acc = node.center[i];
        for (std::size_t j = 0; j < q; ++j) acc += node.linear[i * q + j] * offsets[k][j];
        child.center[i] = acc;
        for (std::size_t j = 0; j < q; ++j)
          for (std::size_t l = 0; l < q; ++l) child.linear[i * q + j] += node.linear[i * q + l] * linears[k][l * q + j];
      }
      consider(w * ifs.probs[k], rad * ifs.maps[k].ratio(), std::move(child));
    }
  };
  return refine(IfsNode{ifs.bound_center, eye}, kappa * ifs.bound_radius, region, norm, opt, children);
}

struct BoxNode {
  Point center;
  Point half;
};

MassEstimate box_mass(const UniformBox& box, const Region& region, NormKind norm, const MassOptions& opt) {
  double closed = 0.0;
  if (box_ball_closed_form(box, region, norm, closed)) return {closed, 0.0};
  const std::size_t q = box.lo.size();
  BoxNode root{Point(q), Point(q)};
  for (std::size_t i = 0; i < q; ++i) {
    root.center[i] = 0.5 * (box.lo[i] + box.hi[i]);
    root.half[i] = 0.5 * (box.hi[i] - box.lo[i]);
  }
  const double root_radius = norm_of(root.half, norm);
  const double weight_split = std::ldexp(1.0, -static_cast<int>(q));
  auto children = [&](const BoxNode& node, double w, double rad, auto& consider) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << q); ++mask) {
      BoxNode child{node.center, node.half};
      for (std::size_t i = 0; i < q; ++i) {
        child.half[i] = 0.5 * node.half[i];
        child.center[i] += ((mask >> i) & 1U) ? child.half[i] : -child.half[i];
      }
      consider(w * weight_split, 0.5 * rad, std::move(child));
    }
  };
  return refine(std::move(root), root_radius, region, norm, opt, children);
}

}  // namespace

MassEstimate mass_in(const Measure& measure, const Region& region, NormKind norm, const MassOptions& options) {
  if (region.dim() != measure.dim()) throw Error(ErrorKind::InvalidArgument, "region dimension mismatch");
  if (const auto* box = measure.as<UniformBox>()) return box_mass(*box, region, norm, options);
  if (const auto* ifs = measure.as<SelfSimilarIFS>()) return ifs_mass(*ifs, region, norm, options);
  if (const auto* d = measure.as<Discrete>()) {
    double mass = 0.0;
    for (std::size_t i = 0; i < d->atoms.size(); ++i)
      if (region.contains(d->atoms[i], norm)) mass += d->weights[i];
    return {std::min(1.0, mass), 0.0};
  }
  const auto& cr = std::get<ConditionalRescaled>(measure.spec());
  if (norm != cr.norm) throw Error(ErrorKind::InvalidArgument, "query norm differs from the conditioning norm");
  const Region pulled = Region::intersection({region.transformed(cr.sim), cr.region});
  const MassEstimate num = mass_in(*cr.base, pulled, norm, options);
  const double den = cr.region_mass;
  const double mass = std::min(1.0, num.mass / den);
  const double err = (num.abs_error_bound + mass * cr.region_mass_error) / (den - cr.region_mass_error);
  return {mass, err};
}

MassEstimate ball_mass(const Measure& measure, std::span<const double> center, double radius, NormKind norm,
                       const MassOptions& options) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
  return mass_in(measure, Region::ball(Point(center.begin(), center.end()), radius), norm, options);
}

namespace builtin {

Measure uniform_interval() { return Measure::uniform_box({0.0}, {1.0}).with_id("uniform1d"); }

Measure uniform_square() { return Measure::uniform_box({0.0, 0.0}, {1.0, 1.0}).with_id("uniform_square"); }

Measure cantor(double p_left) {
  std::vector<Similitude> maps{Similitude::scaling(1, 1.0 / 3.0), Similitude::scaling(1, 1.0 / 3.0, {2.0 / 3.0})};
  const bool equal = p_left == 0.5;
  return make_ifs(std::move(maps), {p_left, 1.0 - p_left}).with_id(equal ? "cantor" : "cantor_weighted");
}

Measure cantor_dust() {
  std::vector<Similitude> maps;
  for (double x : {0.0, 2.0 / 3.0})
    for (double y : {0.0, 2.0 / 3.0}) maps.push_back(Similitude::scaling(2, 1.0 / 3.0, {x, y}));
  return make_ifs(std::move(maps), {0.25, 0.25, 0.25, 0.25}).with_id("cantor_dust");
}

}  // namespace builtin

}  // namespace adq
