#include "adq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "adq/csv.hpp"
#include "adq/parallel.hpp"
#include "adq/rng.hpp"
#include "adq/voronoi.hpp"

namespace adq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double power_r(double d, double r) { return r == 2.0 ? d * d : std::pow(d, r); }

struct Partial {
  std::vector<double> mass, contribution, second;
};

}  // namespace

CellStats cell_contributions(const Pool& pool, const PointSet& codebook, double r, NormKind norm) {
  if (codebook.empty()) throw Error(ErrorKind::InvalidArgument, "codebook is empty");
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "order r must be positive");
  const std::size_t n = codebook.size(), count = pool.size();
  const Assignment asg = voronoi_assign(pool.points, codebook, norm);
  const std::size_t chunks = chunk_count(count);
  std::vector<Partial> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Partial& p = partial[c];
    p.mass.assign(n, 0.0);
    p.contribution.assign(n, 0.0);
    p.second.assign(n, 0.0);
    const std::size_t begin = c * kChunkSize, end = std::min(count, begin + kChunkSize);
    for (std::size_t i = begin; i < end; ++i) {
      const double w = pool.weight(i);
      const double v = power_r(asg.distance[i], r);
      p.mass[asg.owner[i]] += w;
      p.contribution[asg.owner[i]] += w * v;
      p.second[asg.owner[i]] += w * v * v;
    }
  });
  CellStats out;
  out.n = n;
  out.r = r;
  out.exact = pool.exact;
  out.mass.assign(n, 0.0);
  out.contribution.assign(n, 0.0);
  std::vector<double> second(n, 0.0);
  for (const auto& p : partial)
    for (std::size_t j = 0; j < n; ++j) {
      out.mass[j] += p.mass[j];
      out.contribution[j] += p.contribution[j];
      second[j] += p.second[j];
    }
  for (double v : out.contribution) out.energy += v;
  out.ratio.resize(n);
  out.std_error.assign(n, 0.0);
  const double nn = static_cast<double>(count);
  for (std::size_t j = 0; j < n; ++j) {
    out.ratio[j] = out.energy > 0.0 ? static_cast<double>(n) * out.contribution[j] / out.energy : 1.0;
    if (!pool.exact && count > 1) {
      const double var = std::max(0.0, (second[j] - out.contribution[j] * out.contribution[j]) * nn / (nn - 1.0));
      out.std_error[j] = std::sqrt(var / nn);
    }
  }
  return out;
}

CellStats cell_contributions(const Measure& measure, const PointSet& codebook, double r, std::size_t samples,
                             std::uint64_t seed, NormKind norm) {
  return cell_contributions(make_pool(measure, samples, seed), codebook, r, norm);
}

JStats j_stats(const CellStats& cells) {
  if (cells.contribution.empty()) throw Error(ErrorKind::EmptyCells, "no cells");
  for (std::size_t j = 0; j < cells.mass.size(); ++j)
    if (!(cells.mass[j] > 0.0)) throw Error(ErrorKind::EmptyCells, "cell " + std::to_string(j) + " has no mass");
  const auto [jlo, jhi] = std::minmax_element(cells.contribution.begin(), cells.contribution.end());
  const auto [rlo, rhi] = std::minmax_element(cells.ratio.begin(), cells.ratio.end());
  return {*jlo, *jhi, *rlo, *rhi};
}

ErrorCurve error_curve(const Measure& measure, const std::vector<std::size_t>& n_range, double r,
                       const OptimizeConfig& config) {
  if (n_range.empty()) throw Error(ErrorKind::InvalidArgument, "n range is empty");
  for (std::size_t i = 0; i < n_range.size(); ++i) {
    if (n_range[i] < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
    if (i > 0 && n_range[i] <= n_range[i - 1]) throw Error(ErrorKind::InvalidArgument, "n range must increase");
  }
  config.validate(r);
  const Pool pool = make_pool(measure, config.pool_size, config.seed);

  std::set<std::size_t> wanted;
  for (auto n : n_range) {
    wanted.insert(n);
    wanted.insert(n + 1);
  }
  std::vector<std::size_t> sizes(wanted.begin(), wanted.end());
  std::vector<Codebook> books(sizes.size());
  std::vector<CellStats> stats(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const PointSet* warm = i > 0 ? &books[i - 1].points : nullptr;
    books[i] = optimize_on_pool(pool, sizes[i], r, config, warm);
    stats[i] = cell_contributions(pool, books[i].points, r, config.norm);
    if (i > 0 && stats[i].energy > stats[i - 1].energy) {
      // Extending the smaller codebook by its farthest pool points can only
      // lower every distance, so it bounds the larger size from above.
      PointSet grown = books[i - 1].points;
      while (grown.size() < sizes[i]) {
        const Assignment asg = voronoi_assign(pool.points, grown, config.norm);
        const auto far = static_cast<std::size_t>(std::max_element(asg.distance.begin(), asg.distance.end()) -
                                                  asg.distance.begin());
        grown.push_back(pool.points[far]);
      }
      CellStats grown_stats = cell_contributions(pool, grown, r, config.norm);
      if (grown_stats.energy <= stats[i].energy) {
        books[i].points = std::move(grown);
        stats[i] = std::move(grown_stats);
      }
    }
    books[i].energy = stats[i].energy;
    books[i].measure_id = measure.id();
  }

  auto index_of = [&](std::size_t n) {
    return static_cast<std::size_t>(std::lower_bound(sizes.begin(), sizes.end(), n) - sizes.begin());
  };
  ErrorCurve curve;
  curve.r = r;
  curve.measure_id = measure.id();
  curve.seed = config.seed;
  for (auto n : n_range) {
    const std::size_t i = index_of(n), next = index_of(n + 1);
    CurveEntry e;
    e.n = n;
    e.energy = stats[i].energy;
    try {
      const JStats js = j_stats(stats[i]);
      e.j_min = js.j_min;
      e.j_max = js.j_max;
      e.ratio_min = js.ratio_min;
      e.ratio_max = js.ratio_max;
      e.cells_ok = true;
    } catch (const Error&) {
      e.j_min = e.j_max = e.ratio_min = e.ratio_max = kNaN;
    }
    e.delta = stats[i].energy - stats[next].energy;
    e.delta_ratio = e.energy > 0.0 ? static_cast<double>(n) * e.delta / e.energy : 0.0;
    curve.entries.push_back(e);
    curve.codebooks.push_back(books[i]);
    curve.cells.push_back(stats[i]);
  }
  return curve;
}

std::vector<CurvePoint> curve_points(const ErrorCurve& curve) {
  std::vector<CurvePoint> pts;
  for (const auto& e : curve.entries) pts.push_back({e.n, e.energy});
  return pts;
}

double quant_dimension(const std::vector<CurvePoint>& curve, double r) {
  if (curve.size() < 2) throw Error(ErrorKind::DegenerateCurve, "need at least two curve points");
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "order r must be positive");
  std::vector<double> xs, ys;
  for (const auto& p : curve) {
    if (!(p.energy > 0.0)) throw Error(ErrorKind::DegenerateCurve, "zero quantization error at n=" + std::to_string(p.n));
    xs.push_back(-std::log(p.energy) / r);
    ys.push_back(std::log(static_cast<double>(p.n)));
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::DegenerateCurve, "quantization errors do not vary");
  return sxy / sxx;
}

Coefficients quant_coefficients(const std::vector<CurvePoint>& curve, double s, double r) {
  if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "exponent s must be positive");
  Coefficients out;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& p : curve) {
    const double v = std::pow(static_cast<double>(p.n), r / s) * p.energy;
    out.values.emplace_back(p.n, v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.max_over_min = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<BandViolation> check_bands(const ErrorCurve& curve, double lo, double hi) {
  std::vector<BandViolation> out;
  auto check = [&](std::size_t n, const char* name, double v) {
    if (!(v >= lo && v <= hi)) out.push_back({n, name, v});
  };
  for (const auto& e : curve.entries) {
    if (!(e.energy > 0.0)) continue;  // quantities undefined at zero error
    const double nn = static_cast<double>(e.n);
    check(e.n, "j_min_ratio", nn * e.j_min / e.energy);
    check(e.n, "j_max_ratio", nn * e.j_max / e.energy);
    check(e.n, "delta_ratio", e.delta_ratio);
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw Error(ErrorKind::InvalidArgument, "bad log grid");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) / static_cast<double>(count - 1));
  return g;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace

AhlforsEstimate regularity_probe(const Measure& measure, const ProbeOptions& options) {
  if (options.scales.size() < 3) throw Error(ErrorKind::InvalidArgument, "regularity probe needs at least 3 scales");
  for (double e : options.scales)
    if (!(e > 0.0)) throw Error(ErrorKind::InvalidArgument, "probe scales must be positive");
  if (options.centers < 1) throw Error(ErrorKind::InvalidArgument, "probe needs at least one centre");
  std::vector<double> scales = options.scales;
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
  if (scales.size() < 3) throw Error(ErrorKind::InvalidArgument, "regularity probe needs at least 3 distinct scales");

  const PointSet centers = sample(measure, options.centers, derive_seed(options.seed, 0x70726f6265));
  const std::size_t ns = scales.size(), nc = centers.size();
  std::vector<double> mass(ns * nc);
  parallel_for(nc, [&](std::size_t c) {
    for (std::size_t s = 0; s < ns; ++s)
      mass[s * nc + c] = ball_mass(measure, centers[c], scales[s], options.norm, options.mass).mass;
  });

  AhlforsEstimate est;
  est.threshold = options.threshold;
  std::vector<double> xs(ns), ys(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<double> row(mass.begin() + static_cast<std::ptrdiff_t>(s * nc),
                            mass.begin() + static_cast<std::ptrdiff_t>((s + 1) * nc));
    ScaleRow sr;
    sr.eps = scales[s];
    sr.median_mass = median_of(row);
    sr.min_mass = *std::min_element(row.begin(), row.end());
    sr.max_mass = *std::max_element(row.begin(), row.end());
    if (!(sr.median_mass > 0.0))
      throw Error(ErrorKind::NumericFailure, "zero median ball mass at scale " + fmt17(sr.eps));
    xs[s] = std::log(sr.eps);
    ys[s] = std::log(sr.median_mass);
    est.rows.push_back(sr);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    mx += xs[s];
    my += ys[s];
  }
  mx /= static_cast<double>(ns);
  my /= static_cast<double>(ns);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    sxy += (xs[s] - mx) * (ys[s] - my);
    sxx += (xs[s] - mx) * (xs[s] - mx);
  }
  est.s0_hat = sxy / sxx;
  est.intercept = my - est.s0_hat * mx;

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  est.eps0_hat = scales.front();
  for (std::size_t s = 0; s < ns; ++s) {
    auto& sr = est.rows[s];
    sr.residual = ys[s] - (est.intercept + est.s0_hat * xs[s]);
    const double scale = std::pow(scales[s], -est.s0_hat);
    const double row_lo = sr.min_mass * scale, row_hi = sr.max_mass * scale;
    sr.band = row_lo > 0.0 ? row_hi / row_lo : std::numeric_limits<double>::infinity();
    lo = std::min(lo, row_lo);
    hi = std::max(hi, row_hi);
    if (lo > 0.0 && hi / lo < options.threshold) est.eps0_hat = scales[s];
  }
  est.c1_hat = lo;
  est.c2_hat = hi;
  est.pass = lo > 0.0 && hi / lo < options.threshold;
  est.c_prime = std::pow(2.0, est.s0_hat) * std::max(est.c2_hat, std::pow(est.eps0_hat, -est.s0_hat));
  return est;
}

StructuralReport structural_check(const Measure& measure, const PointSet& codebook, const PackingFamily& packing,
                                  const AhlforsEstimate& probe, const StructuralOptions& options) {
  if (codebook.empty()) throw Error(ErrorKind::InvalidArgument, "codebook is empty");
  if (packing.phi() > codebook.size())
    throw Error(ErrorKind::PackingLevelMismatch, "phi_k = " + std::to_string(packing.phi()) + " exceeds n = " +
                                                     std::to_string(codebook.size()));
  const double rho = packing.radius;
  const double a_radius = packing.a_radius();
  const double a_diam = packing.a_diameter();
  const double enlarged = a_radius + a_diam / 16.0;
  const NormKind norm = options.norm;

  StructuralReport rep;
  rep.k = packing.k;
  rep.m = packing.m;
  rep.phi = packing.phi();
  rep.n = codebook.size();
  rep.s0 = probe.s0_hat;

  const Pool pool = make_pool(measure, options.samples, options.seed);
  const Assignment asg = voronoi_assign(pool.points, codebook, norm);
  const CellStats cells = cell_contributions(pool, codebook, options.r, norm);
  rep.energy = cells.energy;

  rep.balls.resize(packing.phi());
  parallel_for(packing.phi(), [&](std::size_t s) {
    BallReport& b = rep.balls[s];
    const auto c = packing.centers[s];
    b.sigma = s;
    b.center.assign(c.begin(), c.end());
    for (std::size_t j = 0; j < codebook.size(); ++j)
      if (distance(codebook[j], c, norm) <= enlarged) ++b.l_sigma;
    std::vector<char> serving(codebook.size(), 0);
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (distance(pool.points[i], c, norm) <= a_radius) serving[asg.owner[i]] = 1;
    for (std::size_t j = 0; j < codebook.size(); ++j)
      if (serving[j]) {
        ++b.m_sigma;
        b.max_distance_ratio = std::max(b.max_distance_ratio, distance(codebook[j], c, norm) / a_diam);
      }
  });
  for (std::size_t j = 0; j < codebook.size(); ++j) {
    bool inside = false;
    for (std::size_t s = 0; s < packing.phi() && !inside; ++s)
      inside = distance(codebook[j], packing.centers[s], norm) <= enlarged;
    if (!inside) ++rep.l_c;
  }

  const double unit = std::pow(rho, probe.s0_hat + options.r);  // m^{-k(s0+r)}
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t j = 0; j < codebook.size(); ++j) {
    const double v = cells.contribution[j] / unit;
    rep.normalized_contribution.push_back(v);
    if (cells.contribution[j] > 0.0) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  rep.band_max_over_min = hi > 0.0 ? hi / lo : 1.0;
  rep.onenth_ratio = cells.energy / static_cast<double>(codebook.size()) / unit;

  std::size_t min_l = std::numeric_limits<std::size_t>::max(), max_m = 0;
  double max_ratio = 0.0;
  for (const auto& b : rep.balls) {
    min_l = std::min(min_l, b.l_sigma);
    max_m = std::max(max_m, b.m_sigma);
    max_ratio = std::max(max_ratio, b.max_distance_ratio);
  }
  rep.l_ok = min_l >= 1;
  rep.ratio_ok = max_ratio <= 13.0 / 8.0 + options.ratio_slack;
  rep.m_ok = max_m <= options.m_cap;
  rep.band_ok = rep.band_max_over_min <= options.band_cap;
  const std::string tag = " (possible local-optimum artifact)";
  if (!rep.l_ok) rep.warnings.push_back("some enlarged A_sigma holds no codepoint" + tag);
  if (!rep.ratio_ok) rep.warnings.push_back("serving-codepoint distance ratio " + fmt17(max_ratio) + " exceeds 13/8 + slack" + tag);
  if (!rep.m_ok) rep.warnings.push_back("M_sigma " + std::to_string(max_m) + " exceeds cap" + tag);
  if (!rep.band_ok) rep.warnings.push_back("normalised contribution band " + fmt17(rep.band_max_over_min) + " exceeds cap" + tag);
  return rep;
}

std::string curve_csv(const ErrorCurve& curve, const std::string& header_comment) {
  std::string out = header_comment;
  out += csv_row({"n", "r", "energy", "j_min", "j_max", "ratio_min", "ratio_max", "delta", "delta_ratio"});
  for (const auto& e : curve.entries)
    out += csv_row({std::to_string(e.n), fmt17(curve.r), fmt17(e.energy), fmt17(e.j_min), fmt17(e.j_max),
                    fmt17(e.ratio_min), fmt17(e.ratio_max), fmt17(e.delta), fmt17(e.delta_ratio)});
  return out;
}

std::string cells_csv(const CellStats& cells, const std::string& header_comment) {
  std::string out = header_comment;
  out += csv_row({"cell", "mass", "contribution", "ratio", "std_error"});
  for (std::size_t j = 0; j < cells.n; ++j)
    out += csv_row({std::to_string(j), fmt17(cells.mass[j]), fmt17(cells.contribution[j]), fmt17(cells.ratio[j]),
                    fmt17(cells.std_error[j])});
  return out;
}

std::string probe_csv(const AhlforsEstimate& est, const std::string& header_comment) {
  std::string out = header_comment;
  out += "# s0_hat=" + fmt17(est.s0_hat) + " c1_hat=" + fmt17(est.c1_hat) + " c2_hat=" + fmt17(est.c2_hat) +
         " eps0_hat=" + fmt17(est.eps0_hat) + " c_prime=" + fmt17(est.c_prime) + " threshold=" +
         fmt17(est.threshold) + " pass=" + (est.pass ? "true" : "false") + "\n";
  out += csv_row({"eps", "median_mass", "min_mass", "max_mass", "residual", "band"});
  for (const auto& r : est.rows)
    out += csv_row({fmt17(r.eps), fmt17(r.median_mass), fmt17(r.min_mass), fmt17(r.max_mass), fmt17(r.residual),
                    fmt17(r.band)});
  return out;
}

std::string structural_csv(const StructuralReport& rep, const std::string& header_comment) {
  std::string out = header_comment;
  out += "# k=" + std::to_string(rep.k) + " m=" + std::to_string(rep.m) + " phi=" + std::to_string(rep.phi) +
         " n=" + std::to_string(rep.n) + " l_c=" + std::to_string(rep.l_c) + " band=" + fmt17(rep.band_max_over_min) +
         " onenth_ratio=" + fmt17(rep.onenth_ratio) + " pass=" + (rep.pass() ? "true" : "false") + "\n";
  for (const auto& w : rep.warnings) out += "# warning: " + w + "\n";
  std::vector<std::string> head{"sigma"};
  const std::size_t q = rep.balls.empty() ? 0 : rep.balls.front().center.size();
  for (std::size_t k = 0; k < q; ++k) head.push_back("c" + std::to_string(k));
  head.insert(head.end(), {"l_sigma", "m_sigma", "max_distance_ratio"});
  out += csv_row(head);
  for (const auto& b : rep.balls) {
    std::vector<std::string> row{std::to_string(b.sigma)};
    for (double v : b.center) row.push_back(fmt17(v));
    row.insert(row.end(), {std::to_string(b.l_sigma), std::to_string(b.m_sigma), fmt17(b.max_distance_ratio)});
    out += csv_row(row);
  }
  return out;
}

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series, bool log_x, bool log_y) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0) && (!log_y || y > 0.0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\">\n";
  out += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + title + "</text>\n";
  out += "<line x1=\"70\" y1=\"370\" x2=\"620\" y2=\"370\" stroke=\"black\"/>\n";
  out += "<line x1=\"70\" y1=\"40\" x2=\"70\" y2=\"370\" stroke=\"black\"/>\n";
  out += "<text x=\"345\" y=\"405\" text-anchor=\"middle\" font-size=\"13\">" + x_label + (log_x ? " (log10)" : "") + "</text>\n";
  out += "<text x=\"18\" y=\"205\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 205)\">" + y_label +
         (log_y ? " (log10)" : "") + "</text>\n";
  char buf[128];
  for (int t = 0; t <= 4; ++t) {
    const double fx = x0 + (x1 - x0) * t / 4.0, fy = y0 + (y1 - y0) * t / 4.0;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"386\" text-anchor=\"middle\" font-size=\"11\">%.3g</text>\n",
                  L + t / 4.0 * (W - L - R), fx);
    out += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"64\" y=\"%.1f\" text-anchor=\"end\" font-size=\"11\">%.3g</text>\n",
                  H - B - t / 4.0 * (H - T - B) + 4, fy);
    out += buf;
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
      pts += buf;
    }
    const char* col = colors[k % 6];
    out += std::string("<polyline fill=\"none\" stroke=\"") + col + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.0f\" font-size=\"12\" fill=\"%s\">", W - R - 150,
                  T + 16.0 * static_cast<double>(k + 1), col);
    out += buf + s.name + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace adq
