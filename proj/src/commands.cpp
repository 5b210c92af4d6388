#include "adq/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "adq/csv.hpp"
#include "adq/diagnostics.hpp"
#include "adq/measure_io.hpp"
#include "adq/packing.hpp"
#include "adq/rng.hpp"

namespace adq {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::RejectionStall:
    case ErrorKind::BudgetExhausted:
    case ErrorKind::NumericFailure:
    case ErrorKind::EmptyCells:
    case ErrorKind::DegenerateCurve:
      return kExitNumeric;
    default:
      return kExitConfig;
  }
}

namespace {

struct Session {
  ExperimentConfig cfg;
  std::string dir;
  std::uint64_t seed;
  Measure measure;
  OptimizeConfig opt;
  std::string header;

  Session(const ExperimentConfig& c, const RunOptions& run, const char* command)
      : cfg(c), dir(run.out_dir.empty() ? c.out : run.out_dir), seed(c.require_seed()), measure(load(c)) {
    opt = cfg.optimizer;
    opt.seed = seed;
    header = provenance_comment(cfg) + "# command=" + command + " measure=" + measure.id() + "\n";
  }

  static Measure load(const ExperimentConfig& c) {
    try {
      return resolve_measure(c.measure);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Io) throw Error(ErrorKind::InvalidConfig, e.what());
      throw;
    }
  }

  std::string path(const std::string& name) const { return (std::filesystem::path(dir) / name).string(); }
  void write(const std::string& name, const std::string& content) const { write_file_atomic(path(name), content); }
};

ProbeOptions probe_options(const Session& s) {
  ProbeOptions p;
  p.scales = log_grid(s.cfg.probe_eps_min, s.cfg.probe_eps_max, s.cfg.probe_scales);
  p.centers = s.cfg.probe_centers;
  p.threshold = s.cfg.probe_threshold;
  p.seed = derive_seed(s.seed, 0x70726f6265);
  p.norm = s.cfg.optimizer.norm;
  return p;
}

PointSet support_points(const Session& s) {
  return sample(s.measure, s.cfg.support_samples, derive_seed(s.seed, 0x737570));
}

}  // namespace

int cmd_probe(const ExperimentConfig& config, const RunOptions& run, std::ostream& log) {
  const Session s(config, run, "probe");
  const AhlforsEstimate est = regularity_probe(s.measure, probe_options(s));
  s.write("probe.csv", probe_csv(est, s.header));
  if (run.plots) {
    Series med{"median mass", {}, {}}, lo{"min mass", {}, {}}, hi{"max mass", {}, {}};
    for (const auto& r : est.rows) {
      for (auto* ser : {&med, &lo, &hi}) ser->x.push_back(r.eps);
      med.y.push_back(r.median_mass);
      lo.y.push_back(r.min_mass);
      hi.y.push_back(r.max_mass);
    }
    s.write("probe.svg", svg_line_plot("ball masses", "eps", "mass", {med, lo, hi}, true, true));
  }
  log << "s0_hat=" << fmt17(est.s0_hat) << " C1_hat=" << fmt17(est.c1_hat) << " C2_hat=" << fmt17(est.c2_hat)
      << " eps0_hat=" << fmt17(est.eps0_hat) << " pass=" << (est.pass ? "true" : "false") << "\n";
  return est.pass ? kExitOk : kExitViolation;
}

int cmd_pack(const ExperimentConfig& config, const RunOptions& run, std::ostream& log) {
  const Session s(config, run, "pack");
  const PointSet support = support_points(s);
  // Constants are fitted over the level radii themselves, not the probe grid.
  ProbeOptions po = probe_options(s);
  const double r_lo = std::pow(static_cast<double>(s.cfg.m), -s.cfg.k_max);
  const double r_hi = s.cfg.k_min < s.cfg.k_max ? std::pow(static_cast<double>(s.cfg.m), -s.cfg.k_min) : r_lo * s.cfg.m;
  po.scales = log_grid(r_lo, r_hi, s.cfg.probe_scales);
  const AhlforsEstimate est = regularity_probe(s.measure, po);
  std::string centers = s.header;
  std::string summary = s.header + "# s0_hat=" + fmt17(est.s0_hat) + " c1_hat=" + fmt17(est.c1_hat) +
                        " c2_hat=" + fmt17(est.c2_hat) + "\n";
  summary += csv_row({"k", "radius", "phi", "growth", "phi_lo", "phi_hi", "within_widened"});
  const double N = phi_growth_bound(est.c1_hat, est.c2_hat, est.s0_hat, s.cfg.m);
  std::size_t prev = 0;
  bool first = true;
  for (int k = s.cfg.k_min; k <= s.cfg.k_max; ++k) {
    const PackingFamily fam = packing_at_level(support, s.cfg.m, k, s.seed, s.cfg.optimizer.norm);
    std::string block = packing_csv(fam);
    if (!first) block = block.substr(block.find('\n') + 1);
    centers += block;
    const auto [lo, hi] = phi_interval(est.c1_hat, est.c2_hat, est.s0_hat, s.cfg.m, k);
    const bool within = fam.phi() >= 0.8 * lo && fam.phi() <= 1.2 * hi;
    summary += csv_row({std::to_string(k), fmt17(fam.radius), std::to_string(fam.phi()),
                        first || prev == 0 ? "nan" : fmt17(static_cast<double>(fam.phi()) / static_cast<double>(prev)),
                        fmt17(lo), fmt17(hi), within ? "true" : "false"});
    log << "k=" << k << " phi=" << fam.phi() << (within ? "" : " (outside widened interval)") << "\n";
    prev = fam.phi();
    first = false;
  }
  summary += "# N=" + fmt17(N) + "\n";
  s.write("packing.csv", centers);
  s.write("packing_summary.csv", summary);
  return kExitOk;
}

int cmd_optimize(const ExperimentConfig& config, const RunOptions& run, std::ostream& log) {
  const Session s(config, run, "optimize");
  std::string summary = s.header + csv_row({"n", "r", "pool_energy", "eval_energy", "eval_std_error", "iterations",
                                            "method", "min_distance"});
  for (auto n : s.cfg.n_range) {
    const Codebook cb = optimize(s.measure, n, s.cfg.r, s.opt);
    const ErrorEstimate ev =
        estimate_error(s.measure, cb.points, s.cfg.r, s.cfg.eval_samples, derive_seed(s.seed, 0x6576616c), s.opt.norm);
    s.write("codebook_n" + std::to_string(n) + ".csv", codebook_csv(cb, s.header));
    summary += csv_row({std::to_string(n), fmt17(s.cfg.r), fmt17(cb.energy), fmt17(ev.energy), fmt17(ev.std_error),
                        std::to_string(cb.iterations), cb.method,
                        fmt17(min_pairwise_distance(cb.points, s.opt.norm))});
    log << "n=" << n << " energy=" << fmt17(cb.energy) << " eval=" << fmt17(ev.energy) << "\n";
  }
  s.write("optimize.csv", summary);
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& config, const RunOptions& run, std::ostream& log) {
  const Session s(config, run, "sweep");
  const ErrorCurve curve = error_curve(s.measure, s.cfg.n_range, s.cfg.r, s.opt);
  s.write("curve.csv", curve_csv(curve, s.header));
  for (std::size_t i = 0; i < curve.entries.size(); ++i) {
    const std::string tag = "_n" + std::to_string(curve.entries[i].n) + ".csv";
    s.write("cells" + tag, cells_csv(curve.cells[i], s.header));
    s.write("codebook" + tag, codebook_csv(curve.codebooks[i], s.header));
  }

  const auto pts = curve_points(curve);
  std::vector<CurvePoint> positive;
  for (const auto& p : pts)
    if (p.energy > 0.0) positive.push_back(p);
  std::string dim = s.header;
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (positive.size() >= 2) {
    slope = quant_dimension(positive, s.cfg.r);
    const Coefficients coef = quant_coefficients(positive, slope, s.cfg.r);
    dim += "# dimension=" + fmt17(slope) + " coefficient_max_over_min=" + fmt17(coef.max_over_min) + "\n";
    dim += csv_row({"n", "energy", "log_n", "neg_log_e", "coefficient"});
    for (std::size_t i = 0; i < positive.size(); ++i) {
      const double ln = std::log(static_cast<double>(positive[i].n));
      dim += csv_row({std::to_string(positive[i].n), fmt17(positive[i].energy), fmt17(ln),
                      fmt17(-std::log(positive[i].energy) / s.cfg.r), fmt17(coef.values[i].second)});
    }
    log << "dimension estimate " << fmt17(slope) << "\n";
  } else {
    dim += "# dimension=nan (fewer than two points with positive error)\n";
  }
  s.write("dimension.csv", dim);

  const auto violations = check_bands(curve, s.cfg.band_min, s.cfg.band_max);
  std::string vcsv = s.header + csv_row({"n", "quantity", "value", "band_min", "band_max"});
  for (const auto& v : violations) {
    vcsv += csv_row({std::to_string(v.n), v.quantity, fmt17(v.value), fmt17(s.cfg.band_min), fmt17(s.cfg.band_max)});
    log << "band violation: n=" << v.n << " " << v.quantity << "=" << fmt17(v.value) << "\n";
  }
  s.write("violations.csv", vcsv);

  if (run.plots) {
    Series e{"e^r", {}, {}}, jl{"n J_min / e^r", {}, {}}, jh{"n J_max / e^r", {}, {}}, dr{"n Delta / e^r", {}, {}};
    Series fit{"log n vs -log e", {}, {}};
    for (const auto& en : curve.entries) {
      const double n = static_cast<double>(en.n);
      e.x.push_back(n);
      e.y.push_back(en.energy);
      if (en.energy > 0.0) {
        for (auto* ser : {&jl, &jh, &dr}) ser->x.push_back(n);
        jl.y.push_back(n * en.j_min / en.energy);
        jh.y.push_back(n * en.j_max / en.energy);
        dr.y.push_back(en.delta_ratio);
        fit.x.push_back(-std::log(en.energy) / s.cfg.r);
        fit.y.push_back(std::log(n));
      }
    }
    s.write("curve.svg", svg_line_plot("quantization error", "n", "e^r", {e}, true, true));
    s.write("bands.svg", svg_line_plot("normalised ratios", "n", "ratio", {jl, jh, dr}, true, true));
    s.write("dimension.svg", svg_line_plot("dimension fit", "-log e_n", "log n", {fit}, false, false));
  }
  return violations.empty() ? kExitOk : kExitViolation;
}

int cmd_structural(const ExperimentConfig& config, const RunOptions& run, std::ostream& log) {
  const Session s(config, run, "structural");
  Codebook cb;
  if (!s.cfg.codebook_file.empty()) {
    std::ifstream in(s.cfg.codebook_file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    cb = parse_codebook_csv(ss.str());
    if (cb.points.dim() != s.measure.dim())
      throw Error(ErrorKind::InvalidConfig, "codebook dimension does not match the measure");
  } else {
    cb = optimize(s.measure, s.cfg.n_range.back(), s.cfg.r, s.opt);
  }
  const AhlforsEstimate est = regularity_probe(s.measure, probe_options(s));
  const PointSet support = support_points(s);
  const PackingFamily fam =
      select_level(support, s.cfg.m, cb.n(), s.cfg.level_c, s.seed, s.cfg.optimizer.norm, s.cfg.k_max);
  StructuralOptions so;
  so.r = s.cfg.r;
  so.samples = s.cfg.eval_samples;
  so.seed = derive_seed(s.seed, 0x737472);
  so.norm = s.cfg.optimizer.norm;
  so.ratio_slack = s.cfg.structural_ratio_slack;
  so.m_cap = s.cfg.structural_m_cap;
  so.band_cap = s.cfg.structural_band_cap;
  const StructuralReport rep = structural_check(s.measure, cb.points, fam, est, so);
  s.write("structural.csv", structural_csv(rep, s.header));
  log << "k=" << rep.k << " phi=" << rep.phi << " n=" << rep.n << " L_c=" << rep.l_c
      << " band=" << fmt17(rep.band_max_over_min) << "\n";
  for (const auto& w : rep.warnings) log << "warning: " << w << "\n";
  return rep.l_ok && rep.ratio_ok ? kExitOk : kExitViolation;
}

int cmd_oracle(const ExperimentConfig& config, const RunOptions& run, std::ostream& log) {
  ExperimentConfig cfg = config;
  cfg.measure = "uniform1d";  // instances are generated; the configured measure is not used
  const Session s(cfg, run, "oracle");
  std::string csv = s.header + csv_row({"instance", "q", "atoms", "n", "oracle_energy", "optimize_energy",
                                        "relative_difference", "pass"});
  std::size_t failures = 0;
  for (std::size_t i = 0; i < s.cfg.oracle_instances; ++i) {
    const OracleInstance inst = random_oracle_instance(s.seed, i);
    const Codebook best = brute_force_discrete(inst.measure, inst.n, s.cfg.r, s.opt.norm);
    const Codebook found = optimize(inst.measure, inst.n, s.cfg.r, s.opt);
    const double rel = best.energy > 0.0 ? std::abs(found.energy - best.energy) / best.energy
                                         : (found.energy == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    const bool pass = rel <= 1e-6;
    if (!pass) ++failures;
    csv += csv_row({std::to_string(i), std::to_string(inst.measure.dim()),
                    std::to_string(inst.measure.as<Discrete>()->atoms.size()), std::to_string(inst.n),
                    fmt17(best.energy), fmt17(found.energy), fmt17(rel), pass ? "true" : "false"});
  }
  s.write("oracle.csv", csv);
  log << (s.cfg.oracle_instances - failures) << "/" << s.cfg.oracle_instances << " instances match the oracle\n";
  return failures == 0 ? kExitOk : kExitViolation;
}

int cmd_bounds(const BoundsParams& p, std::ostream& out) {
  auto real = [](const std::string& name, const std::string& text) {
    const Rational v = parse_rational(text);
    if (!(v > 0)) throw Error(ErrorKind::InvalidArgument, name + " must be positive");
    return Real(boost::multiprecision::numerator(v)) / Real(boost::multiprecision::denominator(v));
  };
  if (p.q < 1) throw Error(ErrorKind::InvalidArgument, "q must be >= 1");
  const Real C1 = real("C1", p.C1), C2 = real("C2", p.C2);
  if (C1 > C2) throw Error(ErrorKind::InvalidArgument, "C1 must not exceed C2");
  const BoundConstants bc = packing_constants(p.q, C1, C2, real("m", p.m), real("s0", p.s0), real("r", p.r), p.variant);
  out << bounds_table(bc);
  if (!p.out_dir.empty())
    write_file_atomic((std::filesystem::path(p.out_dir) / "bounds.csv").string(), bounds_csv(bc));
  return kExitOk;
}

}  // namespace adq
