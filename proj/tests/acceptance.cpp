// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "adq/bounds.hpp"
#include "adq/commands.hpp"
#include "adq/config.hpp"
#include "adq/diagnostics.hpp"
#include "adq/measure.hpp"
#include "adq/packing.hpp"
#include "adq/parallel.hpp"
#include "adq/quantizer.hpp"

using namespace adq;
namespace fs = std::filesystem;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

OptimizeConfig opt(std::uint64_t seed, std::size_t pool, std::size_t restarts = 8) {
  OptimizeConfig c;
  c.seed = seed;
  c.pool_size = pool;
  c.restarts = restarts;
  return c;
}

std::vector<std::size_t> range(std::size_t lo, std::size_t hi, std::size_t mult = 0) {
  std::vector<std::size_t> out;
  for (std::size_t n = lo; n <= hi; n = mult ? n * mult : n + 1) out.push_back(n);
  return out;
}

// Exact energy of a 1-D codebook under the uniform measure on [0,1], r = 2.
double uniform_energy(std::vector<double> cb) {
  std::sort(cb.begin(), cb.end());
  double e = 0.0;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const double lo = i == 0 ? 0.0 : 0.5 * (cb[i - 1] + cb[i]);
    const double hi = i + 1 == cb.size() ? 1.0 : 0.5 * (cb[i] + cb[i + 1]);
    e += (std::pow(hi - cb[i], 3) - std::pow(lo - cb[i], 3)) / 3;
  }
  return e;
}

ProbeOptions probe_options(std::uint64_t seed) {
  ProbeOptions o;
  o.scales = log_grid(1e-4, 0.1, 12);
  o.seed = seed;
  return o;
}

Outcome uniform_closed_form() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const auto curve = error_curve(builtin::uniform_interval(), range(1, 16), 2.0, opt(101, 1000000));
  double worst_pool = 0.0, worst_exact = 0.0, rmin = INFINITY, rmax = -INFINITY;
  for (std::size_t i = 0; i < curve.entries.size(); ++i) {
    const auto& e = curve.entries[i];
    const double n = static_cast<double>(e.n), target = 1.0 / (12 * n * n);
    worst_pool = std::max(worst_pool, std::abs(e.energy / target - 1));
    worst_exact = std::max(worst_exact, std::abs(uniform_energy(curve.codebooks[i].points.raw()) / target - 1));
    for (double r : curve.cells[i].ratio) {
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
  }
  const double secs = seconds_since(t0);
  out.require(worst_pool <= 0.005, "pool energy within 0.5% of 1/(12n^2)");
  out.require(worst_exact <= 0.005, "exact energy of the codebooks within 0.5%");
  out.require(rmin >= 0.95 && rmax <= 1.05, "cell ratios in [0.95, 1.05]");
  out.require(secs < 60, "runtime under 60 s");
  out.note("max deviation pool " + num(100 * worst_pool) + "%, exact " + num(100 * worst_exact) + "%; ratios [" +
           num(rmin) + ", " + num(rmax) + "]; " + num(secs, 3) + " s");
  return out;
}

Outcome oracle_equivalence() {
  Outcome out;
  double worst = 0.0;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto inst = random_oracle_instance(7, i);
    const auto oracle = brute_force_discrete(inst.measure, inst.n, 2.0);
    const auto got = optimize(inst.measure, inst.n, 2.0, opt(200 + i, 200000));
    const double rel = oracle.energy > 0 ? std::abs(got.energy - oracle.energy) / oracle.energy
                                         : (got.energy == 0.0 ? 0.0 : INFINITY);
    worst = std::max(worst, rel);
    matched += rel <= 1e-6;
  }
  out.require(matched == 50, "every instance within 1e-6 relative");
  out.note(std::to_string(matched) + "/50 matched, worst relative gap " + num(worst));
  return out;
}

Outcome cantor_coefficients() {
  Outcome out;
  const auto curve = error_curve(builtin::cantor(), {1, 2, 4, 8, 16, 32, 64}, 2.0, opt(301, 200000));
  const double e1 = curve.entries[0].energy, e2 = curve.entries[1].energy;
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 1; i < curve.entries.size(); ++i) {
    const double n = static_cast<double>(curve.entries[i].n);
    const double v = std::pow(n, 2.0 / kCantorDim) * curve.entries[i].energy;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.require(std::abs(e1 - 0.125) <= 0.005, "e_1 = 0.125 +- 0.005");
  out.require(std::abs(e2 / (1.0 / 72) - 1) <= 0.1, "e_2 within 10% of 1/72");
  out.require(hi / lo <= 3, "coefficient max/min <= 3");
  out.note("e_1 " + num(e1, 6) + ", e_2 " + num(e2, 6) + ", coefficient max/min " + num(hi / lo));
  return out;
}

Outcome band_proxy() {
  Outcome out;
  const auto ns = range(4, 64);
  double worst_closed = 0.0;
  for (const auto& [name, measure, pool] :
       std::vector<std::tuple<std::string, Measure, std::size_t>>{{"uniform1d", builtin::uniform_interval(), 1000000},
                                                                   {"cantor", builtin::cantor(), 200000}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto curve = error_curve(measure, ns, 2.0, opt(401, pool, 2));
    const auto violations = check_bands(curve, 1.0 / 50, 50.0);
    double lo = INFINITY, hi = 0.0;
    for (const auto& e : curve.entries) {
      const double n = static_cast<double>(e.n);
      for (double v : {n * e.j_min / e.energy, n * e.j_max / e.energy, e.delta_ratio}) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (name == "uniform1d") {
        const double closed = n * (2 * n + 1) / ((n + 1) * (n + 1));
        worst_closed = std::max(worst_closed, std::abs(e.delta_ratio / closed - 1));
      }
    }
    out.require(violations.empty(), name + " sequences inside [1/50, 50]");
    out.note(name + " range [" + num(lo) + ", " + num(hi) + "] in " + num(seconds_since(t0), 3) + " s");
  }
  out.require(worst_closed <= 0.05, "uniform n Delta / e within 5% of n(2n+1)/(n+1)^2");
  out.note("uniform closed-form deviation " + num(100 * worst_closed) + "%");
  return out;
}

Outcome dimension_recovery() {
  Outcome out;
  struct Case {
    std::string name;
    Measure measure;
    std::vector<std::size_t> ns;
    std::size_t pool, restarts;
    double target, tol;
  };
  const std::vector<Case> cases{
      {"uniform1d", builtin::uniform_interval(), range(2, 64, 2), 200000, 8, 1.0, 0.05},
      {"uniform_square", builtin::uniform_square(), range(4, 64, 2), 50000, 2, 2.0, 0.15},
      {"cantor", builtin::cantor(), range(2, 64, 2), 200000, 8, kCantorDim, 0.07},
  };
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    // One shared pool with warm starts, as in error_curve but without the n+1 sizes.
    const Pool pool = make_pool(c.measure, c.pool, 501);
    const auto conf = opt(502, c.pool, c.restarts);
    std::vector<CurvePoint> pts;
    PointSet warm;
    for (std::size_t n : c.ns) {
      const auto cb = optimize_on_pool(pool, n, 2.0, conf, pts.empty() ? nullptr : &warm);
      pts.push_back({n, cb.energy});
      warm = cb.points;
    }
    const double slope = quant_dimension(pts, 2.0), secs = seconds_since(t0);
    out.require(std::abs(slope - c.target) <= c.tol, c.name + " slope within " + num(c.tol) + " of " + num(c.target));
    out.require(secs < 300, c.name + " under 5 minutes");
    out.note(c.name + " " + num(slope, 5) + " (" + num(secs, 3) + " s)");
  }
  return out;
}

Outcome regularity() {
  Outcome out;
  const auto u = regularity_probe(builtin::uniform_interval(), probe_options(601));
  const auto c = regularity_probe(builtin::cantor(), probe_options(602));
  const auto w = regularity_probe(builtin::cantor(1.0 / 3), probe_options(603));
  out.require(std::abs(u.s0_hat - 1) <= 0.05, "uniform s0_hat = 1 +- 0.05");
  out.require(u.c1_hat >= 0.9, "uniform C1_hat >= 0.9");
  out.require(u.c2_hat <= 2.2, "uniform C2_hat <= 2.2");
  out.require(c.pass, "Cantor passes");
  out.require(!w.pass, "weighted Cantor fails");
  out.note("uniform s0 " + num(u.s0_hat) + " C1 " + num(u.c1_hat) + " C2 " + num(u.c2_hat) + "; Cantor s0 " +
           num(c.s0_hat) + " C2/C1 " + num(c.c2_hat / c.c1_hat) + "; weighted C2/C1 " + num(w.c2_hat / w.c1_hat));
  return out;
}

Outcome packing_bounds() {
  Outcome out;
  struct Case {
    std::string name;
    Measure measure;
    int m, k_max;
  };
  const std::vector<Case> cases{{"uniform1d", builtin::uniform_interval(), 2, 8},
                                {"cantor", builtin::cantor(), 3, 5},
                                {"cantor", builtin::cantor(), 2, 8},
                                {"uniform_square", builtin::uniform_square(), 2, 5},
                                {"cantor_dust", builtin::cantor_dust(), 3, 4}};
  for (const auto& c : cases) {
    // Probe over the radii the levels actually use, m^-k_max up to 1.
    auto po = probe_options(701);
    po.scales = log_grid(std::pow(c.m, -c.k_max), 1.0, 12);
    const auto probe = regularity_probe(c.measure, po);
    const auto support = sample(c.measure, 50000, 702);
    const double N = phi_growth_bound(probe.c1_hat, probe.c2_hat, probe.s0_hat, c.m);
    std::size_t prev = 0;
    int inside = 0;
    double worst_growth = 0.0;
    for (int k = 0; k <= c.k_max; ++k) {
      const auto fam = packing_at_level(support, c.m, k, 703);
      const auto [lo, hi] = phi_interval(probe.c1_hat, probe.c2_hat, probe.s0_hat, c.m, k);
      const double phi = static_cast<double>(fam.phi());
      const bool ok = phi >= 0.8 * lo && phi <= 1.2 * hi;
      inside += ok;
      out.require(ok, c.name + " m=" + std::to_string(c.m) + " phi_" + std::to_string(k) + "=" + num(phi) +
                          " outside [" + num(0.8 * lo) + ", " + num(1.2 * hi) + "]");
      if (prev) {
        worst_growth = std::max(worst_growth, phi / static_cast<double>(prev));
        out.require(phi <= N * static_cast<double>(prev), c.name + " growth above N at k=" + std::to_string(k));
      }
      prev = fam.phi();
    }
    out.note(c.name + " m=" + std::to_string(c.m) + ": " + std::to_string(inside) + "/" +
             std::to_string(c.k_max + 1) + " inside, max growth " + num(worst_growth) + " <= N " + num(N));
  }
  return out;
}

Outcome structural() {
  Outcome out;
  StructuralOptions so;
  so.seed = 801;
  for (const auto& [name, measure, m] :
       std::vector<std::tuple<std::string, Measure, int>>{{"uniform1d", builtin::uniform_interval(), 2},
                                                           {"cantor", builtin::cantor(), 2},
                                                           {"cantor", builtin::cantor(), 3}}) {
    const auto probe = regularity_probe(measure, probe_options(802));
    so.r = 2.0;
    const auto support = sample(measure, 20000, 803);
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
      const auto fam = select_level(support, m, n, 4.0, 804);
      if (4 * fam.phi() > n) continue;
      const auto cb = optimize(measure, n, 2.0, opt(805 + n, 200000));
      const auto rep = structural_check(measure, cb.points, fam, probe, so);
      std::size_t lmin = SIZE_MAX;
      double rmax = 0.0;
      for (const auto& b : rep.balls) {
        lmin = std::min(lmin, b.l_sigma);
        rmax = std::max(rmax, b.max_distance_ratio);
      }
      const std::string tag = name + " m=" + std::to_string(m) + " n=" + std::to_string(n);
      out.require(lmin >= 1, tag + " L_sigma >= 1");
      out.require(rmax <= 13.0 / 8 + 0.05, tag + " distance ratio <= 13/8 + 0.05");
      out.require(static_cast<double>(rep.l_c) <= 0.5 * static_cast<double>(n), tag + " L_c / n <= 1/2");
      out.note(tag + " (k=" + std::to_string(rep.k) + ", phi=" + std::to_string(rep.phi) +
               "): min L " + std::to_string(lmin) + ", max ratio " + num(rmax) + ", L_c " + std::to_string(rep.l_c));
    }
  }
  return out;
}

Outcome hand_bounds() {
  Outcome out;
  out.require(covering_constant(Rational(1, 2), 1) == 9, "M(1/2, 1) = 9");
  out.require(covering_constant(Rational(1), 2) == 37, "M(1, 2) = 37");
  const auto bc = packing_constants(1, Real(1), Real(2), Real(2), Real(1), Real(2));
  out.require(bc.n0 == 130 && bc.k1 == 82 && bc.k2 == 218 && bc.k3 == 8, "n0/k1/k2/k3 = 130/82/218/8");
  const auto z = zeta(Real(2), Real(2), Real(2), Real(1), BigInt(9));
  const double zd = static_cast<double>(z.zeta);
  out.require(std::abs(zd - 6.510e-4) <= 1e-7, "zeta = 6.510e-4 +- 1e-7");
  const auto d1 = dn_bound(Real(1), Real(2), Real(1), Real(1), Real(0));
  out.require(d1.d == Real(1) / 8, "d_1 = 0.125 exactly");
  out.note("M " + covering_constant(Rational(1, 2), 1).str() + "/" + covering_constant(Rational(1), 2).str() +
           ", n0/k1/k2/k3 " + bc.n0.str() + "/" + bc.k1.str() + "/" + bc.k2.str() + "/" + bc.k3.str() + ", zeta " +
           num(zd, 8) + ", d_1 " + to_string(d1.d));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / ("adq_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::vector<std::string> configs{
      "measure = cantor\nn_range = 2:12:2\npool_size = 50000\nseed = 901\n",
      "measure = uniform_square\nn_range = 1:8\npool_size = 40000\nrestarts = 4\nseed = 902\n",
      "measure = cantor_dust\nn_range = 3,5,9\npool_size = 40000\nmethod = sgd\nrestarts = 2\nmax_iters = 20\nseed = 903\n",
  };
  std::size_t files = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto config = parse_config(configs[i]);
    std::vector<fs::path> dirs;
    for (int threads : {1, 4, 1}) {
      set_thread_count(threads);
      const fs::path dir = root / ("c" + std::to_string(i) + "_run" + std::to_string(dirs.size()));
      std::ostringstream log;
      const int code = cmd_sweep(config, {dir.string(), false}, log);
      out.require(code == 0 || code == 1, "sweep " + std::to_string(i) + " ran");
      dirs.push_back(dir);
    }
    set_thread_count(1);
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      if (e.path().extension() != ".csv") continue;
      const std::string ref = slurp(e.path());
      for (std::size_t j = 1; j < dirs.size(); ++j)
        out.require(ref == slurp(dirs[j] / e.path().filename()),
                    "config " + std::to_string(i) + " " + e.path().filename().string() + " differs");
      ++files;
    }
  }
  fs::remove_all(root);
  out.require(files > 0, "compared some files");
  out.note(std::to_string(files) + " CSV files byte-identical across 1, 4 and 1 workers");
  return out;
}

}  // namespace

int main() {
  set_thread_count(1);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"uniform interval closed form", uniform_closed_form},
      {"oracle equivalence on 50 discrete instances", oracle_equivalence},
      {"Cantor errors and coefficient band", cantor_coefficients},
      {"normalized cell and increment bands", band_proxy},
      {"dimension recovery", dimension_recovery},
      {"regularity probe", regularity},
      {"packing-number bounds", packing_bounds},
      {"structural desk checks", structural},
      {"bound calculators by hand", hand_bounds},
      {"determinism across worker counts", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed;
}
