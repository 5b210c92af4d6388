#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adq/measure.hpp"
#include "adq/packing.hpp"
#include "adq/quantizer.hpp"

namespace adq {

// Per-cell statistics of a codebook against a sample pool. Contributions are
// summed in cell order, and `energy` is exactly that sum.
struct CellStats {
  std::size_t n = 0;
  double r = 2.0;
  double energy = 0.0;
  std::vector<double> mass;
  std::vector<double> contribution;  // I_a
  std::vector<double> ratio;         // n * I_a / e^r (1 for every cell when e^r = 0)
  std::vector<double> std_error;     // Monte Carlo standard error of I_a; 0 on exact pools
  bool exact = false;
};

CellStats cell_contributions(const Pool& pool, const PointSet& codebook, double r,
                             NormKind norm = NormKind::Euclidean);
CellStats cell_contributions(const Measure& measure, const PointSet& codebook, double r, std::size_t samples,
                             std::uint64_t seed, NormKind norm = NormKind::Euclidean);

struct JStats {
  double j_min = 0.0;
  double j_max = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

// Throws EmptyCells when there are no cells or a cell has zero mass.
JStats j_stats(const CellStats& cells);

struct CurveEntry {
  std::size_t n = 0;
  double energy = 0.0;
  double j_min = 0.0, j_max = 0.0;
  double ratio_min = 0.0, ratio_max = 0.0;
  bool cells_ok = false;      // false when some cell was empty; j/ratio fields are NaN then
  double delta = 0.0;         // e_n - e_{n+1} on the same pool
  double delta_ratio = 0.0;   // n * delta / e_n (0 when e_n = 0)
};

struct ErrorCurve {
  double r = 2.0;
  std::string measure_id;
  std::uint64_t seed = 0;
  std::vector<CurveEntry> entries;
  std::vector<Codebook> codebooks;  // one per entry
  std::vector<CellStats> cells;     // one per entry
};

// Optimises every n of the (strictly increasing) range on one shared pool,
// warm-starting each size from the previous one, plus n_max + 1 for the last
// increment. Energies are non-increasing in n by construction.
ErrorCurve error_curve(const Measure& measure, const std::vector<std::size_t>& n_range, double r,
                       const OptimizeConfig& config);

struct CurvePoint {
  std::size_t n;
  double energy;  // e^r
};

std::vector<CurvePoint> curve_points(const ErrorCurve& curve);

// Least-squares slope of log n against -log e_{n,r}, e_{n,r} = (e^r)^{1/r}.
// Throws DegenerateCurve for fewer than two points or any zero energy.
double quant_dimension(const std::vector<CurvePoint>& curve, double r);

struct Coefficients {
  std::vector<std::pair<std::size_t, double>> values;  // (n, n^{r/s} e^r)
  double max_over_min = 0.0;
};

Coefficients quant_coefficients(const std::vector<CurvePoint>& curve, double s, double r);

struct BandViolation {
  std::size_t n;
  std::string quantity;  // "j_min_ratio", "j_max_ratio" or "delta_ratio"
  double value;
};

// n j_min / e^r, n j_max / e^r and n delta / e^r must lie in [lo, hi].
std::vector<BandViolation> check_bands(const ErrorCurve& curve, double lo = 1.0 / 50.0, double hi = 50.0);

struct ProbeOptions {
  std::vector<double> scales;      // ascending or not; at least 3, all positive
  std::size_t centers = 1000;      // support samples used as ball centres
  double threshold = 100.0;        // pass iff C2_hat / C1_hat below this
  std::uint64_t seed = 0;
  NormKind norm = NormKind::Euclidean;
  MassOptions mass{1e-10, 4000000};
};

// Log-spaced grid, count points from lo to hi.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

struct ScaleRow {
  double eps = 0.0;
  double median_mass = 0.0;
  double min_mass = 0.0;
  double max_mass = 0.0;
  double residual = 0.0;  // log median mass minus the fitted line
  double band = 0.0;      // max/min of mass * eps^{-s0_hat} at this scale
};

struct AhlforsEstimate {
  double s0_hat = 0.0;
  double intercept = 0.0;
  double c1_hat = 0.0;
  double c2_hat = 0.0;
  double eps0_hat = 0.0;  // largest grid scale up to which C2/C1 stays under threshold
  double c_prime = 0.0;   // 2^{s0} max{C2, eps0^{-s0}}: global ball-mass constant
  double threshold = 100.0;
  bool pass = false;
  std::vector<ScaleRow> rows;
};

AhlforsEstimate regularity_probe(const Measure& measure, const ProbeOptions& options);

struct StructuralOptions {
  double r = 2.0;
  std::size_t samples = 200000;
  std::uint64_t seed = 0;
  NormKind norm = NormKind::Euclidean;
  double ratio_slack = 0.05;        // added to 13/8
  std::size_t m_cap = 1000;         // bound on M_sigma
  double band_cap = 50.0;           // bound on max/min normalised contribution
};

struct BallReport {
  std::size_t sigma = 0;
  Point center;
  std::size_t l_sigma = 0;     // codepoints in (A_sigma)_{|A_sigma|/16}
  std::size_t m_sigma = 0;     // cells owning a sample of A_sigma
  double max_distance_ratio = 0.0;  // max over serving cells of d(a, c_sigma) / |A_sigma|
};

struct StructuralReport {
  int k = 0;
  int m = 2;
  std::size_t phi = 0;
  std::size_t n = 0;
  double s0 = 0.0;
  std::vector<BallReport> balls;
  std::size_t l_c = 0;  // codepoints outside every enlarged A_sigma
  std::vector<double> normalized_contribution;  // I_a / m^{-k(s0+r)}
  double band_max_over_min = 0.0;
  double onenth_ratio = 0.0;  // (e^r / n) / m^{-k(s0+r)}
  double energy = 0.0;
  bool l_ok = false, ratio_ok = false, m_ok = false, band_ok = false;
  std::vector<std::string> warnings;

  bool pass() const noexcept { return l_ok && ratio_ok && m_ok && band_ok; }
};

// Throws PackingLevelMismatch when phi_k > n.
StructuralReport structural_check(const Measure& measure, const PointSet& codebook, const PackingFamily& packing,
                                  const AhlforsEstimate& probe, const StructuralOptions& options);

// CSV renderers.
std::string curve_csv(const ErrorCurve& curve, const std::string& header_comment = {});
std::string cells_csv(const CellStats& cells, const std::string& header_comment = {});
std::string probe_csv(const AhlforsEstimate& est, const std::string& header_comment = {});
std::string structural_csv(const StructuralReport& rep, const std::string& header_comment = {});

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal standalone SVG line chart; log axes take log10 of positive values.
std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series, bool log_x, bool log_y);

}  // namespace adq
