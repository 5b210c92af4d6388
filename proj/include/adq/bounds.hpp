#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adq {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Real = boost::multiprecision::cpp_bin_float_100;

// Parses "3", "-0.25", "1e-3", "7/54" into an exact rational.
Rational parse_rational(std::string_view text);
Rational to_rational(const Real& x);  // exact value of the binary float
std::string to_string(const Real& x, int digits = 17);

// M(eta) = [(2/eta + 4)^q] + 1, with the floor taken exactly for the given
// value of eta.
BigInt covering_constant(const Rational& eta, unsigned q);
BigInt covering_constant(const Real& eta, unsigned q);

struct Eta0 {
  Real eta0;
  Real eta0_r;  // eta0^r = C1 C2^{-1} 18^{-(r+s0)}
  BigInt n1;    // M(eta0)
};

// Throws InvalidArgument unless 0 < C1 <= C2 and r, s0 > 0.
Eta0 eta0_n1(const Real& C1, const Real& C2, const Real& r, const Real& s0, unsigned q);

// Recursive: zeta = (1/(2 l_k)) (1 - 2^{-r}) delta1^r.
// Literal:   zeta = (1/(2 l_k)) (1 - 2^{-r}) (4 (k-1) C)^{-1/t}, the same
//            product without the exponent r on the last factor.
enum class ZetaVariant { Recursive, Literal };
std::string_view to_string(ZetaVariant v) noexcept;

struct Zeta {
  Real delta1;  // (4 (k-1) C)^{-1/t}
  Real delta2;  // (2 (k-1) C)^{-1/t}
  Real radius;  // covering radius (1/2) min{delta2 - delta1, delta1}
  Real zeta;
};

Zeta zeta(const Real& k, const Real& r, const Real& C, const Real& t, const BigInt& l_k,
          ZetaVariant variant = ZetaVariant::Recursive);

// Radii delta1, delta2 and the covering radius without l_k.
Zeta zeta_radii(const Real& k, const Real& C, const Real& t);

// Box-count upper bound ceil((diameter / radius + 2)^q) on the number of
// radius-balls needed to cover a set of the given diameter.
BigInt box_cover_bound(const Real& radius, unsigned q, const Real& diameter = Real(1));

// d_n = min{d_n(1), d_n(2)}; only d_n(1) for n = 1.
struct DnBound {
  Real d1;
  Real d2;  // NaN for n = 1
  Real d;
};
DnBound dn_bound(const Real& n, const Real& r, const Real& t, const Real& C, const Real& zeta_n);

// l_k supplier: (k, covering radius) -> covering count upper bound.
using CoverCount = std::function<BigInt(const Real& k, const Real& radius)>;

struct BoundConstants {
  unsigned q = 1;
  Real r, s0, C1, C2, m;
  ZetaVariant variant = ZetaVariant::Recursive;
  Real xi;  // 40/7, the constant of the separated subsets

  Eta0 eta;
  BigInt n0, k1, k2, k3;
  Real N;  // C1^{-1} C2 2^{s0} m

  Zeta zeta_n1;          // zeta_{n1, r} under the chosen variant
  Zeta zeta_n1_other;    // the other variant, for comparison
  BigInt l_n1;
  Real eta_n2;
  BigInt M_eta_n2;
  BigInt n2;

  BigInt k_n3;  // ceil(N (n0 + n2)), the index of the zeta inside n3
  BigInt n4;    // ceil(N (n0 + n2) k3 + k2)
  Zeta zeta_n3;
  Zeta zeta_n3_other;
  BigInt l_n3;
  Real eta_n3;
  BigInt M_eta_n3;
  BigInt n3;

  Real C3;  // C2 2^{s0+r} (9/8)^r (15/2)^q
  BigInt d_table_length;  // floor(n3 (15/2)^q): C6 needs d_h for h up to this
};

// Throws InvalidArgument for non-positive inputs or C1 > C2, NumericFailure
// if the orderings n3 > n4 > n2 > n1 + k1 fail.
BoundConstants packing_constants(unsigned q, const Real& C1, const Real& C2, const Real& m, const Real& s0,
                                 const Real& r, ZetaVariant variant = ZetaVariant::Recursive,
                                 const CoverCount& cover = {});

struct C6Result {
  Real d_min;   // min d_h over the evaluated prefix
  Real c6;      // d_min * C1
  std::uint64_t evaluated = 0;
};

// Evaluates d_h for h = 1 .. d_table_length; throws CapExceeded when that
// exceeds cap.
C6Result c6_constant(const BoundConstants& bc, std::uint64_t cap, const CoverCount& cover = {});

// Prefix d_1 .. d_count of the table behind C6.
std::vector<DnBound> d_table(const BoundConstants& bc, std::uint64_t count, const CoverCount& cover = {});

// Packing-number interval C2^{-1} 2^{-s0} m^{k s0} <= phi_k <= C1^{-1} m^{k s0}.
std::pair<double, double> phi_interval(double C1, double C2, double s0, double m, int k);
double phi_growth_bound(double C1, double C2, double s0, double m);  // N

std::string bounds_table(const BoundConstants& bc);
std::string bounds_csv(const BoundConstants& bc, const std::string& header_comment = {});

}  // namespace adq
