#include "adq/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "adq/csv.hpp"
#include "adq/error.hpp"

namespace adq {
namespace {

namespace mp = boost::multiprecision;

BigInt pow_big(const BigInt& base, unsigned q) {
  BigInt out = 1;
  for (unsigned i = 0; i < q; ++i) out *= base;
  return out;
}

Rational pow_rat(const Rational& base, unsigned q) {
  Rational out = 1;
  for (unsigned i = 0; i < q; ++i) out *= base;
  return out;
}

BigInt floor_rat(const Rational& x) {
  const BigInt num = mp::numerator(x), den = mp::denominator(x);
  BigInt f = num / den;
  if (num < 0 && f * den != num) f -= 1;
  return f;
}

BigInt ceil_rat(const Rational& x) {
  const BigInt f = floor_rat(x);
  return Rational(f) == x ? f : f + 1;
}

BigInt floor_real(const Real& x) { return floor_rat(to_rational(x)); }
BigInt ceil_real(const Real& x) { return ceil_rat(to_rational(x)); }

Real to_real(const BigInt& x) { return Real(x); }

void require_positive(const Real& v, const char* name) {
  if (!(v > 0) || !mp::isfinite(v)) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive");
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&]() { return Error(ErrorKind::InvalidArgument, "cannot parse number '" + s + "'"); };
  if (s.empty()) throw bad();
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const Rational a = parse_rational(s.substr(0, slash));
    const Rational b = parse_rational(s.substr(slash + 1));
    if (b == 0) throw bad();
    return a / b;
  }
  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  BigInt digits = 0;
  long long scale = 0;
  bool any = false, dot = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (dot) --scale;
      any = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) throw bad();
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw bad();
    std::size_t used = 0;
    long long exp = 0;
    try {
      exp = std::stoll(s.substr(i + 1), &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != s.size() - i - 1 || exp > 100000 || exp < -100000) throw bad();
    scale += exp;
  }
  Rational v(digits);
  const BigInt ten = pow_big(10, static_cast<unsigned>(scale < 0 ? -scale : scale));
  v = scale < 0 ? v / Rational(ten) : v * Rational(ten);
  return negative ? -v : v;
}

Rational to_rational(const Real& x) {
  if (!mp::isfinite(x)) throw Error(ErrorKind::NumericFailure, "non-finite value");
  if (x == 0) return Rational(0);
  int e = 0;
  const Real f = mp::frexp(x, &e);  // x = f 2^e, |f| in [1/2, 1)
  constexpr int kBits = 400;        // above the mantissa width, so the scaled value is an integer
  const BigInt num = static_cast<BigInt>(mp::ldexp(f, kBits));
  const int shift = e - kBits;
  if (shift >= 0) return Rational(num << shift);
  return Rational(num, BigInt(1) << -shift);
}

std::string to_string(const Real& x, int digits) {
  if (mp::isnan(x)) return "nan";
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

BigInt covering_constant(const Rational& eta, unsigned q) {
  if (!(eta > 0)) throw Error(ErrorKind::InvalidArgument, "eta must be positive");
  if (q < 1) throw Error(ErrorKind::InvalidArgument, "dimension q must be >= 1");
  return floor_rat(pow_rat(Rational(2) / eta + 4, q)) + 1;
}

BigInt covering_constant(const Real& eta, unsigned q) {
  require_positive(eta, "eta");
  return covering_constant(to_rational(eta), q);
}

Eta0 eta0_n1(const Real& C1, const Real& C2, const Real& r, const Real& s0, unsigned q) {
  require_positive(C1, "C1");
  require_positive(C2, "C2");
  require_positive(r, "r");
  require_positive(s0, "s0");
  if (C1 > C2) throw Error(ErrorKind::InvalidArgument, "C1 must not exceed C2");
  Eta0 out;
  out.eta0 = mp::pow(C1, 1 / r) * mp::pow(C2, -1 / r) * mp::pow(Real(18), -(1 + s0 / r));
  out.eta0_r = C1 / C2 * mp::pow(Real(18), -(r + s0));
  out.n1 = covering_constant(out.eta0, q);
  return out;
}

std::string_view to_string(ZetaVariant v) noexcept { return v == ZetaVariant::Recursive ? "recursive" : "literal"; }

Zeta zeta_radii(const Real& k, const Real& C, const Real& t) {
  if (!(k >= 2)) throw Error(ErrorKind::InvalidArgument, "zeta needs k >= 2");
  require_positive(C, "C");
  require_positive(t, "t");
  Zeta z;
  z.delta1 = mp::pow(4 * (k - 1) * C, -1 / t);
  z.delta2 = mp::pow(2 * (k - 1) * C, -1 / t);
  z.radius = (z.delta2 - z.delta1 < z.delta1 ? z.delta2 - z.delta1 : z.delta1) / 2;
  return z;
}

Zeta zeta(const Real& k, const Real& r, const Real& C, const Real& t, const BigInt& l_k, ZetaVariant variant) {
  require_positive(r, "r");
  if (l_k < 1) throw Error(ErrorKind::InvalidArgument, "l_k must be >= 1");
  Zeta z = zeta_radii(k, C, t);
  const Real lead = (1 - mp::pow(Real(2), -r)) / (2 * to_real(l_k));
  z.zeta = variant == ZetaVariant::Recursive ? lead * mp::pow(z.delta1, r) : lead * z.delta1;
  return z;
}

BigInt box_cover_bound(const Real& radius, unsigned q, const Real& diameter) {
  require_positive(radius, "covering radius");
  require_positive(diameter, "diameter");
  return ceil_real(mp::pow(diameter / radius + 2, static_cast<int>(q)));
}

DnBound dn_bound(const Real& n, const Real& r, const Real& t, const Real& C, const Real& zeta_n) {
  if (!(n >= 1)) throw Error(ErrorKind::InvalidArgument, "d_n needs n >= 1");
  require_positive(r, "r");
  require_positive(t, "t");
  require_positive(C, "C");
  DnBound out;
  const Real eps1 = mp::pow(C, -1 / t) / 2;
  out.d1 = (1 - mp::pow(Real(2), -t)) * mp::pow(eps1, r);
  if (n < 2) {
    out.d2 = std::numeric_limits<Real>::quiet_NaN();
    out.d = out.d1;
    return out;
  }
  require_positive(zeta_n, "zeta_n");
  const Real e = 1 + r / t;
  out.d2 = mp::pow(Real(2), -e) * mp::pow(C, -r / t) * mp::pow(mp::pow(Real(3), -r) * zeta_n, e);
  out.d = out.d2 < out.d1 ? out.d2 : out.d1;
  return out;
}

namespace {

CoverCount default_cover(unsigned q) {
  return [q](const Real&, const Real& radius) { return box_cover_bound(radius, q); };
}

}  // namespace

BoundConstants packing_constants(unsigned q, const Real& C1, const Real& C2, const Real& m, const Real& s0,
                                 const Real& r, ZetaVariant variant, const CoverCount& cover_in) {
  if (q < 1) throw Error(ErrorKind::InvalidArgument, "dimension q must be >= 1");
  require_positive(m, "m");
  BoundConstants bc;
  bc.q = q;
  bc.r = r;
  bc.s0 = s0;
  bc.C1 = C1;
  bc.C2 = C2;
  bc.m = m;
  bc.variant = variant;
  bc.xi = Real(40) / 7;
  bc.eta = eta0_n1(C1, C2, r, s0, q);  // validates C1, C2, r, s0
  const CoverCount cover = cover_in ? cover_in : default_cover(q);
  const ZetaVariant other = variant == ZetaVariant::Recursive ? ZetaVariant::Literal : ZetaVariant::Recursive;

  bc.n0 = pow_big(130, q);
  bc.k1 = pow_big(82, q);
  bc.k2 = pow_big(218, q);
  bc.k3 = floor_rat(pow_rat(Rational(35, 4), q));
  bc.N = C2 / C1 * mp::pow(Real(2), s0) * m;

  const Real factor = mp::pow(7 * C1 / (54 * C2), (s0 + r) / r);

  const Real k_n1 = to_real(bc.eta.n1);
  bc.l_n1 = cover(k_n1, zeta_radii(k_n1, bc.xi, s0).radius);
  bc.zeta_n1 = zeta(k_n1, r, bc.xi, s0, bc.l_n1, variant);
  bc.zeta_n1_other = zeta(k_n1, r, bc.xi, s0, bc.l_n1, other);
  bc.eta_n2 = factor * mp::pow(bc.zeta_n1.zeta, 1 / r);
  bc.M_eta_n2 = covering_constant(bc.eta_n2, q);
  bc.n2 = bc.M_eta_n2 + bc.k1 + bc.eta.n1 + 1;

  const Real total = bc.N * to_real(bc.n0 + bc.n2);
  bc.k_n3 = ceil_real(total);
  bc.n4 = ceil_real(total * to_real(bc.k3) + to_real(bc.k2));
  const Real k_n3 = to_real(bc.k_n3);
  bc.l_n3 = cover(k_n3, zeta_radii(k_n3, bc.xi, s0).radius);
  bc.zeta_n3 = zeta(k_n3, r, bc.xi, s0, bc.l_n3, variant);
  bc.zeta_n3_other = zeta(k_n3, r, bc.xi, s0, bc.l_n3, other);
  bc.eta_n3 = factor * mp::pow(bc.zeta_n3.zeta, 1 / r);
  bc.M_eta_n3 = covering_constant(bc.eta_n3, q);
  bc.n3 = bc.M_eta_n3 + bc.n4 + 1;

  bc.C3 = C2 * mp::pow(Real(2), s0 + r) * mp::pow(Real(9) / 8, r) * mp::pow(Real(15) / 2, static_cast<int>(q));
  bc.d_table_length = floor_rat(Rational(bc.n3) * pow_rat(Rational(15, 2), q));

  if (!(bc.n3 > bc.n4 && bc.n4 > bc.n2 && bc.n2 > bc.eta.n1 + bc.k1))
    throw Error(ErrorKind::NumericFailure, "constant orderings n3 > n4 > n2 > n1 + k1 violated");
  return bc;
}

std::vector<DnBound> d_table(const BoundConstants& bc, std::uint64_t count, const CoverCount& cover_in) {
  const CoverCount cover = cover_in ? cover_in : default_cover(bc.q);
  std::vector<DnBound> out;
  out.reserve(count);
  for (std::uint64_t h = 1; h <= count; ++h) {
    const Real k(h);
    if (h == 1) {
      out.push_back(dn_bound(k, bc.r, bc.s0, bc.xi, Real(0)));
      continue;
    }
    const Real z = zeta(k, bc.r, bc.xi, bc.s0, cover(k, zeta_radii(k, bc.xi, bc.s0).radius), bc.variant).zeta;
    out.push_back(dn_bound(k, bc.r, bc.s0, bc.xi, z));
  }
  return out;
}

C6Result c6_constant(const BoundConstants& bc, std::uint64_t cap, const CoverCount& cover) {
  if (bc.d_table_length > cap)
    throw Error(ErrorKind::CapExceeded, "C6 needs d_h for h up to " + bc.d_table_length.str() +
                                            ", above the cap " + std::to_string(cap));
  const auto table = d_table(bc, static_cast<std::uint64_t>(bc.d_table_length), cover);
  C6Result out;
  out.d_min = table.front().d;
  for (const auto& d : table)
    if (d.d < out.d_min) out.d_min = d.d;
  out.c6 = out.d_min * bc.C1;
  out.evaluated = table.size();
  return out;
}

std::pair<double, double> phi_interval(double C1, double C2, double s0, double m, int k) {
  const double growth = std::pow(m, k * s0);
  return {growth / (C2 * std::pow(2.0, s0)), growth / C1};
}

double phi_growth_bound(double C1, double C2, double s0, double m) { return C2 / C1 * std::pow(2.0, s0) * m; }

namespace {

std::vector<std::pair<std::string, std::string>> rows_of(const BoundConstants& bc) {
  return {
      {"q", std::to_string(bc.q)},
      {"r", to_string(bc.r)},
      {"s0", to_string(bc.s0)},
      {"C1", to_string(bc.C1)},
      {"C2", to_string(bc.C2)},
      {"m", to_string(bc.m)},
      {"zeta_variant", std::string(to_string(bc.variant))},
      {"xi", to_string(bc.xi)},
      {"eta0", to_string(bc.eta.eta0)},
      {"eta0_r", to_string(bc.eta.eta0_r)},
      {"n1", bc.eta.n1.str()},
      {"n0", bc.n0.str()},
      {"k1", bc.k1.str()},
      {"k2", bc.k2.str()},
      {"k3", bc.k3.str()},
      {"N", to_string(bc.N)},
      {"l_n1", bc.l_n1.str()},
      {"delta1_n1", to_string(bc.zeta_n1.delta1)},
      {"delta2_n1", to_string(bc.zeta_n1.delta2)},
      {"zeta_n1", to_string(bc.zeta_n1.zeta)},
      {"zeta_n1_other_variant", to_string(bc.zeta_n1_other.zeta)},
      {"eta_n2", to_string(bc.eta_n2)},
      {"M_eta_n2", bc.M_eta_n2.str()},
      {"n2", bc.n2.str()},
      {"k_n3", bc.k_n3.str()},
      {"n4", bc.n4.str()},
      {"l_n3", bc.l_n3.str()},
      {"zeta_n3", to_string(bc.zeta_n3.zeta)},
      {"zeta_n3_other_variant", to_string(bc.zeta_n3_other.zeta)},
      {"eta_n3", to_string(bc.eta_n3)},
      {"M_eta_n3", bc.M_eta_n3.str()},
      {"n3", bc.n3.str()},
      {"C3", to_string(bc.C3)},
      {"C6", "requires d-table up to h = " + bc.d_table_length.str()},
  };
}

}  // namespace

std::string bounds_table(const BoundConstants& bc) {
  const auto rows = rows_of(bc);
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  std::string out;
  for (const auto& [k, v] : rows) out += k + std::string(width - k.size() + 2, ' ') + v + "\n";
  return out;
}

std::string bounds_csv(const BoundConstants& bc, const std::string& header_comment) {
  std::string out = header_comment + csv_row({"name", "value"});
  for (const auto& [k, v] : rows_of(bc)) out += csv_row({k, v});
  return out;
}

}  // namespace adq
