#include "ncmod/special.hpp"

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace ncmod {

namespace {

constexpr std::array<double, 9> kLanczos = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                            771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                            -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool near_nonpositive_integer(cplx s, double radius, long* m) {
  const double r = std::round(s.real());
  if (r > 0) return false;
  if (std::abs(s - cplx(r, 0.0)) >= radius) return false;
  *m = static_cast<long>(-r);
  return true;
}

cplx lower_series(cplx s, double x) {
  cplx term = 1.0 / s;
  cplx sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= x / (s + static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) return sum * std::exp(s * std::log(x) - x);
  }
  throw NonConvergence("incomplete_gamma_upper: power series did not converge");
}

cplx upper_continued_fraction(cplx s, double x) {
  constexpr double tiny = 1e-300;
  cplx b = x + 1.0 - s;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 100000; ++i) {
    const cplx an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cplx del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return std::exp(s * std::log(x) - x) * h;
  }
  throw NonConvergence("incomplete_gamma_upper: continued fraction did not converge");
}

cplx upper_quadrature(cplx s, double x) {
  // Gamma(s,x) = x^s int_0^inf exp(s u - x e^u) du
  const double U = std::log1p(60.0 / x);
  auto f = [s, x](double u) { return std::exp(s * u - x * std::exp(u)); };
  double err = 0;
  const cplx I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, U, 15, 1e-14, &err);
  return std::exp(s * std::log(x)) * I;
}

}  // namespace

cplx gamma_complex(cplx s) {
  if (s.real() < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * s) * gamma_complex(1.0 - s));
  const cplx z = s - 1.0;
  cplx a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + 7.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::exp((z + 0.5) * std::log(t) - t) * a;
}

cplx incomplete_gamma_upper(cplx s, double x) {
  if (!(x > 0) || !std::isfinite(x)) throw std::invalid_argument("incomplete_gamma_upper: x must be positive and finite");
  if (x >= 1.5 && x >= s.real() + 1.0) return upper_continued_fraction(s, x);
  long m = 0;
  if (near_nonpositive_integer(s, 1e-3, &m)) {
    if (s.imag() != 0.0 || s.real() != -static_cast<double>(m)) return upper_quadrature(s, x);
    // Gamma(0,x) = E1(x); Gamma(-k,x) = (x^{-k} e^{-x} - Gamma(1-k,x)) / k
    cplx g = boost::math::expint(1, x);
    for (long k = 1; k <= m; ++k) g = (std::pow(x, -static_cast<double>(k)) * std::exp(-x) - g) / static_cast<double>(k);
    return g;
  }
  return gamma_complex(s) - lower_series(s, x);
}

}  // namespace ncmod
