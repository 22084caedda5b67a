#include "ncmod/lseries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace ncmod {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kI(0.0, 1.0);

// e(k/c) with k reduced mod c first, so the phase is exact for large k
cplx phase(long k, long c) {
  long r = k % c;
  if (r < 0) r += c;
  const double t = kTwoPi * static_cast<double>(r) / static_cast<double>(c);
  return {std::cos(t), std::sin(t)};
}

// Number of terms after which e^{-2 pi n y} (2 pi n y)^k falls below tol * 1e-3.
std::size_t terms_for(double y, double sigma, double tol) {
  const double k = std::abs(sigma) + 3.0;
  const double target = -std::log(tol * 1e-3);
  double x = 10.0;
  for (int i = 0; i < 50; ++i) x = target + k * std::log(x);
  return static_cast<std::size_t>(std::ceil(x / (kTwoPi * y))) + 1;
}

void require_terms(const FourierSeries& f, std::size_t N) {
  if (f.size() < N) throw TruncationError(N, f.size());
}

// sum_{n<=N} w(n) (2 pi n)^{e} Gamma(g, 2 pi n t)
template <class W>
cplx gamma_sum(W w, std::size_t N, cplx e, cplx g, double t) {
  cplx sum = 0.0;
  for (std::size_t n = N; n >= 1; --n) {
    const cplx wn = w(n);
    if (wn == 0.0) continue;
    const double x = kTwoPi * static_cast<double>(n);
    sum += wn * std::exp(e * std::log(x)) * incomplete_gamma_upper(g, x * t);
  }
  return sum;
}

// h(m) = sum_{n<m} a1(m-n) a2(n) / (2 pi i n): coefficients of f1 * int_{i inf} f2
std::vector<cplx> product_coefficients(const std::vector<cplx>& a1, const std::vector<cplx>& a2, std::size_t N) {
  std::vector<cplx> inner(N + 1, 0.0), h(N + 1, 0.0);
  for (std::size_t n = 1; n <= N; ++n) inner[n] = a2[n - 1] / (kI * kTwoPi * static_cast<double>(n));
  for (std::size_t m = 2; m <= N; ++m) {
    cplx acc = 0.0;
    for (std::size_t n = 1; n < m; ++n) acc += a1[m - n - 1] * inner[n];
    h[m] = acc;
  }
  return h;
}

std::vector<cplx> conj_coeffs(const std::vector<cplx>& a) {
  std::vector<cplx> b(a.size());
  std::transform(a.begin(), a.end(), b.begin(), [](cplx z) { return std::conj(z); });
  return b;
}

struct Legs {
  cplx upper;  // eps-independent piece
  cplx lower;  // coefficient of eps (length 1) or eps1 (length 2, excluding its own eps2 part)
};

// Untwisted length 1: I = upper + eps * lower
Legs untwisted_legs(const FourierSeries& f, cplx s, const ContinuationParams& p) {
  const double q = f.level;
  const double y0 = p.split / std::sqrt(q);
  const double t0 = 1.0 / (q * y0);
  const std::size_t N = std::max(terms_for(y0, s.real(), p.tol), terms_for(t0, 2.0 - s.real(), p.tol));
  require_terms(f, N);
  const cplx is = std::exp(s * std::log(kI));
  const cplx upper = -is * gamma_sum([&](std::size_t n) { return f.an[n - 1]; }, N, -s, s, y0);
  const cplx lower = is * std::exp((1.0 - s) * std::log(q)) *
                     gamma_sum([&](std::size_t n) { return std::conj(f.an[n - 1]); }, N, s - 2.0, 2.0 - s, t0);
  return {upper, lower};
}

}  // namespace

void check_cusp(const CuspFraction& r, int level) {
  if (r.c <= 0) throw CuspValidityError("cusp denominator must be positive");
  if (level <= 0 || r.c % level != 0)
    throw CuspValidityError("cusp " + std::to_string(r.a) + "/" + std::to_string(r.c) + " is not equivalent to i inf for level " +
                            std::to_string(level) + " (level must divide the denominator)");
  if (std::gcd(r.a, r.c) != 1)
    throw CuspValidityError("cusp " + std::to_string(r.a) + "/" + std::to_string(r.c) + " is not in lowest terms");
  if (((r.a % r.c) * (r.d % r.c) % r.c + r.c) % r.c != 1 % r.c)
    throw CuspValidityError("cusp " + std::to_string(r.a) + "/" + std::to_string(r.c) + ": d is not an inverse of a mod c");
}

CuspFraction partner_cusp(const CuspFraction& r) {
  auto mod = [&](long x) { return ((x % r.c) + r.c) % r.c; };
  return {mod(-r.d), r.c, mod(-r.a)};
}

FourierSeries conjugate_form(const FourierSeries& f) {
  FourierSeries g = f;
  g.an = conj_coeffs(f.an);
  g.label = f.label + "^";
  return g;
}

PartialSum multiple_L_partial(const std::vector<FourierSeries>& forms, const CuspFraction& r, cplx s, std::size_t N) {
  if (forms.empty()) throw std::invalid_argument("multiple_L_partial: empty form list");
  const unsigned l = static_cast<unsigned>(forms.size());
  for (const auto& f : forms) check_cusp(r, f.level);
  if (!(s.real() > 1.0 + l / 2.0))
    throw ConvergenceRegionError("multiple_L_partial: Re s must exceed " + std::to_string(1.0 + l / 2.0));
  for (const auto& f : forms) require_terms(f, N);
  // g(m) = sum over chains below m_1 = m, built from the innermost letter outward
  std::vector<cplx> g(N + 1, 0.0);
  for (std::size_t m = 1; m <= N; ++m) g[m] = forms[l - 1].an[m - 1];
  for (int k = static_cast<int>(l) - 2; k >= 0; --k) {
    std::vector<cplx> inner(N + 1, 0.0);
    for (std::size_t m = 1; m <= N; ++m) inner[m] = g[m] / static_cast<double>(m);
    std::vector<cplx> next(N + 1, 0.0);
    for (std::size_t m = 2; m <= N; ++m) {
      cplx acc = 0.0;
      for (std::size_t mp = 1; mp < m; ++mp) acc += forms[k].an[m - mp - 1] * inner[mp];
      next[m] = acc;
    }
    g = std::move(next);
  }
  cplx sum = 0.0;
  for (std::size_t m = N; m >= 1; --m)
    sum += g[m] * phase(r.a * static_cast<long>(m % r.c), r.c) * std::exp(-s * std::log(static_cast<double>(m)));
  const double sigma = s.real();
  const double n = static_cast<double>(N);
  double tail = std::numeric_limits<double>::infinity();
  if (l == 1) {
    tail = (std::log(n) + 2.0) * std::pow(n, 1.5 - sigma) / (sigma - 1.5);
  } else if (sigma > l + 1.0) {
    tail = std::pow(2.0, l) * std::pow(n, l + 1.0 - sigma) / ((sigma - l - 1.0) * std::tgamma(static_cast<double>(l)));
  }
  return {sum, tail, N};
}

cplx central_value(const TruncatedJSeries& J, const Word& v) {
  return std::pow(cplx(0.0, kTwoPi), static_cast<int>(v.size())) * J[v];
}

cplx central_value(const std::vector<FourierSeries>& forms, const CuspFraction& r, double tol) {
  if (forms.empty()) throw std::invalid_argument("central_value: empty form list");
  for (const auto& f : forms) check_cusp(r, f.level);
  const unsigned l = static_cast<unsigned>(forms.size());
  const std::size_t N = CoefficientTables::required_terms(l, 1.0 / static_cast<double>(r.c), tol);
  const CoefficientTables t(forms, l, N);
  std::vector<int> letters(l);
  std::iota(letters.begin(), letters.end(), 0);
  return central_value(cusp_j_direct(r, t, tol), Word(letters));
}

cplx twisted_integral(const FourierSeries& f, const CuspFraction& r, cplx s, const ContinuationParams& p) {
  check_cusp(r, f.level);
  const double c = static_cast<double>(r.c);
  const double y0 = p.split / c;
  const double t0 = 1.0 / (c * c * y0);
  const std::size_t N = std::max(terms_for(y0, s.real(), p.tol), terms_for(t0, 2.0 - s.real(), p.tol));
  require_terms(f, N);
  const cplx is = std::exp(s * std::log(kI));
  const cplx upper =
      -is * gamma_sum([&](std::size_t n) { return f.an[n - 1] * phase(r.a * static_cast<long>(n % r.c), r.c); }, N, -s, s, y0);
  const cplx lower =
      is * std::exp((2.0 - 2.0 * s) * std::log(c)) *
      gamma_sum([&](std::size_t n) { return f.an[n - 1] * phase(-r.d * static_cast<long>(n % r.c), r.c); }, N, s - 2.0,
                2.0 - s, t0);
  return upper + lower;
}

cplx twisted_L_continued(const FourierSeries& f, const CuspFraction& r, cplx s, const ContinuationParams& p) {
  const cplx I = twisted_integral(f, r, s, p);
  return -std::exp(s * std::log(kTwoPi)) * I / (std::exp(s * std::log(kI)) * gamma_complex(s));
}

cplx twisted_integral2(const FourierSeries& f1, const FourierSeries& f2, const CuspFraction& r, cplx s,
                       const ContinuationParams& p) {
  check_cusp(r, f1.level);
  check_cusp(r, f2.level);
  const double c = static_cast<double>(r.c);
  const double y0 = p.split / c;
  const double t0 = 1.0 / (c * c * y0);
  const std::size_t N = std::max(terms_for(y0, s.real(), p.tol), terms_for(t0, 2.0 - s.real(), p.tol));
  require_terms(f1, N);
  require_terms(f2, N);
  const std::vector<cplx> h = product_coefficients(f1.an, f2.an, N);
  // int_{i inf}^{gamma w} f2 = I^{a/c}(f2) + int_{i inf}^{w} f2
  const cplx C2 = twisted_integral(f2, r, 1.0, p);
  const cplx is = std::exp(s * std::log(kI));
  const cplx upper =
      -is * gamma_sum([&](std::size_t m) { return h[m] * phase(r.a * static_cast<long>(m % r.c), r.c); }, N, -s, s, y0);
  auto tw = [&](std::size_t n) { return phase(-r.d * static_cast<long>(n % r.c), r.c); };
  const cplx lower1 = gamma_sum([&](std::size_t n) { return f1.an[n - 1] * tw(n); }, N, s - 2.0, 2.0 - s, t0);
  const cplx lower2 = gamma_sum([&](std::size_t m) { return h[m] * tw(m); }, N, s - 2.0, 2.0 - s, t0);
  return upper + is * std::exp((2.0 - 2.0 * s) * std::log(c)) * (C2 * lower1 + lower2);
}

cplx twisted_L2_continued(const FourierSeries& f1, const FourierSeries& f2, const CuspFraction& r, cplx s,
                          const ContinuationParams& p) {
  const cplx I = twisted_integral2(f1, f2, r, s, p);
  return std::exp((s + 1.0) * std::log(kTwoPi)) * I / (std::exp((s + 1.0) * std::log(kI)) * gamma_complex(s));
}

CompletedLValue completed_twisted_L(const FourierSeries& f, const CuspFraction& r, cplx s, const ContinuationParams& p) {
  const double c = static_cast<double>(r.c);
  const cplx I = twisted_integral(f, r, s, p);
  return {-std::exp(s * std::log(c)) * std::exp(-s * std::log(kI)) * I, c, gamma_complex(s)};
}

CompletedLValue completed_twisted_L2(const FourierSeries& f1, const FourierSeries& f2, const CuspFraction& r, cplx s,
                                     const ContinuationParams& p) {
  const double c = static_cast<double>(r.c);
  const cplx I = twisted_integral2(f1, f2, r, s, p);
  return {std::exp((s + 1.0) * std::log(c)) * std::exp(-(s + 1.0) * std::log(kI)) * I, c, gamma_complex(s)};
}

cplx twisted_fe_residual(const FourierSeries& f, const CuspFraction& r, cplx s, const ContinuationParams& p) {
  return completed_twisted_L(f, r, s, p).value + completed_twisted_L(f, partner_cusp(r), 2.0 - s, p).value;
}

cplx twisted_fe_residual2(const FourierSeries& f1, const FourierSeries& f2, const CuspFraction& r, cplx s,
                          const ContinuationParams& p) {
  const CuspFraction r2 = partner_cusp(r);
  return completed_twisted_L2(f1, f2, r, s, p).value + completed_twisted_L2(f1, f2, r2, 2.0 - s, p).value -
         completed_twisted_L(f1, r2, 2.0 - s, p).value * completed_twisted_L(f2, r2, 1.0, p).value;
}

cplx untwisted_integral(const FourierSeries& f, cplx eps, cplx s, const ContinuationParams& p) {
  const Legs g = untwisted_legs(f, s, p);
  return g.upper + eps * g.lower;
}

cplx untwisted_integral2(const FourierSeries& f1, cplx eps1, const FourierSeries& f2, cplx eps2, cplx s,
                         const ContinuationParams& p) {
  if (f1.level != f2.level) throw LevelMismatch("untwisted_integral2: forms of different levels");
  const double q = f1.level;
  const double y0 = p.split / std::sqrt(q);
  const double t0 = 1.0 / (q * y0);
  const std::size_t N = std::max(terms_for(y0, s.real(), p.tol), terms_for(t0, 2.0 - s.real(), p.tol));
  require_terms(f1, N);
  require_terms(f2, N);
  const std::vector<cplx> h = product_coefficients(f1.an, f2.an, N);
  const std::vector<cplx> b1 = conj_coeffs(f1.an);
  const std::vector<cplx> hh = product_coefficients(b1, conj_coeffs(f2.an), N);
  // int_{i inf}^{z} f2 = I^0(f2) + eps2 int_{i inf}^{w} f2hat, z = -1/(q w)
  const cplx C2 = untwisted_integral(f2, eps2, 1.0, p);
  const cplx is = std::exp(s * std::log(kI));
  const cplx upper = -is * gamma_sum([&](std::size_t m) { return h[m]; }, N, -s, s, y0);
  const cplx lower1 = gamma_sum([&](std::size_t n) { return b1[n - 1]; }, N, s - 2.0, 2.0 - s, t0);
  const cplx lower2 = gamma_sum([&](std::size_t m) { return hh[m]; }, N, s - 2.0, 2.0 - s, t0);
  return upper + eps1 * is * std::exp((1.0 - s) * std::log(q)) * (C2 * lower1 + eps2 * lower2);
}

cplx untwisted_lambda(const FourierSeries& f, cplx eps, cplx s, const ContinuationParams& p) {
  const double q = f.level;
  return -std::exp(0.5 * s * std::log(q)) * std::exp(-s * std::log(kI)) * untwisted_integral(f, eps, s, p);
}

cplx untwisted_lambda2(const FourierSeries& f1, cplx eps1, const FourierSeries& f2, cplx eps2, cplx s,
                       const ContinuationParams& p) {
  const double q = f1.level;
  return std::exp(0.5 * (s + 1.0) * std::log(q)) * std::exp(-(s + 1.0) * std::log(kI)) *
         untwisted_integral2(f1, eps1, f2, eps2, s, p);
}

cplx fit_fricke(const FourierSeries& f, cplx s0, double unit_tol) {
  ContinuationParams p1, p2;
  p1.split = 0.8;
  p2.split = 1.25;
  const Legs a = untwisted_legs(f, s0, p1);
  const Legs b = untwisted_legs(f, s0, p2);
  const cplx eps = (a.upper - b.upper) / (b.lower - a.lower);
  if (!(std::abs(std::abs(eps) - 1.0) <= unit_tol))
    throw FrickeFitError("fitted Fricke eigenvalue of " + f.label + " has modulus " + std::to_string(std::abs(eps)));
  return eps;
}

double FEReport::max_residual() const {
  double m = 0;
  for (double r : residual1) m = std::max(m, r);
  for (double r : residual2) m = std::max(m, r);
  return m;
}

FEReport untwisted_FE_check(const FourierSeries& f1, const FourierSeries& f2, const std::vector<cplx>& s_grid,
                            const ContinuationParams& p) {
  if (f1.level != f2.level) throw LevelMismatch("untwisted_FE_check: forms of different levels");
  FEReport rep;
  rep.s_grid = s_grid;
  auto eps_of = [&](const FourierSeries& f, bool* fitted) {
    if (f.fricke) return *f.fricke;
    *fitted = true;
    return fit_fricke(f);
  };
  rep.eps1 = eps_of(f1, &rep.eps1_fitted);
  rep.eps2 = eps_of(f2, &rep.eps2_fitted);
  rep.eps_unit_defect = std::max(std::abs(std::abs(rep.eps1) - 1.0), std::abs(std::abs(rep.eps2) - 1.0));
  const FourierSeries h1 = conjugate_form(f1), h2 = conjugate_form(f2);
  // W fhat = conj(eps) f for the conjugate form
  const cplx e1h = std::conj(rep.eps1), e2h = std::conj(rep.eps2);
  // different split points on the two sides, so agreement is not automatic
  ContinuationParams pa = p, pb = p;
  pa.split = 0.9 * p.split;
  pb.split = 1.2 * p.split;
  for (cplx s : s_grid) {
    const cplx L1 = untwisted_lambda(f1, rep.eps1, s, pa);
    const cplx L1h = untwisted_lambda(h1, e1h, 2.0 - s, pb);
    rep.residual1.push_back(std::abs(L1 + rep.eps1 * L1h) / std::max(1.0, std::abs(L1) + std::abs(L1h)));
    const cplx L12 = untwisted_lambda2(f1, rep.eps1, f2, rep.eps2, s, pa);
    const cplx L12h = untwisted_lambda2(h1, e1h, h2, e2h, 2.0 - s, pb);
    const cplx corr = untwisted_lambda(h1, e1h, 2.0 - s, pb) * untwisted_lambda(h2, e2h, 1.0, pb);
    const cplx rhs = -rep.eps1 * rep.eps2 * (L12h - corr);
    rep.residual2.push_back(std::abs(L12 - rhs) / std::max(1.0, std::abs(L12) + std::abs(L12h) + std::abs(corr)));
  }
  return rep;
}

}  // namespace ncmod
