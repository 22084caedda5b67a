#include "ncmod/modgroup.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <tuple>

namespace ncmod {

GroupElement operator*(const GroupElement& x, const GroupElement& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

bool operator==(const GroupElement& x, const GroupElement& y) {
  return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
}

GroupElement power(const GroupElement& g, long n) {
  GroupElement base = n < 0 ? g.inverse() : g;
  unsigned long e = n < 0 ? -static_cast<unsigned long>(n) : static_cast<unsigned long>(n);
  GroupElement out;
  while (e) {
    if (e & 1) out = out * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return out;
}

bool GroupElement::in_gamma0(long q) const {
  if (det() != 1) return false;
  return mpz_divisible_ui_p(c.get_mpz_t(), static_cast<unsigned long>(q)) != 0;
}

bool GroupElement::is_identity_projective() const {
  return b == 0 && c == 0 && ((a == 1 && d == 1) || (a == -1 && d == -1));
}

std::string GroupElement::str() const {
  std::ostringstream os;
  os << "[[" << a << ", " << b << "], [" << c << ", " << d << "]]";
  return os.str();
}

long index_gamma0(long q) {
  if (q < 1) throw std::invalid_argument("index_gamma0: q must be >= 1");
  long psi = q;
  long m = q;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    psi = psi / p * (p + 1);
    while (m % p == 0) m /= p;
  }
  if (m > 1) psi = psi / m * (m + 1);
  return psi;
}

double volume(long q) { return std::numbers::pi / 3.0 * static_cast<double>(index_gamma0(q)); }

double c_constant(long q) { return std::numbers::pi * static_cast<double>(index_gamma0(q)) / 24.0; }

long euler_phi(long n) {
  long out = n;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    out -= out / p;
    while (n % p == 0) n /= p;
  }
  if (n > 1) out -= out / n;
  return out;
}

const char* to_string(Ordering o) { return o == Ordering::CLeM ? "c_le_M" : "c_sq_le_M"; }

Ordering parse_ordering(const std::string& s) {
  if (s == "c_le_M" || s == "c<=M") return Ordering::CLeM;
  if (s == "c_sq_le_M" || s == "c^2<=M") return Ordering::CSqLeM;
  throw std::invalid_argument("unknown ordering '" + s + "' (expected c_le_M or c_sq_le_M)");
}

long max_denominator(long M, Ordering ordering) {
  if (M < 1) throw std::invalid_argument("enumerate_T: M must be >= 1");
  if (ordering == Ordering::CLeM) return M;
  long c = static_cast<long>(std::sqrt(static_cast<double>(M)));
  while (c * c > M) --c;
  while ((c + 1) * (c + 1) <= M) ++c;
  return c;
}

namespace {

// inverse of a modulo c in [0, c)
long inverse_mod(long a, long c) {
  long r0 = c, r1 = ((a % c) + c) % c;
  long s0 = 0, s1 = 1;
  while (r1 != 0) {
    const long t = r0 / r1;
    std::tie(r0, r1) = std::pair{r1, r0 - t * r1};
    std::tie(s0, s1) = std::pair{s1, s0 - t * s1};
  }
  if (r0 != 1) throw std::invalid_argument("inverse_mod: not coprime");
  return ((s0 % c) + c) % c;
}

}  // namespace

void enumerate_T(long q, long M, Ordering ordering, const std::function<void(const CuspFraction&)>& sink) {
  if (q < 1) throw std::invalid_argument("enumerate_T: q must be >= 1");
  const long cmax = max_denominator(M, ordering);
  for (long c = q; c <= cmax; c += q) {
    if (c == 1) {
      sink({0, 1, 1});
      continue;
    }
    for (long a = 0; a < c; ++a) {
      if (std::gcd(a, c) != 1) continue;
      sink({a, c, inverse_mod(a, c)});
    }
  }
}

std::vector<CuspFraction> enumerate_T(long q, long M, Ordering ordering) {
  std::vector<CuspFraction> out;
  enumerate_T(q, M, ordering, [&out](const CuspFraction& r) { out.push_back(r); });
  return out;
}

long count_T(long q, long M, Ordering ordering) {
  const long cmax = max_denominator(M, ordering);
  long total = 0;
  for (long c = q; c <= cmax; c += q) total += euler_phi(c);
  return total;
}

GroupElement cusp_to_matrix(const CuspFraction& r) {
  if (r.c < 1 || std::gcd(r.a, r.c) != 1) throw std::invalid_argument("cusp_to_matrix: a/c not reduced");
  const mpz_class a = r.a, c = r.c, d = r.d;
  mpz_class num = a * d - 1;
  if (!mpz_divisible_p(num.get_mpz_t(), c.get_mpz_t()))
    throw std::logic_error("cusp_to_matrix: d is not an inverse of a mod c");
  mpz_class b = num / c;
  GroupElement g{a, b, c, d};
  if (g.det() != 1) throw std::logic_error("cusp_to_matrix: determinant != 1");
  return g;
}

}  // namespace ncmod
