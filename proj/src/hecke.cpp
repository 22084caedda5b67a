#include "ncmod/hecke.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "ncmod/modgroup.hpp"

namespace ncmod {

const char* to_string(CoefficientSource s) {
  switch (s) {
    case CoefficientSource::EtaProduct:
      return "eta-product";
    case CoefficientSource::EllipticCurve:
      return "elliptic-curve";
    case CoefficientSource::Ingested:
      return "ingested";
  }
  return "?";
}

bool FourierSeries::is_real(double tol) const {
  return std::all_of(an.begin(), an.end(), [tol](auto z) { return std::abs(z.imag()) <= tol; });
}

bool is_hermitian(const GramMatrix& g, double tol) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g(i, i).real() <= 0 || std::abs(g(i, i).imag()) > tol) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(g(i, j) - std::conj(g(j, i))) > tol) return false;
  }
  return true;
}

MissingPrime::MissingPrime(long p)
    : std::runtime_error("hecke_extend: no a(p) supplied for prime p = " + std::to_string(p)), prime(p) {}

std::vector<int> smallest_prime_factors(std::size_t N) {
  std::vector<int> spf(N + 1, 0);
  for (std::size_t i = 2; i <= N; ++i) {
    if (spf[i] != 0) continue;
    for (std::size_t j = i; j <= N; j += i)
      if (spf[j] == 0) spf[j] = static_cast<int>(i);
  }
  return spf;
}

std::vector<long> primes_up_to(long N) {
  std::vector<long> out;
  if (N < 2) return out;
  std::vector<bool> composite(N + 1, false);
  for (long i = 2; i <= N; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (long j = i * i; j <= N; j += i) composite[j] = true;
  }
  return out;
}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

long divisor_count(long n) {
  long count = 1;
  for (long p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    count *= e + 1;
  }
  if (n > 1) count *= 2;
  return count;
}

std::int64_t EllipticCurveModel::discriminant() const {
  const std::int64_t b2 = a1 * a1 + 4 * a2;
  const std::int64_t b4 = 2 * a4 + a1 * a3;
  const std::int64_t b6 = a3 * a3 + 4 * a6;
  const std::int64_t b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

EllipticCurveModel curve_11a() { return {0, -1, 1, -10, -20, 11, "11a"}; }
EllipticCurveModel curve_37a() { return {0, 0, 1, -1, 0, 37, "37a"}; }
EllipticCurveModel curve_37b() { return {0, 1, 1, -23, -50, 37, "37b"}; }

EtaProduct eta_level11() { return {11, "11a", {{1, 2}, {11, 2}}}; }

namespace {

// prod_{n>=1} (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}, k over all integers.
std::vector<std::pair<std::size_t, int>> pentagonal_terms(std::size_t limit) {
  std::vector<std::pair<std::size_t, int>> terms{{0, 1}};
  for (long k = 1;; ++k) {
    const long e1 = k * (3 * k - 1) / 2;
    const long e2 = k * (3 * k + 1) / 2;
    if (static_cast<std::size_t>(e1) > limit) break;
    const int sign = (k % 2 == 0) ? 1 : -1;
    terms.emplace_back(e1, sign);
    if (static_cast<std::size_t>(e2) <= limit) terms.emplace_back(e2, sign);
  }
  return terms;
}

long mod(long x, long p) {
  long r = x % p;
  return r < 0 ? r + p : r;
}

}  // namespace

FourierSeries eta_product_coefficients(const EtaProduct& spec, std::size_t N) {
  if (N < 1) throw std::invalid_argument("eta_product_coefficients: N must be >= 1");
  long weight24 = 0;
  for (auto [d, r] : spec.factors) {
    if (d < 1 || r < 1) throw std::invalid_argument("eta_product_coefficients: factors need d, r >= 1");
    weight24 += static_cast<long>(d) * r;
  }
  if (weight24 % 24 != 0) throw std::invalid_argument("eta_product_coefficients: q-shift is not integral");
  const std::size_t shift = static_cast<std::size_t>(weight24 / 24);
  if (shift != 1) throw std::invalid_argument("eta_product_coefficients: leading term is not q^1");

  // Series in q of length N (coefficients of q^0..q^{N-1}); a(n) = P[n-1].
  std::vector<std::int64_t> series(N, 0);
  series[0] = 1;
  const std::size_t limit = N - 1;
  for (auto [d, r] : spec.factors) {
    const auto pent = pentagonal_terms(limit / static_cast<std::size_t>(d));
    for (int rep = 0; rep < r; ++rep) {
      std::vector<std::int64_t> next(N, 0);
      for (std::size_t i = 0; i < N; ++i) {
        if (series[i] == 0) continue;
        for (auto [e, s] : pent) {
          const std::size_t j = i + e * static_cast<std::size_t>(d);
          if (j > limit) break;
          next[j] += s * series[i];
        }
      }
      series = std::move(next);
    }
  }
  FourierSeries f;
  f.level = spec.level;
  f.label = spec.label;
  f.source = CoefficientSource::EtaProduct;
  f.an.resize(N);
  for (std::size_t n = 1; n <= N; ++n) f.an[n - 1] = static_cast<double>(series[n - 1]);
  return f;
}

LocalData curve_ap(const EllipticCurveModel& E, long p) {
  if (!is_prime(p)) throw std::invalid_argument("curve_ap: p = " + std::to_string(p) + " is not prime");
  long affine = 0;
  if (p == 2) {
    for (long x = 0; x < 2; ++x)
      for (long y = 0; y < 2; ++y) {
        const long lhs = y * y + E.a1 * x * y + E.a3 * y;
        const long rhs = x * x * x + E.a2 * x * x + E.a4 * x + E.a6;
        if (mod(lhs - rhs, 2) == 0) ++affine;
      }
  } else {
    // (2y + a1 x + a3)^2 = g(x) = 4(x^3 + a2 x^2 + a4 x + a6) + (a1 x + a3)^2; g is a
    // cubic in x, stepped by forward differences so the inner loop only adds mod p.
    std::vector<int> roots(p, 0);
    for (long y = 0, sq = 0; y < p; ++y) {
      ++roots[sq];
      sq += 2 * y + 1;
      while (sq >= p) sq -= p;
    }
    const long a1 = mod(E.a1, p), a2 = mod(E.a2, p), a3 = mod(E.a3, p), a4 = mod(E.a4, p), a6 = mod(E.a6, p);
    auto g = [&](long x) {
      const long cubic = ((x * x % p * x) % p + a2 * x % p * x % p + a4 * x % p + a6) % p;
      const long lin = (a1 * x + a3) % p;
      return (4 * cubic + lin * lin) % p;
    };
    const long g0 = g(0), g1 = g(1), g2 = g(2), g3 = g(3);
    long d0 = g0, d1 = mod(g1 - g0, p), d2 = mod(g2 - 2 * g1 + g0, p), d3 = mod(g3 - 3 * g2 + 3 * g1 - g0, p);
    for (long x = 0; x < p; ++x) {
      affine += roots[d0];
      d0 += d1;
      if (d0 >= p) d0 -= p;
      d1 += d2;
      if (d1 >= p) d1 -= p;
      d2 += d3;
      if (d2 >= p) d2 -= p;
    }
  }
  LocalData out;
  out.ap = p + 1 - (affine + 1);
  out.bad_prime = (E.discriminant() % p) == 0;
  if (out.bad_prime && std::abs(out.ap) > 1)
    throw InvariantViolation("curve_ap: bad prime " + std::to_string(p) + " gave a_p = " + std::to_string(out.ap) +
                             " outside {-1,0,1} (model not minimal?)");
  return out;
}

FourierSeries hecke_extend(const std::map<long, long>& ap, int level, std::size_t N) {
  if (N < 1) throw std::invalid_argument("hecke_extend: N must be >= 1");
  std::vector<std::int64_t> a(N + 1, 0);
  a[1] = 1;
  const auto spf = smallest_prime_factors(N);
  for (std::size_t n = 2; n <= N; ++n) {
    const long p = spf[n];
    std::size_t m = n;
    int k = 0;
    while (m % p == 0) {
      m /= p;
      ++k;
    }
    if (m != 1) {
      a[n] = a[m] * a[n / m];
      continue;
    }
    // n = p^k
    auto it = ap.find(p);
    if (it == ap.end()) throw MissingPrime(p);
    if (k == 1) {
      a[n] = it->second;
    } else if (level % p == 0) {
      a[n] = a[n / p] * it->second;
    } else {
      a[n] = it->second * a[n / p] - p * a[n / p / p];
    }
  }
  FourierSeries f;
  f.level = level;
  f.source = CoefficientSource::EllipticCurve;
  f.an.resize(N);
  for (std::size_t n = 1; n <= N; ++n) f.an[n - 1] = static_cast<double>(a[n]);
  return f;
}

FourierSeries curve_coefficients(const EllipticCurveModel& curve, std::size_t N) {
  std::map<long, long> ap;
  for (long p : primes_up_to(static_cast<long>(N))) ap[p] = curve_ap(curve, p).ap;
  FourierSeries f = hecke_extend(ap, curve.conductor, N);
  f.label = curve.label;
  f.source = CoefficientSource::EllipticCurve;
  return f;
}

void validate(const FourierSeries& f, double tol) {
  const std::size_t N = f.size();
  if (N == 0) throw InvariantViolation(f.label + ": empty coefficient list");
  auto close = [tol](std::complex<double> x, std::complex<double> y) {
    return std::abs(x - y) <= tol * std::max(1.0, std::abs(y));
  };
  if (!close(f(1), 1.0)) throw InvariantViolation(f.label + ": a(1) != 1");
  const auto spf = smallest_prime_factors(N);
  for (std::size_t n = 2; n <= N; ++n) {
    const long p = spf[n];
    std::size_t pk = 1;
    std::size_t m = n;
    while (m % p == 0) {
      m /= p;
      pk *= p;
    }
    if (m != 1 && !close(f(n), f(m) * f(pk)))
      throw InvariantViolation(f.label + ": multiplicativity fails at n = " + std::to_string(n));
    if (m == 1 && pk != static_cast<std::size_t>(p)) {
      const std::complex<double> expected = (f.level % p == 0)
                                                ? f(pk / p) * f(p)
                                                : f(p) * f(pk / p) - static_cast<double>(p) * f(pk / p / p);
      if (!close(f(n), expected))
        throw InvariantViolation(f.label + ": Hecke recursion fails at n = " + std::to_string(n));
    }
    const double deligne = static_cast<double>(divisor_count(static_cast<long>(n))) * std::sqrt(static_cast<double>(n));
    if (std::abs(f(n)) > deligne * (1 + tol))
      throw InvariantViolation(f.label + ": Deligne bound fails at n = " + std::to_string(n));
  }
}

std::size_t first_mismatch(const FourierSeries& a, const FourierSeries& b, std::size_t N, double tol) {
  const std::size_t upto = std::min({N, a.size(), b.size()});
  for (std::size_t n = 1; n <= upto; ++n)
    if (std::abs(a(n) - b(n)) > tol) return n;
  return 0;
}

FourierSeries ingest_newform(std::istream& in, int expected_level) {
  nlohmann::json rec;
  try {
    in >> rec;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(std::string("newform record is not valid JSON: ") + e.what());
  }
  if (!rec.is_object()) throw MalformedRecord("newform record is not a JSON object");
  for (const char* key : {"level", "label", "an"})
    if (!rec.contains(key)) throw MalformedRecord(std::string("newform record lacks \"") + key + "\"");
  if (!rec["level"].is_number_integer()) throw MalformedRecord("\"level\" is not an integer");
  if (!rec["label"].is_string()) throw MalformedRecord("\"label\" is not a string");
  if (!rec["an"].is_array() || rec["an"].empty()) throw MalformedRecord("\"an\" is missing or empty");

  FourierSeries f;
  f.level = rec["level"].get<int>();
  f.label = rec["label"].get<std::string>();
  f.source = CoefficientSource::Ingested;
  if (f.level != expected_level)
    throw LevelMismatch("newform " + f.label + " has level " + std::to_string(f.level) + ", expected " +
                        std::to_string(expected_level));
  f.an.reserve(rec["an"].size());
  for (const auto& c : rec["an"]) {
    if (c.is_number()) {
      f.an.emplace_back(c.get<double>(), 0.0);
    } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
      f.an.emplace_back(c[0].get<double>(), c[1].get<double>());
    } else {
      throw MalformedRecord("coefficient entry " + std::to_string(f.an.size() + 1) + " of " + f.label +
                            " is neither a number nor a [re, im] pair");
    }
  }
  if (rec.contains("fricke") && !rec["fricke"].is_null()) {
    const auto& e = rec["fricke"];
    if (e.is_number())
      f.fricke = std::complex<double>(e.get<double>(), 0.0);
    else if (e.is_array() && e.size() == 2)
      f.fricke = std::complex<double>(e[0].get<double>(), e[1].get<double>());
    else
      throw MalformedRecord("\"fricke\" is neither a number nor a [re, im] pair");
  }
  validate(f);
  return f;
}

FourierSeries load_newform_file(const std::string& path, int expected_level) {
  std::ifstream in(path);
  if (!in) throw MalformedRecord("cannot open newform file " + path);
  return ingest_newform(in, expected_level);
}

void write_newform(std::ostream& out, const FourierSeries& f) {
  nlohmann::json rec;
  rec["level"] = f.level;
  rec["label"] = f.label;
  nlohmann::json an = nlohmann::json::array();
  const bool integral = std::all_of(f.an.begin(), f.an.end(), [](auto z) {
    return z.imag() == 0.0 && std::nearbyint(z.real()) == z.real() && std::abs(z.real()) < 9e15;
  });
  for (auto z : f.an) {
    if (integral)
      an.push_back(static_cast<std::int64_t>(z.real()));
    else
      an.push_back({z.real(), z.imag()});
  }
  rec["an"] = std::move(an);
  if (f.fricke) rec["fricke"] = {f.fricke->real(), f.fricke->imag()};
  out << rec.dump() << '\n';
}

std::complex<double> petersson_estimate(const FourierSeries& f, const FourierSeries& g, std::size_t X) {
  if (f.level != g.level)
    throw LevelMismatch("petersson_estimate: levels " + std::to_string(f.level) + " and " + std::to_string(g.level));
  if (X < 100) throw std::invalid_argument("petersson_estimate: X must be >= 100");
  if (X > f.size() || X > g.size()) throw std::invalid_argument("petersson_estimate: X exceeds stored coefficients");
  std::complex<double> sum = 0.0;
  for (std::size_t n = 1; n <= X; ++n) sum += f(n) * std::conj(g(n));
  const double x = static_cast<double>(X);
  const double vol = volume(f.level);
  const double four_pi = 4.0 * std::numbers::pi;
  return (2.0 / (x * x)) * sum * (1.0 * vol / (four_pi * four_pi));
}

GramMatrix gram_estimate(std::span<const FourierSeries> forms, std::size_t X) {
  GramMatrix g(forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i)
    for (std::size_t j = 0; j < forms.size(); ++j) g(i, j) = petersson_estimate(forms[i], forms[j], X);
  return g;
}

std::string default_fixture_dir() {
  if (const char* env = std::getenv("NCMOD_FIXTURES"); env && *env) return env;
#ifdef NCMOD_FIXTURE_DIR
  return NCMOD_FIXTURE_DIR;
#else
  return "fixtures";
#endif
}

FourierSeries standard_form(int level, const std::string& label, std::size_t N, const std::string& fixture_dir) {
  if (N < 1) throw std::invalid_argument("standard_form: N must be >= 1");
  const std::string path = fixture_dir + "/level" + std::to_string(level) + "_" + label + ".json";
  std::optional<FourierSeries> fixture;
  if (std::ifstream probe(path); probe) fixture = ingest_newform(probe, level);

  std::optional<FourierSeries> computed;
  if (level == 11 && label == "11a") computed = eta_product_coefficients(eta_level11(), N);
  if (level == 37 && label == "37a") computed = curve_coefficients(curve_37a(), N);
  if (level == 37 && label == "37b") computed = curve_coefficients(curve_37b(), N);

  if (!computed) {
    if (!fixture) throw MalformedRecord("no coefficient source for form " + label + " at level " + std::to_string(level));
    FourierSeries f = *fixture;
    f.label = label;
    if (f.size() > N) f.an.resize(N);
    return f;
  }
  FourierSeries f = std::move(*computed);
  f.label = label;
  if (fixture) {
    if (const std::size_t n = first_mismatch(f, *fixture, std::min(N, fixture->size()))) {
      throw InvariantViolation("form " + label + ": computed a(" + std::to_string(n) + ") disagrees with fixture " + path);
    }
    f.fricke = fixture->fricke;
  }
  return f;
}

}  // namespace ncmod

