#pragma once

#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ncmod/gram.hpp"

namespace ncmod {

enum class CoefficientSource { EtaProduct, EllipticCurve, Ingested };

const char* to_string(CoefficientSource s);

// Fourier coefficients a(1..N) of a weight-2 newform on Gamma0(level).
// Integer-valued coefficients are stored exactly in the real part.
struct FourierSeries {
  int level = 0;
  std::string label;
  std::vector<std::complex<double>> an;  // an[n-1] = a(n)
  CoefficientSource source = CoefficientSource::Ingested;
  std::optional<std::complex<double>> fricke;  // eigenvalue eps with W f = eps * conj-coefficient form

  std::size_t size() const { return an.size(); }
  std::complex<double> operator()(std::size_t n) const { return an.at(n - 1); }
  bool is_real(double tol = 0.0) const;
};

struct EllipticCurveModel {
  std::int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
  int conductor = 0;
  std::string label;

  // Weierstrass discriminant; zero means singular.
  std::int64_t discriminant() const;
};

// Curves bundled with the library.
EllipticCurveModel curve_11a();
EllipticCurveModel curve_37a();
EllipticCurveModel curve_37b();

// q^shift * prod (1 - q^{d n})^{r_d}; all exponents positive.
struct EtaProduct {
  int level = 0;
  std::string label;
  std::vector<std::pair<int, int>> factors;  // (d, r_d)
};

// eta(z)^2 eta(11z)^2
EtaProduct eta_level11();

class MalformedRecord : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class LevelMismatch : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class InvariantViolation : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class MissingPrime : public std::runtime_error {
 public:
  explicit MissingPrime(long p);
  long prime;
};

FourierSeries eta_product_coefficients(const EtaProduct& spec, std::size_t N);

struct LocalData {
  long ap = 0;
  bool bad_prime = false;
};

// a_p = p + 1 - #E(F_p), projective points counted exhaustively. At a bad
// prime the count over the singular cubic already yields the reduction-type
// value (1 split, -1 non-split, 0 additive); it is flagged and range-checked.
LocalData curve_ap(const EllipticCurveModel& curve, long p);

// Fill a(1..N) from a(p): Hecke recursion at p not dividing q, a(p^k)=a(p)^k at p | q.
FourierSeries hecke_extend(const std::map<long, long>& ap, int level, std::size_t N);

FourierSeries curve_coefficients(const EllipticCurveModel& curve, std::size_t N);

// JSON record {"level", "label", "an", "fricke"?}; every invariant is re-checked.
FourierSeries ingest_newform(std::istream& in, int expected_level);
FourierSeries load_newform_file(const std::string& path, int expected_level);
void write_newform(std::ostream& out, const FourierSeries& f);

// Throws InvariantViolation naming the first failing index.
void validate(const FourierSeries& f, double tol = 1e-9);

// Exhaustive coefficient comparison up to min(N, sizes); returns first mismatching n or 0.
std::size_t first_mismatch(const FourierSeries& a, const FourierSeries& b, std::size_t N, double tol = 0.0);

// Rankin-Selberg partial-sum estimate of <y f, y g>:
//   (2/X^2) * sum_{n<=X} a_f(n) conj(a_g(n)) * Gamma(2) vol(Gamma0(q)\H) / (4 pi)^2.
// Converges slowly (relative error ~ X^{-2/5}); intended for sanity checks.
std::complex<double> petersson_estimate(const FourierSeries& f, const FourierSeries& g, std::size_t X);

GramMatrix gram_estimate(std::span<const FourierSeries> forms, std::size_t X);

// Fixture directory: $NCMOD_FIXTURES if set, else the build-time default.
std::string default_fixture_dir();

// Form by label: 11a from the eta product, 37a and 37b by point counting, any
// other label from <fixture_dir>/level<q>_<label>.json. When that fixture exists
// its Fricke eigenvalue is attached, and for computed forms its coefficients
// must agree with the computed ones.
FourierSeries standard_form(int level, const std::string& label, std::size_t N,
                            const std::string& fixture_dir = default_fixture_dir());

// Small arithmetic helpers shared across modules.
std::vector<int> smallest_prime_factors(std::size_t N);
std::vector<long> primes_up_to(long N);
long divisor_count(long n);
bool is_prime(long n);

}  // namespace ncmod
