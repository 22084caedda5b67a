#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ncmod/hecke.hpp"
#include "ncmod/modgroup.hpp"
#include "ncmod/shuffle.hpp"
#include "ncmod/special.hpp"

namespace ncmod {

// Truncation of J = sum_v I(v) X_v to words of length <= L over k letters.
// Coefficients are stored by length, each block in lexicographic order, with a
// per-coefficient error estimate carried alongside.
class TruncatedJSeries {
 public:
  TruncatedJSeries() = default;
  TruncatedJSeries(std::size_t alphabet, unsigned L);
  static TruncatedJSeries unit(std::size_t alphabet, unsigned L);

  std::size_t alphabet() const { return k_; }
  unsigned max_length() const { return L_; }
  std::size_t size() const { return c_.size(); }

  std::size_t index(const Word& w) const;
  Word word_at(std::size_t idx) const;
  cplx& operator[](const Word& w) { return c_[index(w)]; }
  const cplx& operator[](const Word& w) const { return c_[index(w)]; }
  double& error(const Word& w) { return e_[index(w)]; }
  double error(const Word& w) const { return e_[index(w)]; }

  std::vector<cplx>& coeffs() { return c_; }
  const std::vector<cplx>& coeffs() const { return c_; }
  std::vector<double>& errors() { return e_; }
  const std::vector<double>& errors() const { return e_; }
  double max_error() const;

  // offset of the block of words of length n
  std::size_t block(unsigned n) const { return offsets_[n]; }

 private:
  std::size_t k_ = 0;
  unsigned L_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<cplx> c_;
  std::vector<double> e_;
};

class ShapeMismatch : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// C[w] = sum_{w = w'w''} A[w'] B[w''], i.e. J_a^c = J_b^c * J_a^b.
TruncatedJSeries series_mul(const TruncatedJSeries& A, const TruncatedJSeries& B);
TruncatedJSeries series_inv(const TruncatedJSeries& A);
TruncatedJSeries series_pow(const TruncatedJSeries& A, long n);

// max |A[u] A[w] - sum_x c_{u⧢w}(x) A[x]| over l(u) + l(w) <= L, both nonempty
double grouplike_defect(const TruncatedJSeries& A);
// max |inv(A)[v] - (-1)^{l(v)} A[reverse v]|
double reversal_defect(const TruncatedJSeries& A, const TruncatedJSeries& Ainv);
double max_abs_difference(const TruncatedJSeries& A, const TruncatedJSeries& B);

struct EvalParams {
  unsigned L = 3;
  std::size_t N = 0;  // Fourier terms available; 0 = sized automatically
  double tol = 1e-10;
};

class TruncationError : public std::runtime_error {
 public:
  TruncationError(std::size_t required, std::size_t available);
  std::size_t required;
  std::size_t available;
};

// The coefficients c_v(m) with I_{i inf}^z(v) = sum_m c_v(m) e(m z):
//   c_x(m) = a_x(m) / (2 pi i m),
//   c_{xu}(m) = (1 / (2 pi i m)) sum_{m' < m} a_x(m - m') c_u(m').
class CoefficientTables {
 public:
  CoefficientTables(const std::vector<FourierSeries>& forms, unsigned L, std::size_t N);

  std::size_t alphabet() const { return k_; }
  unsigned max_length() const { return L_; }
  std::size_t terms() const { return N_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<cplx>& table(const Word& v) const;  // c_v(1..N) at [0..N-1]

  // Certified bound on sum_{m > n} |c_v(m)| e^{-2 pi m y} for l(v) = len,
  // from |a(n)| <= d(n) sqrt(n) <= 2n, which gives |c_v(m)| <= m^{l-1} / (pi^l (l-1)!).
  static double tail_bound(unsigned len, std::size_t n, double y);
  // Smallest n with tail_bound(len, n, y) <= tol for every len <= L.
  static std::size_t required_terms(unsigned L, double y, double tol);

 private:
  std::size_t k_ = 0;
  unsigned L_ = 0;
  std::size_t N_ = 0;
  std::vector<std::string> labels_;
  TruncatedJSeries layout_;
  std::vector<std::vector<cplx>> tables_;  // indexed like layout_
};

// z = num/den + i y, with the real part kept rational for exact phases.
struct RationalPoint {
  long num = 0;
  long den = 1;
  double y = 1.0;
};

TruncatedJSeries j_to_point(const CoefficientTables& t, const RationalPoint& z, double tol);
TruncatedJSeries j_to_point(const CoefficientTables& t, cplx z, double tol);

// J_{i inf}^{gamma inf} = inv(J_{i inf}^{gamma^{-1} z0}) * J_{i inf}^{z0}, z0 = a/c + i/c.
TruncatedJSeries cusp_j_direct(const GroupElement& gamma, const CoefficientTables& t, double tol);
TruncatedJSeries cusp_j_direct(const CuspFraction& r, const CoefficientTables& t, double tol);

struct CacheKey {
  long q = 0;
  std::vector<std::string> labels;
  unsigned L = 0;
  std::size_t N = 0;
  double tol = 0;

  bool operator==(const CacheKey&) const = default;
  std::string describe() const;
};

class CacheMiss : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-generator series J_{i inf}^{g inf} and their inverses, immutable once built.
class GeneratorCache {
 public:
  static constexpr int kFormatVersion = 1;

  // Every generator is evaluated to tol * 1e-6, floored at 1e-16, so that the
  // propagated error of words with a few thousand factors (cusps a/c with small a
  // wind around the cusp 0 once per multiple of q) stays within tol. The series
  // must pass the grouplike check.
  static GeneratorCache build(const FareySymbol& fs, const std::vector<FourierSeries>& forms, const EvalParams& p);
  // The key build() would produce, including the Fourier truncation it needs.
  static CacheKey planned_key(const FareySymbol& fs, const std::vector<FourierSeries>& forms, const EvalParams& p);
  static double generator_tol(double tol) { return std::max(tol * 1e-6, 1e-16); }

  const CacheKey& key() const { return key_; }
  std::size_t size() const { return fwd_.size(); }
  const TruncatedJSeries& forward(int g) const;
  const TruncatedJSeries& inverse(int g) const;

  void save(const std::string& path) const;
  static GeneratorCache load(const std::string& path, const CacheKey& expected);

 private:
  CacheKey key_;
  std::vector<TruncatedJSeries> fwd_, inv_;
};

// J(gamma) for gamma = g_1^{n_1} ... g_k^{n_k} is J(g_k)^{n_k} ... J(g_1)^{n_1},
// because J(gamma1 gamma2) = J(gamma2) J(gamma1) by Gamma0(q)-invariance of the forms.
TruncatedJSeries word_to_j(const GeneratorWord& w, const GeneratorCache& cache);

// cusp_to_matrix -> word_decompose -> word_to_j
TruncatedJSeries cusp_j(const CuspFraction& r, const FareySymbol& fs, const GeneratorCache& cache);

// Evaluate J at each cusp with `shards` worker threads; results[i] belongs to cusps[i].
// Throws if any coefficient's propagated error exceeds 10 tol, naming the cusp.
std::vector<TruncatedJSeries> batch_series(const std::vector<CuspFraction>& cusps, const FareySymbol& fs,
                                           const GeneratorCache& cache, unsigned shards);

// Oracle: J_{i inf}^{a/c} for L <= 2 by nested 20-point Gauss-Legendre panels of f(z) dz
// along the vertical paths i inf -> z0 and gamma^{-1} z0 -> i inf.
TruncatedJSeries quadrature_cusp_j(const std::vector<FourierSeries>& forms, const CuspFraction& r, unsigned L);
// Oracle for a single point: I_{i inf}^{x + i y} along the vertical line, L <= 2.
TruncatedJSeries quadrature_j_to_point(const std::vector<FourierSeries>& forms, double x, double y, unsigned L);

// f(z) = sum_{n <= N} a(n) e(n z)
cplx evaluate_form(const FourierSeries& f, cplx z);

}  // namespace ncmod
