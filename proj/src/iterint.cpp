#include "ncmod/iterint.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

namespace ncmod {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kTwoPiI(0.0, kTwoPi);

std::size_t ipow(std::size_t k, unsigned n) {
  std::size_t out = 1;
  for (unsigned i = 0; i < n; ++i) out *= k;
  return out;
}

void check_shape(const TruncatedJSeries& A, const TruncatedJSeries& B, const char* op) {
  if (A.alphabet() != B.alphabet() || A.max_length() != B.max_length())
    throw ShapeMismatch(std::string(op) + ": series shapes differ");
}

}  // namespace

TruncatedJSeries::TruncatedJSeries(std::size_t alphabet, unsigned L) : k_(alphabet), L_(L) {
  if (alphabet < 1) throw std::invalid_argument("TruncatedJSeries: empty alphabet");
  offsets_.resize(L + 2);
  offsets_[0] = 0;
  for (unsigned n = 0; n <= L; ++n) offsets_[n + 1] = offsets_[n] + ipow(k_, n);
  c_.assign(offsets_[L + 1], 0.0);
  e_.assign(offsets_[L + 1], 0.0);
}

TruncatedJSeries TruncatedJSeries::unit(std::size_t alphabet, unsigned L) {
  TruncatedJSeries out(alphabet, L);
  out.c_[0] = 1.0;
  return out;
}

std::size_t TruncatedJSeries::index(const Word& w) const {
  if (w.size() > L_) throw std::out_of_range("TruncatedJSeries: word '" + w.str() + "' longer than L");
  std::size_t r = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= k_) throw std::out_of_range("TruncatedJSeries: letter outside the alphabet in '" + w.str() + "'");
    r = r * k_ + w[i];
  }
  return offsets_[w.size()] + r;
}

Word TruncatedJSeries::word_at(std::size_t idx) const {
  unsigned n = 0;
  while (offsets_[n + 1] <= idx) ++n;
  std::size_t r = idx - offsets_[n];
  std::vector<int> letters(n);
  for (unsigned i = n; i-- > 0;) {
    letters[i] = static_cast<int>(r % k_);
    r /= k_;
  }
  return Word(letters);
}

double TruncatedJSeries::max_error() const { return e_.empty() ? 0.0 : *std::max_element(e_.begin(), e_.end()); }

TruncatedJSeries series_mul(const TruncatedJSeries& A, const TruncatedJSeries& B) {
  check_shape(A, B, "series_mul");
  const std::size_t k = A.alphabet();
  const unsigned L = A.max_length();
  TruncatedJSeries C(k, L);
  const auto &a = A.coeffs(), &b = B.coeffs();
  const auto &ea = A.errors(), &eb = B.errors();
  auto& c = C.coeffs();
  auto& ec = C.errors();
  for (unsigned n = 0; n <= L; ++n) {
    const std::size_t count = ipow(k, n);
    for (std::size_t r = 0; r < count; ++r) {
      cplx sum = 0.0;
      double err = 0.0;
      for (unsigned p = 0; p <= n; ++p) {
        const std::size_t tail = ipow(k, n - p);
        const std::size_t ia = A.block(p) + r / tail;
        const std::size_t ib = B.block(n - p) + r % tail;
        sum += a[ia] * b[ib];
        err += std::abs(a[ia]) * eb[ib] + ea[ia] * std::abs(b[ib]) + ea[ia] * eb[ib];
      }
      c[C.block(n) + r] = sum;
      ec[C.block(n) + r] = err;
    }
  }
  return C;
}

TruncatedJSeries series_inv(const TruncatedJSeries& A) {
  if (std::abs(A.coeffs()[0] - 1.0) > 1e-12) throw std::invalid_argument("series_inv: constant term is not 1");
  const std::size_t k = A.alphabet();
  const unsigned L = A.max_length();
  TruncatedJSeries B = TruncatedJSeries::unit(k, L);
  const auto& a = A.coeffs();
  const auto& ea = A.errors();
  auto& b = B.coeffs();
  auto& eb = B.errors();
  // (A B)[w] = 0 for w nonempty: B[w] = -sum_{w = w'w'', w' nonempty} A[w'] B[w'']
  for (unsigned n = 1; n <= L; ++n) {
    const std::size_t count = ipow(k, n);
    for (std::size_t r = 0; r < count; ++r) {
      cplx sum = 0.0;
      double err = 0.0;
      for (unsigned p = 1; p <= n; ++p) {
        const std::size_t tail = ipow(k, n - p);
        const std::size_t ia = A.block(p) + r / tail;
        const std::size_t ib = B.block(n - p) + r % tail;
        sum += a[ia] * b[ib];
        err += std::abs(a[ia]) * eb[ib] + ea[ia] * std::abs(b[ib]) + ea[ia] * eb[ib];
      }
      b[B.block(n) + r] = -sum;
      eb[B.block(n) + r] = err;
    }
  }
  return B;
}

TruncatedJSeries series_pow(const TruncatedJSeries& A, long n) {
  TruncatedJSeries base = n < 0 ? series_inv(A) : A;
  unsigned long e = n < 0 ? -static_cast<unsigned long>(n) : static_cast<unsigned long>(n);
  TruncatedJSeries out = TruncatedJSeries::unit(A.alphabet(), A.max_length());
  bool first = true;
  while (e) {
    if (e & 1) {
      out = first ? base : series_mul(out, base);
      first = false;
    }
    e >>= 1;
    if (e) base = series_mul(base, base);
  }
  return out;
}

double grouplike_defect(const TruncatedJSeries& A) {
  const unsigned L = A.max_length();
  double worst = 0.0;
  for (unsigned lu = 1; lu < L; ++lu)
    for (unsigned lw = 1; lu + lw <= L; ++lw)
      for (const Word& u : all_words(A.alphabet(), lu))
        for (const Word& w : all_words(A.alphabet(), lw)) {
          cplx rhs = 0.0;
          const NCPolynomial uw = shuffle(u, w);
          for (const auto& [x, c] : uw.terms()) rhs += c.get_d() * A[x];
          worst = std::max(worst, std::abs(A[u] * A[w] - rhs));
        }
  return worst;
}

double reversal_defect(const TruncatedJSeries& A, const TruncatedJSeries& Ainv) {
  check_shape(A, Ainv, "reversal_defect");
  double worst = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const Word v = A.word_at(i);
    const double sign = v.size() % 2 ? -1.0 : 1.0;
    worst = std::max(worst, std::abs(Ainv.coeffs()[i] - sign * A[v.reversed()]));
  }
  return worst;
}

double max_abs_difference(const TruncatedJSeries& A, const TruncatedJSeries& B) {
  check_shape(A, B, "max_abs_difference");
  double worst = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) worst = std::max(worst, std::abs(A.coeffs()[i] - B.coeffs()[i]));
  return worst;
}

TruncationError::TruncationError(std::size_t req, std::size_t avail)
    : std::runtime_error("Fourier truncation too short: " + std::to_string(req) + " terms required, " +
                         std::to_string(avail) + " available"),
      required(req),
      available(avail) {}

CoefficientTables::CoefficientTables(const std::vector<FourierSeries>& forms, unsigned L, std::size_t N)
    : k_(forms.size()), L_(L), N_(N) {
  if (forms.empty()) throw std::invalid_argument("CoefficientTables: no forms");
  if (L < 1) throw std::invalid_argument("CoefficientTables: L must be >= 1");
  for (const auto& f : forms) {
    if (f.size() < N) throw TruncationError(N, f.size());
    labels_.push_back(f.label);
  }
  layout_ = TruncatedJSeries(k_, L);
  tables_.resize(layout_.size());
  for (std::size_t x = 0; x < k_; ++x) {
    auto& t = tables_[layout_.block(1) + x];
    t.resize(N);
    for (std::size_t m = 1; m <= N; ++m) t[m - 1] = forms[x](m) / (kTwoPiI * static_cast<double>(m));
  }
  for (unsigned n = 2; n <= L; ++n) {
    const std::size_t count = ipow(k_, n);
    const std::size_t tail = ipow(k_, n - 1);
    for (std::size_t r = 0; r < count; ++r) {
      const std::size_t x = r / tail;
      const auto& cu = tables_[layout_.block(n - 1) + r % tail];
      const auto& a = forms[x].an;
      auto& t = tables_[layout_.block(n) + r];
      t.assign(N, 0.0);
      for (std::size_t m = 2; m <= N; ++m) {
        cplx s = 0.0;
        for (std::size_t mp = 1; mp < m; ++mp) s += a[m - mp - 1] * cu[mp - 1];
        t[m - 1] = s / (kTwoPiI * static_cast<double>(m));
      }
    }
  }
}

const std::vector<cplx>& CoefficientTables::table(const Word& v) const {
  if (v.empty()) throw std::invalid_argument("CoefficientTables: the empty word has no table");
  return tables_[layout_.index(v)];
}

double CoefficientTables::tail_bound(unsigned len, std::size_t n, double y) {
  // sum_{m > n} m^p e^{-beta m} <= int_n^inf t^p e^{-beta t} dt once n >= p / beta, p = len - 1;
  // = p! e^{-beta n} sum_{j <= p} (beta n)^j / j! / beta^{p+1}.
  const double beta = kTwoPi * y;
  const unsigned p = len - 1;
  if (static_cast<double>(n) < p / beta) return std::numeric_limits<double>::infinity();
  const double x = beta * static_cast<double>(n);
  double term = 1.0, sum = 1.0;
  for (unsigned j = 1; j <= p; ++j) {
    term *= x / j;
    sum += term;
  }
  return std::exp(-x) * sum / std::pow(beta * kPi, static_cast<double>(len));
}

std::size_t CoefficientTables::required_terms(unsigned L, double y, double tol) {
  if (!(y > 0)) throw std::invalid_argument("required_terms: Im z must be positive");
  auto ok = [&](std::size_t n) {
    for (unsigned len = 1; len <= L; ++len)
      if (tail_bound(len, n, y) > tol) return false;
    return true;
  };
  std::size_t hi = 1;
  while (!ok(hi)) {
    hi *= 2;
    if (hi > (std::size_t{1} << 40)) throw std::invalid_argument("required_terms: tolerance unreachable");
  }
  std::size_t lo = hi / 2;
  while (lo + 1 < hi) {
    const std::size_t mid = (lo + hi) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

namespace {

TruncatedJSeries sum_tables(const CoefficientTables& t, const std::vector<cplx>& qpow, double y) {
  const std::size_t N = qpow.size();
  TruncatedJSeries out = TruncatedJSeries::unit(t.alphabet(), t.max_length());
  for (std::size_t i = 1; i < out.size(); ++i) {
    const Word v = out.word_at(i);
    const auto& c = t.table(v);
    cplx s = 0.0;
    for (std::size_t m = 0; m < N; ++m) s += c[m] * qpow[m];
    out.coeffs()[i] = s;
    out.errors()[i] = CoefficientTables::tail_bound(static_cast<unsigned>(v.size()), N, y) + 1e-16 * std::abs(s);
  }
  return out;
}

}  // namespace

TruncatedJSeries j_to_point(const CoefficientTables& t, const RationalPoint& z, double tol) {
  if (z.den < 1) throw std::invalid_argument("j_to_point: denominator must be positive");
  const std::size_t N = CoefficientTables::required_terms(t.max_length(), z.y, tol);
  if (N > t.terms()) throw TruncationError(N, t.terms());
  std::vector<cplx> qpow(N);
  long r = 0;
  const long num = ((z.num % z.den) + z.den) % z.den;
  for (std::size_t m = 1; m <= N; ++m) {
    r = (r + num) % z.den;  // m * num mod den
    const double phase = kTwoPi * static_cast<double>(r) / static_cast<double>(z.den);
    qpow[m - 1] = std::polar(std::exp(-kTwoPi * static_cast<double>(m) * z.y), phase);
  }
  return sum_tables(t, qpow, z.y);
}

TruncatedJSeries j_to_point(const CoefficientTables& t, cplx z, double tol) {
  if (!(z.imag() > 0)) throw std::invalid_argument("j_to_point: point not in the upper half-plane");
  const std::size_t N = CoefficientTables::required_terms(t.max_length(), z.imag(), tol);
  if (N > t.terms()) throw TruncationError(N, t.terms());
  std::vector<cplx> qpow(N);
  const double x = z.real() - std::floor(z.real());
  for (std::size_t m = 1; m <= N; ++m) {
    const double mx = static_cast<double>(m) * x;
    qpow[m - 1] = std::polar(std::exp(-kTwoPi * static_cast<double>(m) * z.imag()), kTwoPi * (mx - std::floor(mx)));
  }
  return sum_tables(t, qpow, z.imag());
}

TruncatedJSeries cusp_j_direct(const GroupElement& gamma, const CoefficientTables& t, double tol) {
  if (gamma.det() != 1) throw std::invalid_argument("cusp_j_direct: determinant != 1");
  GroupElement g = gamma.c < 0 ? -gamma : gamma;
  if (g.c == 0) return TruncatedJSeries::unit(t.alphabet(), t.max_length());
  if (!g.a.fits_slong_p() || !g.c.fits_slong_p() || !g.d.fits_slong_p())
    throw std::invalid_argument("cusp_j_direct: entries exceed 64 bits");
  const long a = g.a.get_si(), c = g.c.get_si(), d = g.d.get_si();
  const double y = 1.0 / static_cast<double>(c);
  const TruncatedJSeries Jz0 = j_to_point(t, RationalPoint{a, c, y}, tol);
  const TruncatedJSeries Jw0 = j_to_point(t, RationalPoint{-d, c, y}, tol);  // gamma^{-1} z0 = -d/c + i/c
  return series_mul(series_inv(Jw0), Jz0);
}

TruncatedJSeries cusp_j_direct(const CuspFraction& r, const CoefficientTables& t, double tol) {
  return cusp_j_direct(cusp_to_matrix(r), t, tol);
}

std::string CacheKey::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "q=" << q << ";forms=";
  for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? "," : "") << labels[i];
  os << ";L=" << L << ";N=" << N << ";tol=" << tol;
  return os.str();
}

CacheKey GeneratorCache::planned_key(const FareySymbol& fs, const std::vector<FourierSeries>& forms,
                                     const EvalParams& p) {
  if (p.L < 1 || !(p.tol > 0)) throw std::invalid_argument("GeneratorCache: need L >= 1 and tol > 0");
  if (forms.empty()) throw std::invalid_argument("GeneratorCache: no forms");
  CacheKey key{fs.q, {}, p.L, 0, p.tol};
  for (const auto& f : forms) {
    if (f.level != fs.q) throw LevelMismatch("GeneratorCache: form " + f.label + " is not of level " + std::to_string(fs.q));
    key.labels.push_back(f.label);
  }
  mpz_class cmax = 1;
  for (const auto& g : fs.generators) cmax = std::max(cmax, mpz_class(abs(g.c)));
  const std::size_t need = CoefficientTables::required_terms(p.L, 1.0 / cmax.get_d(), generator_tol(p.tol));
  if (p.N != 0 && p.N < need) throw TruncationError(need, p.N);
  key.N = p.N != 0 ? p.N : need;
  return key;
}

GeneratorCache GeneratorCache::build(const FareySymbol& fs, const std::vector<FourierSeries>& forms, const EvalParams& p) {
  const CacheKey key = planned_key(fs, forms, p);
  const double gtol = generator_tol(p.tol);
  const CoefficientTables tables(forms, p.L, key.N);

  GeneratorCache cache;
  cache.key_ = key;
  for (std::size_t g = 0; g < fs.generators.size(); ++g) {
    TruncatedJSeries J = cusp_j_direct(fs.generators[g], tables, gtol);
    double scale = 1.0;
    for (const auto& c : J.coeffs()) scale = std::max(scale, std::abs(c));
    const double defect = grouplike_defect(J);
    if (defect > 1e3 * gtol * scale * scale)
      throw std::runtime_error("GeneratorCache: generator " + fs.generator_names[g] + " fails the grouplike check (" +
                               std::to_string(defect) + ")");
    cache.inv_.push_back(series_inv(J));
    cache.fwd_.push_back(std::move(J));
  }
  return cache;
}

const TruncatedJSeries& GeneratorCache::forward(int g) const {
  if (g < 0 || static_cast<std::size_t>(g) >= fwd_.size())
    throw CacheMiss("GeneratorCache: no entry for generator " + std::to_string(g));
  return fwd_[g];
}

const TruncatedJSeries& GeneratorCache::inverse(int g) const {
  if (g < 0 || static_cast<std::size_t>(g) >= inv_.size())
    throw CacheMiss("GeneratorCache: no entry for generator " + std::to_string(g));
  return inv_[g];
}

TruncatedJSeries word_to_j(const GeneratorWord& w, const GeneratorCache& cache) {
  if (cache.size() == 0) throw CacheMiss("word_to_j: empty generator cache");
  const auto& shape = cache.forward(0);
  TruncatedJSeries J = TruncatedJSeries::unit(shape.alphabet(), shape.max_length());
  for (auto [g, n] : w.factors) {
    const TruncatedJSeries& base = n < 0 ? cache.inverse(g) : cache.forward(g);
    J = series_mul(series_pow(base, std::labs(n)), J);
  }
  return J;
}

TruncatedJSeries cusp_j(const CuspFraction& r, const FareySymbol& fs, const GeneratorCache& cache) {
  return word_to_j(word_decompose(cusp_to_matrix(r), fs), cache);
}

std::vector<TruncatedJSeries> batch_series(const std::vector<CuspFraction>& cusps, const FareySymbol& fs,
                                           const GeneratorCache& cache, unsigned shards) {
  if (cache.key().q != fs.q) throw std::invalid_argument("batch_series: cache level differs from the Farey symbol");
  std::vector<TruncatedJSeries> out(cusps.size());
  shards = std::max(1u, std::min<unsigned>(shards, static_cast<unsigned>(std::max<std::size_t>(1, cusps.size()))));
  std::vector<std::exception_ptr> failures(shards);
  const double limit = 10.0 * cache.key().tol;
  auto work = [&](unsigned s) {
    const std::size_t lo = cusps.size() * s / shards, hi = cusps.size() * (s + 1) / shards;
    try {
      for (std::size_t i = lo; i < hi; ++i) {
        const auto& r = cusps[i];
        try {
          out[i] = cusp_j(r, fs, cache);
        } catch (const std::exception& e) {
          throw std::runtime_error("cusp " + std::to_string(r.a) + "/" + std::to_string(r.c) + ": " + e.what());
        }
        if (out[i].max_error() > limit)
          throw std::runtime_error("cusp " + std::to_string(r.a) + "/" + std::to_string(r.c) +
                                   ": propagated error " + std::to_string(out[i].max_error()) + " exceeds 10 tol");
      }
    } catch (...) {
      failures[s] = std::current_exception();
    }
  };
  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned s = 0; s < shards; ++s) pool.emplace_back(work, s);
    for (auto& th : pool) th.join();
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

cplx evaluate_form(const FourierSeries& f, cplx z) {
  const cplx q = std::exp(kTwoPiI * z);
  const double aq = std::abs(q);
  cplx qn = 1.0, sum = 0.0;
  for (std::size_t n = 1; n <= f.size(); ++n) {
    if (n % 64 == 1) qn = std::exp(kTwoPiI * static_cast<double>(n) * z);
    else qn *= q;
    sum += f(n) * qn;
    if (std::pow(aq, static_cast<double>(n)) * static_cast<double>(2 * n) < 1e-20 * (std::abs(sum) + 1e-300)) break;
  }
  return sum;
}

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

// Panels [y, ..., y + 8] growing geometrically; e^{-2 pi 8} is below double precision.
std::vector<double> panel_edges(double y) {
  std::vector<double> edges{y};
  while (edges.back() < y + 8.0) edges.push_back(edges.back() + std::max(0.5 * edges.back(), 1e-9));
  return edges;
}

// I_{i inf}^{x + i y}(v) for all words with l(v) <= L <= 2, integrating along Re z = x.
// With F_v(t) = I_{i inf}^{x+it}(v): F_x(t) = -i int_t^inf f_x, F_{xu}(t) = -i int_t^inf f_x F_u.
TruncatedJSeries vertical_leg(const std::vector<FourierSeries>& forms, double x, double y, unsigned L) {
  if (L > 2) throw std::invalid_argument("quadrature oracle supports L <= 2");
  const std::size_t k = forms.size();
  const cplx I(0.0, 1.0);
  TruncatedJSeries out = TruncatedJSeries::unit(k, L);
  const auto edges = panel_edges(y);
  auto f = [&](std::size_t j, double t) { return evaluate_form(forms[j], cplx(x, t)); };

  // Running F_u at the upper edge of the current panel, walking downwards.
  std::vector<cplx> F1(k, 0.0);
  std::vector<cplx> F2(k * k, 0.0);
  for (std::size_t p = edges.size() - 1; p-- > 0;) {
    const double lo = edges[p], hi = edges[p + 1];
    for (std::size_t u = 0; u < k; ++u) {
      if (L >= 2)
        for (std::size_t xl = 0; xl < k; ++xl) {
          auto integrand = [&](double t) {
            const cplx inner = F1[u] - I * Gauss::integrate([&](double s) { return f(u, s); }, t, hi);
            return f(xl, t) * inner;
          };
          F2[xl * k + u] += -I * Gauss::integrate(integrand, lo, hi);
        }
    }
    for (std::size_t u = 0; u < k; ++u) F1[u] += -I * Gauss::integrate([&](double s) { return f(u, s); }, lo, hi);
  }
  for (std::size_t u = 0; u < k; ++u) out[Word{static_cast<Letter>(u)}] = F1[u];
  if (L >= 2)
    for (std::size_t xl = 0; xl < k; ++xl)
      for (std::size_t u = 0; u < k; ++u) out[Word{static_cast<Letter>(xl), static_cast<Letter>(u)}] = F2[xl * k + u];
  return out;
}

}  // namespace

TruncatedJSeries quadrature_j_to_point(const std::vector<FourierSeries>& forms, double x, double y, unsigned L) {
  return vertical_leg(forms, x, y, L);
}

TruncatedJSeries quadrature_cusp_j(const std::vector<FourierSeries>& forms, const CuspFraction& r, unsigned L) {
  const double c = static_cast<double>(r.c);
  const TruncatedJSeries up = vertical_leg(forms, static_cast<double>(r.a) / c, 1.0 / c, L);
  const TruncatedJSeries down = vertical_leg(forms, -static_cast<double>(r.d) / c, 1.0 / c, L);
  return series_mul(series_inv(down), up);
}

}  // namespace ncmod
