#include <doctest.h>

#include <cstdio>
#include <random>

#include "ncmod/iterint.hpp"

using namespace ncmod;

namespace {

const std::vector<FourierSeries>& forms37() {
  static const std::vector<FourierSeries> f{standard_form(37, "37a", 10000), standard_form(37, "37b", 10000)};
  return f;
}

const CoefficientTables& tables37() {
  static const CoefficientTables t(forms37(), 3, 10000);
  return t;
}

const FareySymbol& fs37() {
  static const FareySymbol fs = farey_symbol(37);
  return fs;
}

const GeneratorCache& cache37() {
  static const GeneratorCache c = GeneratorCache::build(fs37(), forms37(), EvalParams{2, 0, 1e-10});
  return c;
}

CuspFraction cusp(long a, long c) {
  long d = 1;
  while ((a * d) % c != 1 % c) ++d;
  return {a, c, d};
}

}  // namespace

TEST_SUITE("iterint") {
  TEST_CASE("series layout") {
    TruncatedJSeries A(2, 3);
    CHECK(A.size() == 1 + 2 + 4 + 8);
    for (std::size_t i = 0; i < A.size(); ++i) CHECK(A.index(A.word_at(i)) == i);
    CHECK(A.index(Word{}) == 0);
    CHECK_THROWS_AS(A.index(Word{0, 0, 0, 0}), std::out_of_range);
    CHECK_THROWS_AS(series_mul(A, TruncatedJSeries(2, 2)), ShapeMismatch);
  }

  TEST_CASE("length-1 coefficient at a point matches quadrature") {
    for (cplx z : {cplx(0.3, 0.05), cplx(-0.41, 0.02), cplx(0.0, 0.3)}) {
      const TruncatedJSeries J = j_to_point(tables37(), z, 1e-12);
      const TruncatedJSeries Q = quadrature_j_to_point(forms37(), z.real(), z.imag(), 2);
      for (const Word& w : {Word{0}, Word{1}, Word{0, 1}, Word{1, 1}}) {
        CAPTURE(w.str());
        CHECK(std::abs(J[w] - Q[w]) < 1e-9);
      }
    }
  }

  TEST_CASE("coefficients decay as Im z grows and are periodic in Re z") {
    const TruncatedJSeries J = j_to_point(tables37(), cplx(0.2, 6.0), 1e-14);
    for (std::size_t i = 1; i < J.size(); ++i) CHECK(std::abs(J.coeffs()[i]) < 1e-15);
    const TruncatedJSeries A = j_to_point(tables37(), RationalPoint{3, 37, 0.03}, 1e-12);
    const TruncatedJSeries B = j_to_point(tables37(), RationalPoint{40, 37, 0.03}, 1e-12);
    CHECK(max_abs_difference(A, B) < 1e-13);
  }

  TEST_CASE("differential equation d/dz I(x u) = f_x(z) I(u)") {
    const cplx z(0.17, 0.04);
    const double h = 1e-6;
    const TruncatedJSeries J = j_to_point(tables37(), z, 1e-14);
    const TruncatedJSeries Jp = j_to_point(tables37(), z + h, 1e-14), Jm = j_to_point(tables37(), z - h, 1e-14);
    for (std::size_t i = 1; i < J.size(); ++i) {
      const Word v = J.word_at(i);
      const cplx deriv = (Jp[v] - Jm[v]) / (2 * h);
      const cplx expect = evaluate_form(forms37()[v[0]], z) * J[v.suffix_from(1)];
      CAPTURE(v.str());
      CHECK(std::abs(deriv - expect) < 1e-6 * std::max(1.0, std::abs(expect)));
    }
  }

  TEST_CASE("product, inverse and the grouplike structure") {
    const TruncatedJSeries A = j_to_point(tables37(), cplx(0.1, 0.05), 1e-13);
    const TruncatedJSeries B = j_to_point(tables37(), cplx(-0.3, 0.07), 1e-13);
    const TruncatedJSeries C = j_to_point(tables37(), cplx(0.45, 0.03), 1e-13);
    const TruncatedJSeries U = TruncatedJSeries::unit(2, 3);
    CHECK(max_abs_difference(series_mul(A, U), A) == 0.0);
    CHECK(max_abs_difference(series_mul(U, A), A) == 0.0);
    CHECK(max_abs_difference(series_mul(series_mul(A, B), C), series_mul(A, series_mul(B, C))) < 1e-13);
    const TruncatedJSeries Ai = series_inv(A);
    CHECK(max_abs_difference(series_mul(A, Ai), U) < 1e-13);
    CHECK(max_abs_difference(series_mul(Ai, A), U) < 1e-13);
    CHECK(max_abs_difference(series_inv(U), U) == 0.0);
    CHECK(reversal_defect(A, Ai) < 1e-13);
    CHECK(grouplike_defect(A) < 1e-13);
    CHECK(grouplike_defect(series_mul(A, series_inv(B))) < 1e-12);
    CHECK(std::abs(A[Word{0}] * A[Word{1}] - A[Word{0, 1}] - A[Word{1, 0}]) < 1e-13);
    CHECK(max_abs_difference(series_pow(A, 3), series_mul(A, series_mul(A, A))) < 1e-13);
    CHECK(max_abs_difference(series_pow(A, -2), series_mul(Ai, Ai)) < 1e-13);
    CHECK(max_abs_difference(series_pow(A, 0), U) == 0.0);
  }

  TEST_CASE("cusp values: direct evaluation follows the explicit L <= 2 formulas") {
    for (const CuspFraction& r : {cusp(1, 37), cusp(5, 74), cusp(100, 333)}) {
      const TruncatedJSeries D = cusp_j_direct(r, tables37(), 1e-12);
      const TruncatedJSeries Z = j_to_point(tables37(), RationalPoint{r.a, r.c, 1.0 / r.c}, 1e-12);
      const TruncatedJSeries G = j_to_point(tables37(), RationalPoint{-r.d, r.c, 1.0 / r.c}, 1e-12);
      const Word a{0}, b{1}, ab{0, 1}, ba{1, 0};
      CHECK(std::abs(D[a] - (Z[a] - G[a])) < 1e-13);
      const cplx two = G[ba] - G[a] * Z[b] + Z[ab];
      CHECK(std::abs(D[ab] - two) < 1e-12);
      CHECK(grouplike_defect(D) < 1e-11);
    }
    const TruncatedJSeries T = cusp_j_direct(GroupElement::T(), tables37(), 1e-12);
    CHECK(max_abs_difference(T, TruncatedJSeries::unit(2, 3)) == 0.0);
  }

  TEST_CASE("direct evaluation matches nested quadrature") {
    const CoefficientTables t2(forms37(), 2, 10000);
    for (const CuspFraction& r : {cusp(1, 37), cusp(7, 111), cusp(30, 259)}) {
      const TruncatedJSeries D = cusp_j_direct(r, t2, 1e-12);
      const TruncatedJSeries Q = quadrature_cusp_j(forms37(), r, 2);
      CAPTURE(r.c);
      CHECK(max_abs_difference(D, Q) < 1e-7);
    }
  }

  TEST_CASE("truncation requirements") {
    CHECK_THROWS_AS(j_to_point(CoefficientTables(forms37(), 2, 50), cplx(0.1, 0.001), 1e-12), TruncationError);
    const std::size_t n = CoefficientTables::required_terms(2, 0.01, 1e-10);
    CHECK(CoefficientTables::tail_bound(2, n, 0.01) <= 1e-10);
    CHECK(CoefficientTables::tail_bound(2, n - 1, 0.01) > 1e-10);
    CHECK_THROWS_AS(GeneratorCache::build(fs37(), forms37(), EvalParams{2, 10, 1e-10}), TruncationError);
  }

  TEST_CASE("generator cache and word products") {
    const GeneratorCache& c = cache37();
    CHECK(c.size() == fs37().generators.size());
    const std::size_t N = c.key().N;
    const CoefficientTables t(forms37(), 2, std::max<std::size_t>(N, 6000));
    for (std::size_t g = 0; g < c.size(); ++g) {
      CHECK(grouplike_defect(c.forward(static_cast<int>(g))) < 1e-12);
      CHECK(reversal_defect(c.forward(static_cast<int>(g)), c.inverse(static_cast<int>(g))) < 1e-12);
    }
    CHECK(max_abs_difference(word_to_j(GeneratorWord{}, c), TruncatedJSeries::unit(2, 2)) == 0.0);
    CHECK(max_abs_difference(word_to_j(GeneratorWord{{{1, 1}}, 1}, c), c.forward(1)) == 0.0);
    // product of two generators against direct evaluation
    const GroupElement g12 = fs37().generators[1] * fs37().generators[2];
    const TruncatedJSeries W = word_to_j(GeneratorWord{{{1, 1}, {2, 1}}, 1}, c);
    CHECK(max_abs_difference(W, cusp_j_direct(g12, t, 1e-12)) < 1e-8);
    // random cusps through the full pipeline
    std::mt19937 rng(11);
    for (int k = 0; k < 20; ++k) {
      const long cc = 37 * (1 + static_cast<long>(rng() % 8));
      long a;
      do a = static_cast<long>(rng() % cc);
      while (std::gcd(a, cc) != 1);
      const CuspFraction r = cusp(a, cc);
      CAPTURE(r.a);
      CAPTURE(r.c);
      CHECK(max_abs_difference(cusp_j(r, fs37(), c), cusp_j_direct(r, t, 1e-12)) < 1e-8);
    }
    CHECK_THROWS_AS(c.forward(99), CacheMiss);
  }

  TEST_CASE("cache persistence") {
    const GeneratorCache& c = cache37();
    const std::string path = "iterint_cache_roundtrip.json";
    c.save(path);
    const GeneratorCache d = GeneratorCache::load(path, c.key());
    for (std::size_t g = 0; g < c.size(); ++g) CHECK(max_abs_difference(c.forward(static_cast<int>(g)), d.forward(static_cast<int>(g))) == 0.0);
    CacheKey other = c.key();
    other.L = 3;
    CHECK_THROWS_AS(GeneratorCache::load(path, other), std::runtime_error);
    std::remove(path.c_str());
  }

  TEST_CASE("batch evaluation is shard independent and satisfies the shuffle relation") {
    const auto cusps = enumerate_T(37, 400, Ordering::CLeM);
    const auto one = batch_series(cusps, fs37(), cache37(), 1);
    const auto three = batch_series(cusps, fs37(), cache37(), 3);
    REQUIRE(one.size() == cusps.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(max_abs_difference(one[i], three[i]) == 0.0);
      const auto& J = one[i];
      CHECK(std::abs(J[Word{0}] * J[Word{1}] - J[Word{0, 1}] - J[Word{1, 0}]) < 1e-10);
    }
  }
}
