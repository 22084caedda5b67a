#include <doctest.h>

#include <numbers>

#include "ncmod/lseries.hpp"

using namespace ncmod;

namespace {

const FourierSeries& f37a() {
  static const FourierSeries f = standard_form(37, "37a", 60000);
  return f;
}
const FourierSeries& f37b() {
  static const FourierSeries f = standard_form(37, "37b", 60000);
  return f;
}

CuspFraction cusp(long a, long c) {
  long d = 1;
  while ((a * d) % c != 1 % c) ++d;
  return {a, c, d};
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_SUITE("lseries") {
  TEST_CASE("cusp validity and convergence region") {
    CHECK_THROWS_AS(check_cusp(CuspFraction{0, 1, 1}, 37), CuspValidityError);
    CHECK_THROWS_AS(check_cusp(CuspFraction{2, 74, 1}, 37), CuspValidityError);
    CHECK_THROWS_AS(check_cusp(CuspFraction{5, 74, 16}, 37), CuspValidityError);
    CHECK_NOTHROW(check_cusp(cusp(5, 74), 37));
    CHECK_THROWS_AS(multiple_L_partial({f37a()}, CuspFraction{0, 1, 1}, 3.0, 100), CuspValidityError);
    CHECK_THROWS_AS(multiple_L_partial({f37a()}, cusp(5, 74), 1.4, 100), ConvergenceRegionError);
    CHECK_THROWS_AS(multiple_L_partial({f37a(), f37b()}, cusp(5, 74), 1.9, 100), ConvergenceRegionError);
    const CuspFraction p = partner_cusp(cusp(5, 74));
    CHECK(p.c == 74);
    CHECK(p.a == (74 - cusp(5, 74).d) % 74);
    CHECK_NOTHROW(check_cusp(p, 37));
  }

  TEST_CASE("length-2 partial sum equals the re-indexed double sum") {
    const CuspFraction r = cusp(5, 74);
    const std::size_t N = 400;
    const PartialSum ps = multiple_L_partial({f37a(), f37b()}, r, 3.0, N);
    cplx direct = 0;
    for (std::size_t n1 = 1; n1 < N; ++n1)
      for (std::size_t n2 = 1; n1 + n2 <= N; ++n2) {
        const double m = static_cast<double>(n1 + n2);
        const double ph = 2 * std::numbers::pi * static_cast<double>(((n1 + n2) * r.a) % r.c) / r.c;
        direct += f37a()(n1) * f37b()(n2) * std::polar(1.0, ph) / (m * m * m * static_cast<double>(n2));
      }
    CHECK(std::abs(ps.value - direct) < 1e-13);
    CHECK(ps.terms == N);
  }

  TEST_CASE("continuation agrees with partial sums and with central values") {
    for (const CuspFraction& r : {cusp(5, 74), cusp(1, 37), cusp(50, 111)}) {
      CAPTURE(r.c);
      const PartialSum ps = multiple_L_partial({f37a()}, r, 3.0, 60000);
      CHECK(rel(twisted_L_continued(f37a(), r, 3.0), ps.value) < 1e-6);
      const PartialSum ps2 = multiple_L_partial({f37a(), f37b()}, r, 4.0, 20000);
      CHECK(rel(twisted_L2_continued(f37a(), f37b(), r, 4.0), ps2.value) < 1e-6);
      CHECK(rel(twisted_L_continued(f37a(), r, 1.0), central_value({f37a()}, r)) < 1e-8);
      CHECK(rel(twisted_L2_continued(f37a(), f37b(), r, 1.0), central_value({f37a(), f37b()}, r)) < 1e-8);
    }
  }

  TEST_CASE("twisted functional equations and split independence") {
    for (const CuspFraction& r : {cusp(5, 74), cusp(17, 111), cusp(200, 259)}) {
      const CuspFraction pr = partner_cusp(r);
      // at the centre: L(f, a/c, 1) = -L(f, -d/c, 1)
      CHECK(rel(central_value({f37a()}, r), -central_value({f37a()}, pr)) < 1e-9);
      for (cplx s : {cplx(0.7), cplx(1.0), cplx(1.3), cplx(1, 2)}) {
        CAPTURE(s);
        const double scale = std::max(1.0, std::abs(completed_twisted_L(f37b(), r, s).value));
        CHECK(std::abs(twisted_fe_residual(f37b(), r, s)) < 1e-10 * scale);
        const cplx i1 = twisted_integral(f37b(), r, s, {1.0, 1e-13}), i2 = twisted_integral(f37b(), r, s, {2.0, 1e-13});
        CHECK(std::abs(i1 - i2) < 1e-10 * std::max(1.0, std::abs(i1)));
        const double scale2 = std::max(1.0, std::abs(completed_twisted_L2(f37a(), f37b(), r, s).value));
        CHECK(std::abs(twisted_fe_residual2(f37a(), f37b(), r, s)) < 1e-9 * scale2);
      }
      const CompletedLValue v = completed_twisted_L(f37a(), r, 1.3);
      CHECK(v.scale == doctest::Approx(static_cast<double>(r.c)));
      CHECK(std::abs(v.gamma - gamma_complex(1.3)) < 1e-14);
    }
  }

  TEST_CASE("untwisted functional equations and Fricke eigenvalues") {
    const FourierSeries f11 = standard_form(11, "11a", 10000);
    CHECK(std::abs(fit_fricke(f11) - (-1.0)) < 1e-6);
    CHECK(std::abs(fit_fricke(f37a()) - 1.0) < 1e-6);
    CHECK(std::abs(fit_fricke(f37b()) - (-1.0)) < 1e-6);
    for (const char* l : {"41a.1", "41a.2", "41a.3"}) {
      const FourierSeries f = standard_form(41, l, 10000);
      CHECK(std::abs(fit_fricke(f) - *f.fricke) < 1e-6);
    }
    CHECK(conjugate_form(f37a()).an == f37a().an);
    const FEReport rep = untwisted_FE_check(f37a(), f37b(), {cplx(0.7), cplx(1.0), cplx(1.3), cplx(1, 2)});
    CHECK_FALSE(rep.eps1_fitted);
    CHECK(rep.eps_unit_defect < 1e-6);
    CHECK(rep.max_residual() < 1e-8);
    // L(37a, 1) = 0 (odd functional equation), L(37b, 1) != 0
    CHECK(std::abs(untwisted_lambda(f37a(), 1.0, 1.0)) < 1e-12);
    CHECK(std::abs(untwisted_lambda(f37b(), -1.0, 1.0)) > 1e-3);
  }
}
