#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "ncmod/stats.hpp"

using namespace ncmod;

namespace {

SampleSet toy_set(const std::vector<cplx>& values, long c = 74) {
  SampleSet s;
  s.config.q = 37;
  s.config.labels = {"37a"};
  s.config.words = {Word{0}};
  s.config.M = 100;
  s.config.L = 1;
  for (std::size_t i = 0; i < values.size(); ++i) s.samples.push_back({static_cast<long>(2 * i + 1), c, {values[i]}});
  return s;
}

std::vector<cplx> complex_normal(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  std::vector<cplx> z(n);
  for (auto& x : z) x = cplx(g(rng), g(rng));
  return z;
}

template <class F>
double radial_integral(F f, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-13) + gauss_kronrod<double, 61>::integrate(f, 1.0, hi, 15, 1e-13);
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("normalizations") {
    // C_q / log c = vol / (8 log c) = vol / (4 log c^2)
    for (long c : {37L, 74L, 3700L}) {
      const double lc = std::log(static_cast<double>(c));
      CHECK(std::abs(c_constant(37) / lc - volume(37) / (4 * std::log(static_cast<double>(c) * c))) < 1e-15);
      for (unsigned l = 1; l <= 3; ++l) {
        const cplx y = normalization_factor(37, c, l, Normalization::Y_M);
        const cplx z = normalization_factor(37, c, l, Normalization::Z_M);
        CHECK(std::abs(z / y - std::pow(cplx(0, 2 * std::numbers::pi), static_cast<int>(l))) < 1e-12 * std::pow(2 * std::numbers::pi, l));
      }
    }
    const SampleSet s = toy_set({0.0, cplx(1, 2), cplx(-3, 0.5)});
    const SampleSet n = normalize(s, Normalization::Y_M);
    CHECK(n.samples[0].values[0] == cplx(0.0));
    SampleSet doubled = s;
    for (auto& x : doubled.samples) x.values[0] *= 2.0;
    const SampleSet nd = normalize(doubled, Normalization::Y_M);
    for (std::size_t i = 0; i < s.samples.size(); ++i) CHECK(std::abs(nd.samples[i].values[0] - 2.0 * n.samples[i].values[0]) < 1e-15);
    CHECK_THROWS_AS(normalize(toy_set({1.0}, 1), Normalization::Z_M), std::invalid_argument);
  }

  TEST_CASE("empirical moments") {
    const auto z = complex_normal(20000, 5);
    const MomentTable t = empirical_moments(z, 4);
    CHECK(t.at(0, 0) == cplx(1.0));
    // rotation by e^{i theta} multiplies m[n1][n2] by e^{i (n1 - n2) theta}
    const double th = 0.7;
    std::vector<cplx> zr;
    for (const auto& x : z) zr.push_back(x * std::polar(1.0, th));
    const MomentTable tr = empirical_moments(zr, 4);
    for (unsigned a = 0; a <= 4; ++a)
      for (unsigned b = 0; b <= 4; ++b)
        CHECK(std::abs(tr.at(a, b) - t.at(a, b) * std::polar(1.0, (static_cast<double>(a) - b) * th)) <
              1e-12 * std::max(1.0, std::abs(t.at(a, b))));
    // standard complex normal: m_nn = n!
    CHECK(t.at(1, 1).real() == doctest::Approx(1.0).epsilon(0.03));
    CHECK(t.at(2, 2).real() == doctest::Approx(2.0).epsilon(0.08));
    CHECK(std::abs(t.at(1, 0)) < 0.03);
    CHECK_THROWS_AS(empirical_moments({}, 2), std::invalid_argument);
  }

  TEST_CASE("predicted moments and scale-free ratios") {
    const auto r1 = scale_free_ratios(predicted_moments(Word{0}, GramMatrix::identity(1), 3));
    CHECK(r1[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r1[1] == doctest::Approx(6.0).epsilon(1e-14));
    const auto r2 = scale_free_ratios(predicted_moments(Word{0, 0}, GramMatrix::identity(1), 2));
    CHECK(r2[0] == doctest::Approx(6.0).epsilon(1e-14));
    const auto r3 = scale_free_ratios(predicted_moments(Word{0, 1}, GramMatrix::identity(2), 2));
    CHECK(r3[0] == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
    const MomentTable p = predicted_moments(Word{0, 1}, GramMatrix::identity(2), 3);
    for (unsigned a = 0; a <= 3; ++a)
      for (unsigned b = 0; b <= 3; ++b)
        if (a != b) CHECK(p.at(a, b) == cplx(0.0));
    // ratios are invariant under rescaling the samples
    const auto z = complex_normal(5000, 9);
    std::vector<cplx> zs;
    for (const auto& x : z) zs.push_back(3.5 * x);
    const auto a = scale_free_ratios(empirical_moments(z, 3)), b = scale_free_ratios(empirical_moments(zs, 3));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }

  TEST_CASE("Kotz-like distributions") {
    for (double r : {0.1, 0.5, 1.3}) {
      CHECK(kotz_density(1, r) == doctest::Approx(std::exp(-r * r) / std::numbers::pi).epsilon(1e-14));
      CHECK(kotz_density(2, cplx(0, r)) == doctest::Approx(std::exp(-2 * r) / (std::numbers::pi * r)).epsilon(1e-14));
    }
    for (unsigned l = 1; l <= 3; ++l) {
      // r = t^l removes the r^(2/l - 1) singularity at the origin
      const double mass = 2 * std::numbers::pi * radial_integral([l](double t) {
        const double r = std::pow(t, l);
        return t > 0 ? r * kotz_density(l, r) * l * std::pow(t, l - 1.0) : 0.0;
      }, std::pow(200.0, 1.0 / l));
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
    for (unsigned n = 0; n <= 8; ++n) CHECK(kotz_moment(1, n, n) == mpq_class(factorial(n)));
    CHECK(kotz_moment(2, 2, 1) == 0);
    // the l = 2 Kotz moments are the repeated-form limit moments (2n)! / 4^n
    for (unsigned n = 1; n <= 6; ++n) CHECK(kotz_moment(2, n, n) == moment_m_exact(Word{0, 0}, n, n, Gram<mpq_class>::identity(1)));
    CHECK_THROWS_AS(kotz_density(0, 1.0), std::invalid_argument);
  }

  TEST_CASE("Carleman partial sums") {
    std::vector<double> fact{1.0};
    for (unsigned k = 1; k <= 50; ++k) fact.push_back(fact.back() * k);
    CHECK(carleman_partial(fact, 1) == doctest::Approx(1.0));
    // n! moments: increments ~ sqrt(e / k), no plateau
    const double s25 = carleman_partial(fact, 25), s50 = carleman_partial(fact, 50);
    CHECK(s50 - s25 > 2.0);
    CHECK(std::abs(kotz_carleman_partial(1, 50) - s50) < 1e-9 * s50);
    // l = 3: increments ~ k^{-3/2}, the series converges
    const double k100 = kotz_carleman_partial(3, 100), k1000 = kotz_carleman_partial(3, 1000), k10000 = kotz_carleman_partial(3, 10000);
    CHECK(k10000 - k1000 < k1000 - k100);
    CHECK(k10000 - k1000 < 0.5);
    MomentTable t(2);
    t.at(1, 1) = 4.0;
    CHECK(carleman_partial(t, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(carleman_partial(fact, 60), std::invalid_argument);
  }

  TEST_CASE("candidate density h") {
    // h(0) = int_0^inf sinh u / (u cosh^2 u) du
    const double h0 = radial_integral([](double u) { return u < 1e-9 ? 1.0 : std::sinh(u) / (u * std::pow(std::cosh(u), 2)); }, 60.0);
    CHECK(candidate_density_h(0.0) == doctest::Approx(h0).epsilon(1e-10));
    for (double r : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) CHECK(candidate_density_h(r) >= 0.0);
    const double mass = 2 * std::numbers::pi * radial_integral([](double r) { return r * candidate_density_h(r); }, 12.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    const double m11 = 2 * std::numbers::pi * radial_integral([](double r) { return r * r * r * candidate_density_h(r); }, 12.0);
    CHECK(m11 == doctest::Approx(0.5).epsilon(1e-4));
    const double m22 = 2 * std::numbers::pi * radial_integral([](double r) { return std::pow(r, 5) * candidate_density_h(r); }, 14.0);
    CHECK(m22 == doctest::Approx(5.0 / 6.0).epsilon(1e-4));
    CHECK_THROWS_AS(candidate_density_h(-1.0), std::invalid_argument);
  }

  TEST_CASE("histograms") {
    const auto z = complex_normal(20000, 17);
    const Histogram2D h = histogram2d(z, 30, 20, -2.5, 2.5, -2.5, 2.5);
    CHECK(h.total() + h.outside == z.size());
    const Histogram2D e = histogram2d({}, 4, 4, -1, 1, -1, 1);
    CHECK(e.total() == 0);
    CHECK(e.counts == std::vector<std::uint64_t>(16, 0));
    CHECK_THROWS_AS(histogram2d(z, 0, 4, -1, 1, -1, 1), std::invalid_argument);
    // CSV round trip
    Histogram2D hm = h;
    hm.meta = "fingerprint=00ff;word=a";
    std::stringstream ss;
    write_histogram_csv(ss, hm);
    std::string first;
    std::istringstream head(ss.str());
    std::getline(head, first);
    CHECK(first.rfind("#meta schema=ncmod-hist-1;fingerprint=00ff;word=a;outside=", 0) == 0);
    const Histogram2D back = read_histogram_csv(ss);
    CHECK(back.counts == h.counts);
    CHECK(back.nx == 30);
    CHECK(back.ny == 20);
    CHECK(back.xmin == -2.5);
    // annulus counts are insensitive to rotation up to binning noise
    std::vector<cplx> zr;
    for (const auto& x : z) zr.push_back(x * std::polar(1.0, 1.1));
    const double a = annulus_symmetry(z, 5, 8, 2.5), b = annulus_symmetry(zr, 5, 8, 2.5);
    CHECK(a < 0.15);
    CHECK(b < 0.15);
  }
}
