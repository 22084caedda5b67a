#include "ncmod/stats.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ncmod/modgroup.hpp"

namespace ncmod {

namespace {

cplx pairwise_sum(const cplx* x, std::size_t n) {
  if (n <= 32) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace

cplx normalization_factor(long q, long c, unsigned l, Normalization n) {
  if (c < 2) throw std::invalid_argument("normalize: c(r) = " + std::to_string(c) + " < 2");
  const double lc = std::log(static_cast<double>(c));
  if (n == Normalization::Y_M) return std::pow(volume(q) / (4.0 * 2.0 * lc), 0.5 * l);
  return std::pow(c_constant(q) / lc, 0.5 * l) * std::pow(cplx(0.0, 2.0 * std::numbers::pi), static_cast<int>(l));
}

SampleSet normalize(const SampleSet& set, Normalization n) {
  SampleSet out = set;
  for (auto& s : out.samples)
    for (std::size_t i = 0; i < s.values.size(); ++i)
      s.values[i] *= normalization_factor(set.config.q, s.c, static_cast<unsigned>(set.config.words[i].size()), n);
  return out;
}

MomentTable empirical_moments(const std::vector<cplx>& z, unsigned max_order) {
  MomentTable t(max_order);
  if (z.empty()) throw std::invalid_argument("empirical_moments: no samples");
  const std::size_t n = z.size();
  std::vector<cplx> zp(n, 1.0);
  for (unsigned n1 = 0; n1 <= max_order; ++n1) {
    std::vector<cplx> w = zp;  // z^{n1} conj(z)^{n2}
    for (unsigned n2 = 0; n2 <= max_order; ++n2) {
      t.at(n1, n2) = pairwise_sum(w.data(), n) / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) w[i] *= std::conj(z[i]);
    }
    for (std::size_t i = 0; i < n; ++i) zp[i] *= z[i];
  }
  return t;
}

MomentTable predicted_moments(const Word& v, const GramMatrix& g, unsigned max_order) {
  MomentTable t(max_order);
  for (unsigned n = 0; n <= max_order; ++n) t.at(n, n) = n == 0 ? cplx(1.0) : moment_m(v, n, n, g);
  return t;
}

std::vector<double> scale_free_ratios(const MomentTable& t) {
  std::vector<double> r;
  const double m11 = t.at(1, 1).real();
  for (unsigned n = 2; n <= t.max_order(); ++n) r.push_back(t.at(n, n).real() / std::pow(m11, n));
  return r;
}

double kotz_density(unsigned l, cplx z) {
  if (l == 0) throw std::invalid_argument("kotz_density: l >= 1");
  const double lf = std::tgamma(l + 1.0);
  const double a = lf * std::abs(z);
  return lf * lf / (l * std::numbers::pi) * std::exp(-std::pow(a, 2.0 / l)) * std::pow(a, 2.0 * (1.0 / l - 1.0));
}

mpq_class kotz_moment(unsigned l, unsigned k1, unsigned k2) {
  if (k1 != k2) return 0;
  mpz_class den;
  mpz_pow_ui(den.get_mpz_t(), factorial(l).get_mpz_t(), 2 * k1);
  mpq_class r(factorial(l * k1), den);
  r.canonicalize();
  return r;
}

double carleman_partial(const std::vector<double>& diag, unsigned K) {
  if (diag.size() <= K) throw std::invalid_argument("carleman_partial: need m_{k,k} for k <= K");
  double s = 0;
  for (unsigned k = 1; k <= K; ++k) s += std::pow(diag[k], -1.0 / (2.0 * k));
  return s;
}

double carleman_partial(const MomentTable& t, unsigned K) {
  std::vector<double> d;
  for (unsigned k = 0; k <= t.max_order(); ++k) d.push_back(t.at(k, k).real());
  return carleman_partial(d, K);
}

double kotz_carleman_partial(unsigned l, unsigned K) {
  double s = 0;
  for (unsigned k = 1; k <= K; ++k) {
    const double logm = std::lgamma(l * k + 1.0) - 2.0 * k * std::lgamma(l + 1.0);
    s += std::exp(-logm / (2.0 * k));
  }
  return s;
}

double candidate_density_h(double r) {
  if (!(r >= 0)) throw std::invalid_argument("candidate_density_h: r >= 0");
  using boost::math::quadrature::gauss_kronrod;
  // sinh u / cosh^2 u = 2 e^{-u} (1 - e^{-2u}) / (1 + e^{-2u})^2
  auto kernel = [](double u) {
    if (u > 700) return 0.0;
    const double e = std::exp(-2.0 * u);
    return 2.0 * std::exp(-u) * (1.0 - e) / ((1.0 + e) * (1.0 + e));
  };
  double err = 0;
  if (r == 0) {
    // limit r -> 0: with u = pi r / t the integral becomes int_0^inf sinh u / (u cosh^2 u) du
    auto g = [&](double u) { return u < 1e-8 ? 1.0 : kernel(u) / u; };
    return gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 12, 1e-12, &err) +
           gauss_kronrod<double, 61>::integrate(g, 1.0, 40.0, 12, 1e-12, &err);
  }
  const double pr = std::numbers::pi * r;
  auto f = [&](double t) {
    const double st = std::sin(t);
    return st > 0 ? kernel(pr / st) / st : 0.0;
  };
  // the integrand switches on near t ~ pi r; cut there so both panels are smooth
  const double cut = std::min(std::numbers::pi / 2, 20.0 * pr);
  double h = gauss_kronrod<double, 61>::integrate(f, 0.0, cut, 12, 1e-12, &err);
  if (cut < std::numbers::pi / 2) h += gauss_kronrod<double, 61>::integrate(f, cut, std::numbers::pi / 2, 12, 1e-12, &err);
  return h;
}

std::uint64_t Histogram2D::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

Histogram2D histogram2d(const std::vector<cplx>& z, std::size_t nx, std::size_t ny, double xmin, double xmax, double ymin,
                        double ymax) {
  if (nx == 0 || ny == 0 || !(xmax > xmin) || !(ymax > ymin)) throw std::invalid_argument("histogram2d: bad bins or bounds");
  Histogram2D h;
  h.xmin = xmin;
  h.xmax = xmax;
  h.ymin = ymin;
  h.ymax = ymax;
  h.nx = nx;
  h.ny = ny;
  h.counts.assign(nx * ny, 0);
  for (const cplx& p : z) {
    const double x = p.real(), y = p.imag();
    if (!(x >= xmin && x <= xmax && y >= ymin && y <= ymax)) {
      ++h.outside;
      continue;
    }
    const auto ix = std::min(nx - 1, static_cast<std::size_t>((x - xmin) / (xmax - xmin) * nx));
    const auto iy = std::min(ny - 1, static_cast<std::size_t>((y - ymin) / (ymax - ymin) * ny));
    ++h.at(ix, iy);
  }
  return h;
}

void write_histogram_csv(std::ostream& out, const Histogram2D& h) {
  out << "#meta schema=ncmod-hist-1";
  if (!h.meta.empty()) out << ';' << h.meta;
  out << ";outside=" << h.outside << '\n';
  out.precision(17);
  out << "#bounds " << h.xmin << ' ' << h.xmax << ' ' << h.ymin << ' ' << h.ymax << ' ' << h.nx << ' ' << h.ny << '\n';
  for (std::size_t iy = 0; iy < h.ny; ++iy) {
    for (std::size_t ix = 0; ix < h.nx; ++ix) out << (ix ? "," : "") << h.at(ix, iy);
    out << '\n';
  }
}

Histogram2D read_histogram_csv(std::istream& in) {
  Histogram2D h;
  std::string line;
  if (!std::getline(in, line) || line.rfind("#meta ", 0) != 0) throw std::runtime_error("histogram CSV: missing #meta line");
  h.meta = line.substr(6);
  if (!std::getline(in, line) || line.rfind("#bounds ", 0) != 0)
    throw std::runtime_error("histogram CSV: missing #bounds line");
  std::istringstream b(line.substr(8));
  if (!(b >> h.xmin >> h.xmax >> h.ymin >> h.ymax >> h.nx >> h.ny)) throw std::runtime_error("histogram CSV: bad #bounds");
  h.counts.reserve(h.nx * h.ny);
  for (std::size_t iy = 0; iy < h.ny; ++iy) {
    if (!std::getline(in, line)) throw std::runtime_error("histogram CSV: too few rows");
    std::istringstream row(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(row, cell, ',')) {
      h.counts.push_back(std::stoull(cell));
      ++n;
    }
    if (n != h.nx) throw std::runtime_error("histogram CSV: row " + std::to_string(iy) + " has the wrong width");
  }
  return h;
}

double annulus_symmetry(const std::vector<cplx>& z, unsigned annuli, unsigned sectors, double rmax, std::size_t min_count) {
  std::vector<std::vector<std::size_t>> cnt(annuli, std::vector<std::size_t>(sectors, 0));
  for (const cplx& p : z) {
    const double r = std::abs(p);
    if (!(r < rmax)) continue;
    const auto ia = std::min<std::size_t>(annuli - 1, static_cast<std::size_t>(r / rmax * annuli));
    double th = std::arg(p) / (2 * std::numbers::pi);
    if (th < 0) th += 1;
    const auto is = std::min<std::size_t>(sectors - 1, static_cast<std::size_t>(th * sectors));
    ++cnt[ia][is];
  }
  double acc = 0;
  int used = 0;
  for (const auto& a : cnt) {
    std::size_t tot = 0;
    for (auto c : a) tot += c;
    if (tot < min_count) continue;
    const double mean = static_cast<double>(tot) / sectors;
    double dev = 0;
    for (auto c : a) dev = std::max(dev, std::abs(static_cast<double>(c) - mean) / mean);
    acc += dev;
    ++used;
  }
  return used ? acc / used : 0.0;
}

}  // namespace ncmod
