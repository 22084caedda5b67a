#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "ncmod/gram.hpp"
#include "ncmod/samples.hpp"
#include "ncmod/shuffle.hpp"

namespace ncmod {

// m[n1][n2] for 0 <= n1, n2 <= max_order
class MomentTable {
 public:
  MomentTable() = default;
  explicit MomentTable(unsigned max_order) : order_(max_order), m_((max_order + 1) * (max_order + 1), 0.0) {}
  unsigned max_order() const { return order_; }
  cplx& at(unsigned n1, unsigned n2) { return m_.at(n1 * (order_ + 1) + n2); }
  const cplx& at(unsigned n1, unsigned n2) const { return m_.at(n1 * (order_ + 1) + n2); }

 private:
  unsigned order_ = 0;
  std::vector<cplx> m_;
};

enum class Normalization { Y_M, Z_M };

// Y_M: (vol / (4 log c^2))^{l/2} applied to I.
// Z_M: (C_q / log c)^{l/2} applied to the central value (2 pi i)^l I.
// Since C_q / log c = vol / (4 log c^2), the two differ exactly by (2 pi i)^l.
cplx normalization_factor(long q, long c, unsigned l, Normalization n);
SampleSet normalize(const SampleSet& set, Normalization n);

// Mean of z^{n1} conj(z)^{n2} with pairwise summation (fixed tree, so the
// result does not depend on thread count or platform reduction order).
MomentTable empirical_moments(const std::vector<cplx>& z, unsigned max_order);
MomentTable predicted_moments(const Word& v, const GramMatrix& g, unsigned max_order);

// m[n][n] / m[1][1]^n for n = 2..max_order (real parts)
std::vector<double> scale_free_ratios(const MomentTable& t);

// (l!)^2 / (l pi) exp(-|l! z|^{2/l}) |l! z|^{2(1/l - 1)}
double kotz_density(unsigned l, cplx z);
// delta_{k1 k2} (l k1)! / (l!)^{2 k1}
mpq_class kotz_moment(unsigned l, unsigned k1, unsigned k2);

// sum_{k=1..K} m_{k,k}^{-1/(2k)}; diag[k] = m_{k,k}, diag[0] unused
double carleman_partial(const std::vector<double>& diag, unsigned K);
double carleman_partial(const MomentTable& t, unsigned K);
// Same for the Kotz-like moments, computed in log space so K may be large.
double kotz_carleman_partial(unsigned l, unsigned K);

// h(r) = 1/4 int_0^1 sinh(u) / (y (1-y) cosh^2 u) dy, u = pi r / (2 sqrt(y(1-y))).
// With y = sin^2(t/2): h(r) = int_0^{pi/2} sinh(u) / (sin t cosh^2 u) dt, u = pi r / sin t.
// The candidate density is conditional on the secant conjecture.
double candidate_density_h(double r);

struct Histogram2D {
  double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
  std::size_t nx = 1, ny = 1;
  std::vector<std::uint64_t> counts;  // row-major, row j covers y-bin j
  std::uint64_t outside = 0;          // samples beyond the bounds (not in counts)
  std::string meta;                   // "key=value;..." written to the #meta line

  std::uint64_t total() const;
  std::uint64_t& at(std::size_t ix, std::size_t iy) { return counts.at(iy * nx + ix); }
  std::uint64_t at(std::size_t ix, std::size_t iy) const { return counts.at(iy * nx + ix); }
};

// Points outside the half-open box are counted in `outside`; the right and top
// edges are folded into the last bin.
Histogram2D histogram2d(const std::vector<cplx>& z, std::size_t nx, std::size_t ny, double xmin, double xmax, double ymin,
                        double ymax);

// line 1 "#meta key=value;...", line 2 "#bounds xmin xmax ymin ymax nx ny", then ny rows of nx counts
void write_histogram_csv(std::ostream& out, const Histogram2D& h);
Histogram2D read_histogram_csv(std::istream& in);

// For each annulus holding at least min_count points: the largest relative
// deviation of its sector counts from their mean; averaged over those annuli.
double annulus_symmetry(const std::vector<cplx>& z, unsigned annuli, unsigned sectors, double rmax,
                        std::size_t min_count = 200);

}  // namespace ncmod
