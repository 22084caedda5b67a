#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ncmod/hecke.hpp"
#include "ncmod/iterint.hpp"
#include "ncmod/modgroup.hpp"
#include "ncmod/shuffle.hpp"
#include "ncmod/special.hpp"

namespace ncmod {

class CuspValidityError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
class ConvergenceRegionError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// a/c must be a cusp equivalent to i inf: c > 0, level | c, gcd(a, c) = 1.
void check_cusp(const CuspFraction& r, int level);
// -d/c = gamma^{-1}(i inf), normalised to 0 <= a < c.
CuspFraction partner_cusp(const CuspFraction& r);

struct PartialSum {
  cplx value;
  double tail_estimate;  // +inf when no estimate is available for this s
  std::size_t terms;
};

// sum_{m_1 <= N} sum_{0 < m_l < ... < m_1} a_1(m_1 - m_2) ... a_l(m_l) e(a m_1 / c) / (m_1^s m_2 ... m_l).
// Requires Re s > 1 + l/2. The tail estimate uses the average order of d(n) sqrt(n)
// for l = 1 and the bound |a(n)| <= 2n for l >= 2 (finite only for Re s > l + 1).
PartialSum multiple_L_partial(const std::vector<FourierSeries>& forms, const CuspFraction& r, cplx s, std::size_t N);

// (2 pi i)^l J[v] for the word v = 0 1 ... l-1 of an already evaluated series.
cplx central_value(const TruncatedJSeries& J, const Word& v);
// Self-contained: evaluates J at a/c directly with the forms as letters 0..l-1.
cplx central_value(const std::vector<FourierSeries>& forms, const CuspFraction& r, double tol = 1e-12);

// Split-integral continuation. The path i inf -> a/c is cut at z0 = a/c + i split/c;
// the lower piece is mapped by gamma to the vertical line over -d/c. Both pieces
// are sums of incomplete gamma functions:
//   I(s) = -i^s sum a(n) e(na/c) (2 pi n)^{-s} Gamma(s, 2 pi n y0)
//          + i^s c^{2-2s} sum a(n) e(-nd/c) (2 pi n)^{s-2} Gamma(2-s, 2 pi n / (c^2 y0)),
// with i^s and (z - a/c)^{s-1} on the principal branch (the path has arg(z - a/c) = pi/2).
struct ContinuationParams {
  double split = 1.0;
  double tol = 1e-13;
};

// I_{i inf}^{a/c}(f dz, s)
cplx twisted_integral(const FourierSeries& f, const CuspFraction& r, cplx s, const ContinuationParams& p = {});
// L(f, a/c, s) = -(2 pi)^s I / (i^s Gamma(s))
cplx twisted_L_continued(const FourierSeries& f, const CuspFraction& r, cplx s, const ContinuationParams& p = {});

// I_{i inf}^{a/c}(f1 dz f2 dz, s, 1)
cplx twisted_integral2(const FourierSeries& f1, const FourierSeries& f2, const CuspFraction& r, cplx s,
                       const ContinuationParams& p = {});
// L(f1, f2, a/c, s, 1) = (2 pi)^{s+1} I / (i^{s+1} Gamma(s))
cplx twisted_L2_continued(const FourierSeries& f1, const FourierSeries& f2, const CuspFraction& r, cplx s,
                          const ContinuationParams& p = {});

struct CompletedLValue {
  cplx value;
  double scale;  // c for twists, sqrt(q) untwisted
  cplx gamma;    // Gamma(s)
};

// Lambda_{a/c}(f, s) = (c / 2 pi)^s Gamma(s) L(f, a/c, s) = -c^s i^{-s} I(s)
CompletedLValue completed_twisted_L(const FourierSeries& f, const CuspFraction& r, cplx s, const ContinuationParams& p = {});
// Lambda_{a/c}(f1, f2, s) = (c / 2 pi)^{s+1} Gamma(s) L(f1, f2, a/c, s, 1) = c^{s+1} i^{-(s+1)} I(s)
CompletedLValue completed_twisted_L2(const FourierSeries& f1, const FourierSeries& f2, const CuspFraction& r, cplx s,
                                     const ContinuationParams& p = {});

// Lambda_{a/c}(f, s) + Lambda_{-d/c}(f, 2 - s)
cplx twisted_fe_residual(const FourierSeries& f, const CuspFraction& r, cplx s, const ContinuationParams& p = {});
// Lambda_{a/c}(f1,f2,s) + Lambda_{-d/c}(f1,f2,2-s) - Lambda_{-d/c}(f1,2-s) Lambda_{-d/c}(f2,1)
cplx twisted_fe_residual2(const FourierSeries& f1, const FourierSeries& f2, const CuspFraction& r, cplx s,
                          const ContinuationParams& p = {});

// Untwisted integrals from i inf to 0, cut at i split/sqrt(q); the lower piece uses
// W f = eps * fhat with fhat the form with conjugated coefficients.
cplx untwisted_integral(const FourierSeries& f, cplx eps, cplx s, const ContinuationParams& p = {});
cplx untwisted_integral2(const FourierSeries& f1, cplx eps1, const FourierSeries& f2, cplx eps2, cplx s,
                         const ContinuationParams& p = {});
// Lambda(f, s) = (sqrt q / 2 pi)^s Gamma(s) L(f, s) = -q^{s/2} i^{-s} I
cplx untwisted_lambda(const FourierSeries& f, cplx eps, cplx s, const ContinuationParams& p = {});
// Lambda(f1, f2, s) = (sqrt q / 2 pi)^{s+1} Gamma(s) L(f1, f2, s, 1) = q^{(s+1)/2} i^{-(s+1)} I
cplx untwisted_lambda2(const FourierSeries& f1, cplx eps1, const FourierSeries& f2, cplx eps2, cplx s,
                       const ContinuationParams& p = {});

class FrickeFitError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The continuation is split-independent only for the true eps; two split points
// determine it. Throws FrickeFitError if |eps| is not 1 within unit_tol.
cplx fit_fricke(const FourierSeries& f, cplx s0 = cplx(1.2, 0.3), double unit_tol = 1e-6);

struct FEReport {
  cplx eps1, eps2;
  bool eps1_fitted = false, eps2_fitted = false;
  double eps_unit_defect = 0;  // max ||eps| - 1|
  std::vector<cplx> s_grid;
  std::vector<double> residual1;  // |Lambda(f1,s) + eps1 Lambda(f1hat,2-s)|, relative
  std::vector<double> residual2;  // length-2 equation, relative
  double max_residual() const;
};

FEReport untwisted_FE_check(const FourierSeries& f1, const FourierSeries& f2, const std::vector<cplx>& s_grid,
                            const ContinuationParams& p = {});

// form with conjugated coefficients
FourierSeries conjugate_form(const FourierSeries& f);

}  // namespace ncmod
