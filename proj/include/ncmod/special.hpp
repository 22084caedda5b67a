#pragma once

#include <complex>
#include <stdexcept>

namespace ncmod {

using cplx = std::complex<double>;

class NonConvergence : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gamma(s) for complex s (Lanczos, g = 7, with reflection for Re s < 1/2).
cplx gamma_complex(cplx s);

// Upper incomplete gamma Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt for x > 0.
//   x < 1.5 or x < Re(s) + 1 : Gamma(s) - gamma(s, x), the lower function by its power series
//   otherwise                : Legendre continued fraction, modified Lentz
// Non-positive integer s uses E1 and the downward recurrence; s within 1e-3 of
// one (where Gamma(s) - gamma(s,x) cancels) falls back to quadrature in t = x e^u.
cplx incomplete_gamma_upper(cplx s, double x);

// principal-branch z^s
inline cplx cpow(cplx z, cplx s) { return std::exp(s * std::log(z)); }

}  // namespace ncmod
