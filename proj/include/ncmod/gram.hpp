#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ncmod {

// Square table of Petersson products <y f_i, y f_j> for the active form list.
// The scalar is std::complex<double> for measured data and mpq_class when the
// table is known exactly (e.g. an orthonormal pair).
template <class Scalar>
class Gram {
 public:
  Gram() = default;
  explicit Gram(std::size_t n) : n_(n), g_(n * n) {}
  Gram(std::size_t n, std::vector<Scalar> entries) : n_(n), g_(std::move(entries)) {
    if (g_.size() != n * n) throw std::invalid_argument("Gram: entry count is not n*n");
  }

  static Gram identity(std::size_t n) {
    Gram g(n);
    for (std::size_t i = 0; i < n; ++i) g(i, i) = Scalar(1);
    return g;
  }

  std::size_t size() const { return n_; }
  Scalar& operator()(std::size_t i, std::size_t j) { return g_[i * n_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return g_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<Scalar> g_;
};

using GramMatrix = Gram<std::complex<double>>;

// Hermitian with real positive diagonal, up to tol.
bool is_hermitian(const GramMatrix& g, double tol);

}  // namespace ncmod
