#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ncmod/gram.hpp"

namespace ncmod {

using Letter = std::uint8_t;

// A word in the letters 0..k-1, letter i standing for the 1-form f_i dz.
// Printed with 'a' for letter 0, 'b' for 1, ...; the empty word prints as "".
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Letter> letters) : s_(letters.begin(), letters.end()) {}
  explicit Word(const std::vector<int>& letters);

  static Word parse(std::string_view text);  // "abba"; throws on characters outside a-z
  static Word repeat(Letter x, std::size_t n) { return Word(std::string(n, static_cast<char>(x))); }

  std::size_t size() const { return s_.size(); }
  bool empty() const { return s_.empty(); }
  Letter operator[](std::size_t i) const { return static_cast<Letter>(s_[i]); }
  Letter max_letter() const;

  Word reversed() const { return Word(std::string(s_.rbegin(), s_.rend())); }
  Word prefix(std::size_t n) const { return Word(s_.substr(0, n)); }
  Word suffix_from(std::size_t n) const { return Word(s_.substr(n)); }
  Word operator+(const Word& o) const { return Word(s_ + o.s_); }
  Word& push_back(Letter x) {
    s_.push_back(static_cast<char>(x));
    return *this;
  }
  void pop_back() { s_.pop_back(); }

  std::string str() const;
  const std::string& key() const { return s_; }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& a, const Word& b) { return a.s_ <=> b.s_; }

 private:
  explicit Word(std::string s) : s_(std::move(s)) {}
  std::string s_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const { return std::hash<std::string>{}(w.key()); }
};

// All words of length n over letters 0..k-1, lexicographic.
std::vector<Word> all_words(std::size_t k, std::size_t n);

// Finite Z-linear combination of words; zero coefficients are never stored.
class NCPolynomial {
 public:
  using Map = std::unordered_map<Word, mpz_class, WordHash>;

  NCPolynomial() = default;
  explicit NCPolynomial(const Word& w) { terms_.emplace(w, 1); }

  void add(const Word& w, const mpz_class& c);
  mpz_class coefficient(const Word& w) const;
  mpz_class coefficient_sum() const;
  mpz_class coefficient_square_sum() const;
  std::size_t size() const { return terms_.size(); }
  const Map& terms() const { return terms_; }

  friend bool operator==(const NCPolynomial& a, const NCPolynomial& b) { return a.terms_ == b.terms_; }

 private:
  Map terms_;
};

NCPolynomial shuffle(const Word& u, const Word& w);
NCPolynomial shuffle(const NCPolynomial& p, const NCPolynomial& q);

// v ⧢ ... ⧢ v (n factors; n = 0 gives the empty word). Memoised, thread-safe.
NCPolynomial shuffle_power(const Word& v, unsigned n);
void clear_shuffle_cache();

// Schedule counting without expanding the polynomial:
// coefficient of u in v⧢n, and the total coefficient mass of v⧢n.
mpz_class shuffle_power_coefficient(const Word& v, unsigned n, const Word& u);
mpz_class shuffle_power_mass(const Word& v, unsigned n);

mpz_class factorial(unsigned n);
mpz_class binomial(unsigned n, unsigned k);

// Sum over u1, u2 of c_{v⧢n}(u1) c_{w⧢m}(u2) prod_i g(u1_i, u2_i), by dynamic
// programming over the progress counts of the n (resp. m) labelled copies.
// Zero unless n l(v) = m l(w).
mpq_class pair_sum(const Word& v, unsigned n, const Word& w, unsigned m, const Gram<mpq_class>& g);
std::complex<double> pair_sum(const Word& v, unsigned n, const Word& w, unsigned m, const GramMatrix& g);

// Same quantity by brute force over the expanded shuffle powers.
mpq_class pair_sum_bruteforce(const Word& v, unsigned n, const Word& w, unsigned m, const Gram<mpq_class>& g);

// B(v,w) = 4^l prod_i <y f_{v_i}, y f_{w_i}> / (l! vol^{l+1}) for l = l(v) = l(w), else 0.
std::complex<double> moment_B(const Word& v, const Word& w, const GramMatrix& g, double vol);
std::complex<double> moment_C(unsigned n, unsigned m, const Word& v, const Word& w, const GramMatrix& g, double vol);

// m_{n1,n2}(v); zero for n1 != n2.
mpq_class moment_m_exact(const Word& v, unsigned n1, unsigned n2, const Gram<mpq_class>& g);
std::complex<double> moment_m(const Word& v, unsigned n1, unsigned n2, const GramMatrix& g);

// sec^{(2n)}(0)
mpz_class euler_secant(unsigned n);

struct ConjectureRow {
  unsigned n = 0;
  mpz_class lhs;         // sum_u c_{v⧢n}(u)^2, v two distinct letters
  mpz_class rhs;         // (n!)^2 E_{2n}
  mpq_class moment;      // m_{n,n}(v) for an orthonormal pair
  mpq_class secant_ratio;  // E_{2n} / binomial(2n, n)
  bool equal = false;
};

ConjectureRow conjecture_check(unsigned n);

}  // namespace ncmod
