#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ncmod {

// [[a, b], [c, d]] with ad - bc = 1; entries are unbounded integers.
struct GroupElement {
  mpz_class a = 1, b = 0, c = 0, d = 1;

  static GroupElement identity() { return {}; }
  static GroupElement T() { return {1, 1, 0, 1}; }
  static GroupElement S() { return {0, -1, 1, 0}; }

  mpz_class det() const { return a * d - b * c; }
  GroupElement inverse() const { return {d, -b, -c, a}; }
  GroupElement operator-() const { return {-a, -b, -c, -d}; }
  bool in_gamma0(long q) const;
  bool is_identity_projective() const;  // +-I
  std::string str() const;
};

GroupElement operator*(const GroupElement& x, const GroupElement& y);
bool operator==(const GroupElement& x, const GroupElement& y);
GroupElement power(const GroupElement& g, long n);

class NotInGroup : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class FareyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// psi(q) = [SL2(Z) : Gamma0(q)]
long index_gamma0(long q);
double volume(long q);      // (pi/3) psi(q)
double c_constant(long q);  // pi psi(q) / 24 = volume / 8

struct Fraction {
  long num = 0;
  long den = 1;  // den == 0 encodes +-infinity, sign carried by num
};

enum class SideKind { Even, Odd, Paired, Translation };

struct Side {
  SideKind kind = SideKind::Even;
  int partner = -1;    // paired side index (Paired/Translation)
  int generator = -1;  // index into FareySymbol::generators
};

// Special polygon for Gamma0(q). vertices = -inf, x_1, ..., x_n, +inf with
// b_{i+1} a_i... oriented so that a_{i+1} b_i - a_i b_{i+1} = 1; side i joins
// vertices i and i+1. For q > 1 the two vertical sides are paired by T.
struct FareySymbol {
  long q = 1;
  std::vector<Fraction> vertices;
  std::vector<Side> sides;
  std::vector<GroupElement> generators;
  std::vector<std::string> generator_names;

  std::size_t num_odd() const;
  std::size_t num_even() const;
  // 3 (n - 1) + #odd for q > 1; index of the group the pairings generate.
  long polygon_index() const;
  // M_i, mapping 0 -> x_i and infinity -> x_{i+1}.
  GroupElement side_frame(std::size_t i) const;
};

FareySymbol farey_symbol(long q);

// Bound on q accepted by farey_symbol.
inline constexpr long kMaxFareyLevel = 5000;

struct GeneratorWord {
  std::vector<std::pair<int, long>> factors;  // (generator index, nonzero exponent)
  int sign = 1;
};

GroupElement evaluate_word(const GeneratorWord& w, const FareySymbol& fs);
std::string to_string(const GeneratorWord& w, const FareySymbol& fs);

// sign * prod g_{i_j}^{n_j} == gamma exactly; checked before returning.
GeneratorWord word_decompose(const GroupElement& gamma, const FareySymbol& fs);

enum class Ordering { CLeM, CSqLeM };
const char* to_string(Ordering o);
Ordering parse_ordering(const std::string& s);

struct CuspFraction {
  long a = 0;
  long c = 1;
  long d = 1;  // a d = 1 mod c, 0 <= d < c (d = 1 when c = 1)
};

// Largest c admitted by the ordering for this M.
long max_denominator(long M, Ordering ordering);

// All reduced a/c in [0,1) with q | c, in order of increasing c then a.
void enumerate_T(long q, long M, Ordering ordering, const std::function<void(const CuspFraction&)>& sink);
std::vector<CuspFraction> enumerate_T(long q, long M, Ordering ordering);
// Sum of phi(c) over the admitted c, computed independently of the enumeration.
long count_T(long q, long M, Ordering ordering);

GroupElement cusp_to_matrix(const CuspFraction& r);
long euler_phi(long n);

}  // namespace ncmod
