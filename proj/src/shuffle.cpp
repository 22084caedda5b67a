#include "ncmod/shuffle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <stdexcept>

namespace ncmod {

Word::Word(const std::vector<int>& letters) {
  s_.reserve(letters.size());
  for (int x : letters) {
    if (x < 0 || x > 255) throw std::invalid_argument("Word: letter index out of range");
    s_.push_back(static_cast<char>(x));
  }
}

Word Word::parse(std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (ch < 'a' || ch > 'z') throw std::invalid_argument("Word::parse: '" + std::string(text) + "' is not a word in a-z");
    s.push_back(static_cast<char>(ch - 'a'));
  }
  return Word(std::move(s));
}

Letter Word::max_letter() const {
  Letter m = 0;
  for (char ch : s_) m = std::max(m, static_cast<Letter>(ch));
  return m;
}

std::string Word::str() const {
  std::string out;
  for (char ch : s_) out.push_back(static_cast<char>('a' + static_cast<unsigned char>(ch)));
  return out;
}

std::vector<Word> all_words(std::size_t k, std::size_t n) {
  std::vector<Word> out{Word{}};
  for (std::size_t len = 0; len < n; ++len) {
    std::vector<Word> next;
    next.reserve(out.size() * k);
    for (const auto& w : out)
      for (std::size_t x = 0; x < k; ++x) next.push_back(Word(w).push_back(static_cast<Letter>(x)));
    out = std::move(next);
  }
  return out;
}

void NCPolynomial::add(const Word& w, const mpz_class& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

mpz_class NCPolynomial::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? mpz_class(0) : it->second;
}

mpz_class NCPolynomial::coefficient_sum() const {
  mpz_class s = 0;
  for (const auto& [w, c] : terms_) s += c;
  return s;
}

mpz_class NCPolynomial::coefficient_square_sum() const {
  mpz_class s = 0;
  for (const auto& [w, c] : terms_) s += c * c;
  return s;
}

namespace {

// Every interleaving of u and w, each added to out with weight c.
void interleave(const Word& u, const Word& w, const mpz_class& c, NCPolynomial& out) {
  Word buf;
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
    if (i == u.size() && j == w.size()) {
      out.add(buf, c);
      return;
    }
    if (i < u.size()) {
      buf.push_back(u[i]);
      self(self, i + 1, j);
      buf.pop_back();
    }
    if (j < w.size()) {
      buf.push_back(w[j]);
      self(self, i, j + 1);
      buf.pop_back();
    }
  };
  rec(rec, 0, 0);
}

struct PowerKey {
  std::string word;
  unsigned n;
  bool operator<(const PowerKey& o) const { return std::tie(word, n) < std::tie(o.word, o.n); }
};

std::mutex g_cache_mutex;
std::map<PowerKey, std::shared_ptr<const NCPolynomial>> g_cache;

}  // namespace

NCPolynomial shuffle(const Word& u, const Word& w) {
  NCPolynomial out;
  interleave(u, w, 1, out);
  return out;
}

NCPolynomial shuffle(const NCPolynomial& p, const NCPolynomial& q) {
  NCPolynomial out;
  for (const auto& [u, cu] : p.terms())
    for (const auto& [w, cw] : q.terms()) interleave(u, w, cu * cw, out);
  return out;
}

NCPolynomial shuffle_power(const Word& v, unsigned n) {
  if (n == 0) return NCPolynomial(Word{});
  if (n == 1) return NCPolynomial(v);
  {
    std::lock_guard lock(g_cache_mutex);
    auto it = g_cache.find({v.key(), n});
    if (it != g_cache.end()) return *it->second;
  }
  auto result = std::make_shared<const NCPolynomial>(shuffle(shuffle_power(v, n - 1), NCPolynomial(v)));
  std::lock_guard lock(g_cache_mutex);
  g_cache.emplace(PowerKey{v.key(), n}, result);
  return *result;
}

void clear_shuffle_cache() {
  std::lock_guard lock(g_cache_mutex);
  g_cache.clear();
}

mpz_class factorial(unsigned n) {
  mpz_class out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

mpz_class binomial(unsigned n, unsigned k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

namespace {

// Progress counts of n labelled copies of a word of length l: k[j] copies have
// consumed exactly j letters. Interleavings of the copies are the paths from
// (n, 0, ..., 0) to (0, ..., 0, n); advancing a copy at stage j has k[j] choices.
using Counts = std::vector<unsigned>;

template <class Emit>
mpz_class run_single(const Word& v, unsigned n, Emit allowed) {
  const std::size_t l = v.size();
  Counts k0(l + 1, 0);
  k0[0] = n;
  std::map<Counts, mpz_class> states{{k0, 1}};
  for (std::size_t t = 0; t < n * l; ++t) {
    std::map<Counts, mpz_class> next;
    for (const auto& [k, wt] : states)
      for (std::size_t j = 0; j < l; ++j) {
        if (k[j] == 0 || !allowed(t, v[j])) continue;
        Counts k2 = k;
        --k2[j];
        ++k2[j + 1];
        next[k2] += wt * k[j];
      }
    states = std::move(next);
  }
  mpz_class total = 0;
  for (const auto& [k, wt] : states) total += wt;
  return total;
}

template <class Scalar>
Scalar pair_sum_impl(const Word& v, unsigned n, const Word& w, unsigned m, const Gram<Scalar>& g) {
  const std::size_t lv = v.size(), lw = w.size();
  if (n * lv != m * lw) return Scalar(0);
  const std::size_t steps = n * lv;
  if (steps == 0) return Scalar(1);
  if (v.max_letter() >= g.size() || w.max_letter() >= g.size())
    throw std::invalid_argument("pair_sum: word uses a letter outside the Gram matrix");
  std::map<std::pair<Counts, Counts>, Scalar> states;
  {
    Counts kv(lv + 1, 0), kw(lw + 1, 0);
    kv[0] = n;
    kw[0] = m;
    states.emplace(std::pair{kv, kw}, Scalar(1));
  }
  for (std::size_t t = 0; t < steps; ++t) {
    std::map<std::pair<Counts, Counts>, Scalar> next;
    for (const auto& [key, wt] : states) {
      const auto& [kv, kw] = key;
      for (std::size_t i = 0; i < lv; ++i) {
        if (kv[i] == 0) continue;
        for (std::size_t j = 0; j < lw; ++j) {
          if (kw[j] == 0) continue;
          const Scalar& gij = g(v[i], w[j]);
          if (gij == Scalar(0)) continue;
          Counts kv2 = kv, kw2 = kw;
          --kv2[i];
          ++kv2[i + 1];
          --kw2[j];
          ++kw2[j + 1];
          auto [it, inserted] = next.try_emplace(std::pair{std::move(kv2), std::move(kw2)}, Scalar(0));
          it->second += wt * gij * Scalar(static_cast<long>(kv[i]) * static_cast<long>(kw[j]));
        }
      }
    }
    states = std::move(next);
  }
  Scalar total(0);
  for (const auto& [key, wt] : states) total += wt;
  return total;
}

}  // namespace

mpz_class shuffle_power_coefficient(const Word& v, unsigned n, const Word& u) {
  if (u.size() != n * v.size()) return 0;
  if (n == 0) return 1;
  return run_single(v, n, [&u](std::size_t t, Letter x) { return u[t] == x; });
}

mpz_class shuffle_power_mass(const Word& v, unsigned n) {
  if (n == 0 || v.empty()) return 1;
  return run_single(v, n, [](std::size_t, Letter) { return true; });
}

mpq_class pair_sum(const Word& v, unsigned n, const Word& w, unsigned m, const Gram<mpq_class>& g) {
  return pair_sum_impl(v, n, w, m, g);
}

std::complex<double> pair_sum(const Word& v, unsigned n, const Word& w, unsigned m, const GramMatrix& g) {
  return pair_sum_impl(v, n, w, m, g);
}

mpq_class pair_sum_bruteforce(const Word& v, unsigned n, const Word& w, unsigned m, const Gram<mpq_class>& g) {
  if (n * v.size() != m * w.size()) return 0;
  const NCPolynomial pv = shuffle_power(v, n);
  const NCPolynomial pw = shuffle_power(w, m);
  mpq_class total = 0;
  for (const auto& [u1, c1] : pv.terms())
    for (const auto& [u2, c2] : pw.terms()) {
      mpq_class prod = 1;
      for (std::size_t i = 0; i < u1.size() && prod != 0; ++i) prod *= g(u1[i], u2[i]);
      total += prod * c1 * c2;
    }
  return total;
}

std::complex<double> moment_B(const Word& v, const Word& w, const GramMatrix& g, double vol) {
  if (v.size() != w.size()) return 0.0;
  const std::size_t l = v.size();
  std::complex<double> prod = 1.0;
  for (std::size_t i = 0; i < l; ++i) prod *= g(v[i], w[i]);
  return std::pow(4.0, static_cast<double>(l)) * prod /
         (factorial(static_cast<unsigned>(l)).get_d() * std::pow(vol, static_cast<double>(l + 1)));
}

std::complex<double> moment_C(unsigned n, unsigned m, const Word& v, const Word& w, const GramMatrix& g, double vol) {
  const std::size_t N = n * v.size();
  if (N != m * w.size()) return 0.0;
  const double scale = std::pow(4.0, static_cast<double>(N)) /
                       (factorial(static_cast<unsigned>(N)).get_d() * std::pow(vol, static_cast<double>(N + 1)));
  return scale * pair_sum(v, n, w, m, g);
}

mpq_class moment_m_exact(const Word& v, unsigned n1, unsigned n2, const Gram<mpq_class>& g) {
  if (n1 != n2) return 0;
  mpq_class out = pair_sum(v, n1, v, n1, g) / mpq_class(factorial(static_cast<unsigned>(n1 * v.size())));
  out.canonicalize();
  return out;
}

std::complex<double> moment_m(const Word& v, unsigned n1, unsigned n2, const GramMatrix& g) {
  if (n1 != n2) return 0.0;
  return pair_sum(v, n1, v, n1, g) / factorial(static_cast<unsigned>(n1 * v.size())).get_d();
}

mpz_class euler_secant(unsigned n) {
  // Seidel-Entringer boustrophedon; the last entry of row k is the zigzag number A_k.
  const unsigned K = 2 * n;
  std::vector<mpz_class> row{1};
  for (unsigned k = 1; k <= K; ++k) {
    std::vector<mpz_class> next(k + 1);
    next[0] = 0;
    for (unsigned j = 1; j <= k; ++j) next[j] = next[j - 1] + row[k - j];
    row = std::move(next);
  }
  return row.back();
}

ConjectureRow conjecture_check(unsigned n) {
  if (n < 1) throw std::invalid_argument("conjecture_check: n must be >= 1");
  const Word v{0, 1};
  const auto g = Gram<mpq_class>::identity(2);
  ConjectureRow row;
  row.n = n;
  const mpq_class s = pair_sum(v, n, v, n, g);
  if (s.get_den() != 1) throw std::logic_error("conjecture_check: non-integral coefficient square sum");
  row.lhs = s.get_num();
  const mpz_class E = euler_secant(n);
  const mpz_class nf = factorial(n);
  row.rhs = nf * nf * E;
  row.moment = mpq_class(row.lhs, factorial(2 * n));
  row.moment.canonicalize();
  row.secant_ratio = mpq_class(E, binomial(2 * n, n));
  row.secant_ratio.canonicalize();
  row.equal = row.lhs == row.rhs;
  return row;
}

}  // namespace ncmod
