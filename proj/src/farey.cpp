// Farey symbols for Gamma0(q) and the word problem in their side pairings.
//
// The polygon is the ideal polygon on -inf, x_1 = 0, ..., x_n = 1, +inf, with
// an extra third of a Farey triangle glued to each odd side. Reduction moves
// a generic interior base point z* = gamma(z*_0) back into the polygon one
// side crossing at a time, entirely in exact rational arithmetic.

#include <algorithm>
#include <sstream>

#include "ncmod/modgroup.hpp"

namespace ncmod {

namespace {

const GroupElement kS{0, -1, 1, 0};
const GroupElement kU{1, -1, 1, 0};  // z -> 1 - 1/z, order 3 in PSL2

GroupElement frame(const Fraction& lo, const Fraction& hi) { return {hi.num, lo.num, hi.den, lo.den}; }

// c-entry of M_j S M_i^{-1}, mod q
long pairing_c(const Fraction& lo_i, const Fraction& hi_i, const Fraction& lo_j, const Fraction& hi_j, long q) {
  return ((lo_j.den % q) * (lo_i.den % q) + (hi_j.den % q) * (hi_i.den % q)) % q;
}

struct Point {
  mpq_class x, y;
};

Point act(const GroupElement& g, const Point& z) {
  const mpq_class cx = z.x * g.c + g.d;
  const mpq_class cy = z.y * g.c;
  const mpq_class den = cx * cx + cy * cy;
  const mpq_class ax = z.x * g.a + g.b;
  const mpq_class ay = z.y * g.a;
  return {(ax * cx + ay * cy) / den, (ay * cx - ax * cy) / den};
}

mpq_class abs2(const mpq_class& x, const mpq_class& y) { return x * x + y * y; }

mpz_class floor_q(const mpq_class& v) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return out;
}

}  // namespace

std::size_t FareySymbol::num_odd() const {
  return std::count_if(sides.begin(), sides.end(), [](const Side& s) { return s.kind == SideKind::Odd; });
}

std::size_t FareySymbol::num_even() const {
  return std::count_if(sides.begin(), sides.end(), [](const Side& s) { return s.kind == SideKind::Even; });
}

long FareySymbol::polygon_index() const {
  if (q == 1) return 1;
  const long n = static_cast<long>(vertices.size()) - 2;
  return 3 * (n - 1) + static_cast<long>(num_odd());
}

GroupElement FareySymbol::side_frame(std::size_t i) const { return frame(vertices.at(i), vertices.at(i + 1)); }

FareySymbol farey_symbol(long q) {
  if (q < 1 || q > kMaxFareyLevel)
    throw std::invalid_argument("farey_symbol: q = " + std::to_string(q) + " outside [1, " +
                                std::to_string(kMaxFareyLevel) + "]");
  FareySymbol fs;
  fs.q = q;
  if (q == 1) {
    fs.vertices = {{-1, 0}, {0, 1}, {1, 0}};
    fs.sides = {{SideKind::Even, -1, 0}, {SideKind::Odd, -1, 1}};
    fs.generators = {kS, kU};
    fs.generator_names = {"S", "U"};
    return fs;
  }

  enum class State { Free, Done };
  std::vector<Fraction> v{{-1, 0}, {0, 1}, {1, 1}, {1, 0}};
  std::vector<Side> sides(3);
  std::vector<State> state{State::Done, State::Free, State::Done};
  sides[0] = {SideKind::Translation, 2, 0};
  sides[2] = {SideKind::Translation, 0, 0};

  const std::size_t max_vertices = static_cast<std::size_t>(4 * index_gamma0(q) + 8);
  for (;;) {
    // Grow breadth-first: the free side with the smallest denominators goes next.
    std::size_t i = state.size();
    for (std::size_t k = 0; k < state.size(); ++k) {
      if (state[k] != State::Free) continue;
      if (i == state.size() || v[k].den + v[k + 1].den < v[i].den + v[i + 1].den) i = k;
    }
    if (i == state.size()) break;
    const Fraction lo = v[i], hi = v[i + 1];
    const long s = hi.den % q, t = lo.den % q;
    if ((s * s + t * t) % q == 0) {
      sides[i] = {SideKind::Even, -1, -1};
      state[i] = State::Done;
      continue;
    }
    if ((s * s + s * t + t * t) % q == 0) {
      sides[i] = {SideKind::Odd, -1, -1};
      state[i] = State::Done;
      continue;
    }
    bool paired = false;
    for (std::size_t j = 0; j < state.size(); ++j) {
      if (j == i || state[j] != State::Free) continue;
      if (pairing_c(lo, hi, v[j], v[j + 1], q) != 0) continue;
      sides[i] = {SideKind::Paired, static_cast<int>(j), -1};
      sides[j] = {SideKind::Paired, static_cast<int>(i), -1};
      state[i] = state[j] = State::Done;
      paired = true;
      break;
    }
    if (paired) continue;
    // Split the side at the mediant; the new sides inherit nothing.
    if (lo.den + hi.den > (1L << 40)) throw FareyError("farey_symbol: denominators overflow for q = " + std::to_string(q));
    v.insert(v.begin() + i + 1, Fraction{lo.num + hi.num, lo.den + hi.den});
    sides.insert(sides.begin() + i + 1, Side{});
    state.insert(state.begin() + i + 1, State::Free);
    for (auto& sd : sides)
      if (sd.partner > static_cast<int>(i)) ++sd.partner;
    if (v.size() > max_vertices) throw FareyError("farey_symbol: construction does not close for q = " + std::to_string(q));
  }
  // Partners of the translation pair follow the last vertex.
  const int last = static_cast<int>(sides.size()) - 1;
  sides[0].partner = last;
  sides[last] = {SideKind::Translation, 0, 0};

  fs.vertices = std::move(v);
  fs.sides = std::move(sides);
  fs.generators.push_back(GroupElement::T());
  fs.generator_names.push_back("T");
  for (std::size_t i = 1; i + 1 < fs.sides.size(); ++i) {
    Side& sd = fs.sides[i];
    const GroupElement Mi = fs.side_frame(i);
    std::ostringstream name;
    if (sd.kind == SideKind::Even) {
      fs.generators.push_back(Mi * kS * Mi.inverse());
      name << "E" << i;
    } else if (sd.kind == SideKind::Odd) {
      fs.generators.push_back(Mi * kU * Mi.inverse());
      name << "O" << i;
    } else if (sd.partner > static_cast<int>(i)) {
      fs.generators.push_back(fs.side_frame(sd.partner) * kS * Mi.inverse());
      name << "P" << i << "_" << sd.partner;
    } else {
      sd.generator = fs.sides[sd.partner].generator;
      continue;
    }
    sd.generator = static_cast<int>(fs.generators.size()) - 1;
    fs.generator_names.push_back(name.str());
  }

  for (std::size_t i = 0; i + 1 < fs.vertices.size(); ++i) {
    const Fraction& lo = fs.vertices[i];
    const Fraction& hi = fs.vertices[i + 1];
    if (hi.num * lo.den - lo.num * hi.den != 1) throw FareyError("farey_symbol: adjacent vertices fail the Farey condition");
  }
  for (std::size_t g = 0; g < fs.generators.size(); ++g)
    if (!fs.generators[g].in_gamma0(q))
      throw FareyError("farey_symbol: generator " + fs.generator_names[g] + " is not in Gamma0(" + std::to_string(q) + ")");
  if (fs.polygon_index() != index_gamma0(q))
    throw FareyError("farey_symbol: polygon index " + std::to_string(fs.polygon_index()) + " != psi(q) = " +
                     std::to_string(index_gamma0(q)) + " for q = " + std::to_string(q));
  return fs;
}

GroupElement evaluate_word(const GeneratorWord& w, const FareySymbol& fs) {
  GroupElement out;
  for (auto [g, e] : w.factors) out = out * power(fs.generators.at(g), e);
  return w.sign < 0 ? -out : out;
}

std::string to_string(const GeneratorWord& w, const FareySymbol& fs) {
  std::ostringstream os;
  os << (w.sign < 0 ? "-" : "+");
  for (auto [g, e] : w.factors) os << " " << fs.generator_names.at(g) << "^" << e;
  return os.str();
}

GeneratorWord word_decompose(const GroupElement& gamma, const FareySymbol& fs) {
  if (!gamma.in_gamma0(fs.q))
    throw NotInGroup("word_decompose: " + gamma.str() + " is not in Gamma0(" + std::to_string(fs.q) + ")");

  // Base point strictly inside the polygon, with rational coordinates.
  const Point base = fs.q == 1 ? Point{mpq_class(29, 101), mpq_class(37, 17)} : Point{mpq_class(37, 101), mpq_class(37, 17)};

  std::vector<std::pair<int, long>> applied;  // in application order
  GroupElement h = gamma;
  auto apply = [&](int g, long e) {
    if (e == 0) return;
    h = power(fs.generators[g], e) * h;
    applied.emplace_back(g, e);
  };

  const std::size_t max_steps = 1'000'000;
  std::size_t steps = 0;
  for (;; ++steps) {
    if (steps > max_steps) throw std::runtime_error("word_decompose: reduction did not terminate for " + gamma.str());
    const Point w = act(h, base);
    if (fs.q == 1) {
      // T = -U S: translate into -1/2 <= Re < 1/2, then invert if inside the unit circle.
      const mpz_class k = floor_q(w.x + mpq_class(1, 2));
      if (k != 0) {
        const long kk = k.get_si();
        for (long r = 0; r < std::labs(kk); ++r) {
          if (kk > 0) {  // T^{-1} = -S^{-1} U^{-1}
            apply(1, -1);
            apply(0, -1);
          } else {  // T = -U S
            apply(0, 1);
            apply(1, 1);
          }
        }
        continue;
      }
      if (abs2(w.x, w.y) < 1) {
        apply(0, 1);
        continue;
      }
      break;
    }
    if (w.x < 0 || w.x >= 1) {
      apply(0, -floor_q(w.x).get_si());
      continue;
    }
    // Side whose arc lies over Re w.
    auto ub = std::upper_bound(fs.vertices.begin() + 1, fs.vertices.end() - 1, w.x,
                               [](const mpq_class& x, const Fraction& f) { return x < mpq_class(f.num, f.den); });
    const std::size_t i = static_cast<std::size_t>(ub - fs.vertices.begin()) - 1;
    const Point u = act(fs.side_frame(i).inverse(), w);
    if (u.x < 0) break;  // above the arc: inside the ideal polygon
    const Side& sd = fs.sides[i];
    if (sd.kind == SideKind::Even) {
      apply(sd.generator, 1);
    } else if (sd.kind == SideKind::Paired) {
      apply(sd.generator, sd.partner > static_cast<int>(i) ? 1 : -1);
    } else if (sd.kind == SideKind::Odd) {
      const mpq_class half(1, 2);
      const mpq_class ux1 = u.x - 1;
      if (u.x < half && abs2(ux1, u.y) > 1) break;  // the glued third of the triangle
      if (u.x >= half && abs2(u.x, u.y) > 1)
        apply(sd.generator, -1);
      else
        apply(sd.generator, 1);
    } else {
      throw std::logic_error("word_decompose: vertical side reached after translation");
    }
  }
  if (!h.is_identity_projective())
    throw std::logic_error("word_decompose: reduction ended at a non-trivial stabiliser " + h.str());

  GeneratorWord out;
  // h = g_k ... g_1 gamma = sign * I, so gamma = sign * g_1^{-1} ... g_k^{-1}.
  out.sign = h.a > 0 ? 1 : -1;
  for (auto it = applied.begin(); it != applied.end(); ++it) {
    const int g = it->first;
    const long e = -it->second;
    if (!out.factors.empty() && out.factors.back().first == g) {
      out.factors.back().second += e;
      if (out.factors.back().second == 0) out.factors.pop_back();
    } else {
      out.factors.emplace_back(g, e);
    }
  }
  if (!(evaluate_word(out, fs) == gamma))
    throw std::logic_error("word_decompose: word does not reproduce " + gamma.str());
  return out;
}

}  // namespace ncmod
