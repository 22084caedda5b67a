#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "ncmod/hecke.hpp"
#include "ncmod/iterint.hpp"
#include "ncmod/lseries.hpp"
#include "ncmod/modgroup.hpp"
#include "ncmod/samples.hpp"
#include "ncmod/shuffle.hpp"
#include "ncmod/stats.hpp"

using namespace ncmod;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailure = 2;
constexpr int kConfigError = 3;

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

CuspFraction parse_cusp(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw ConfigError("cusp '" + text + "' is not of the form a/c");
  CuspFraction r;
  try {
    r.a = std::stol(text.substr(0, slash));
    r.c = std::stol(text.substr(slash + 1));
  } catch (const std::exception&) {
    throw ConfigError("cusp '" + text + "' is not of the form a/c");
  }
  if (r.c <= 0) throw ConfigError("cusp '" + text + "': denominator must be positive");
  r.a = ((r.a % r.c) + r.c) % r.c;
  if (std::gcd(r.a, r.c) != 1) throw ConfigError("cusp '" + text + "' is not reduced");
  // companion d with a d = 1 mod c
  long d = 1;
  if (r.c > 1) {
    long old_r = r.a, rr = r.c, old_s = 1, s = 0;
    while (rr != 0) {
      const long qt = old_r / rr;
      std::tie(old_r, rr) = std::make_pair(rr, old_r - qt * rr);
      std::tie(old_s, s) = std::make_pair(s, old_s - qt * s);
    }
    d = ((old_s % r.c) + r.c) % r.c;
  }
  r.d = d;
  return r;
}

// "1.3", "-2i", "1+2i", "0.5-1.5i"
cplx parse_complex(std::string t) {
  t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
  if (t.empty()) throw ConfigError("empty complex number");
  try {
    if (t.back() != 'i') return {std::stod(t), 0.0};
    t.pop_back();
    std::size_t cut = std::string::npos;
    for (std::size_t i = 1; i < t.size(); ++i)
      if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') cut = i;
    auto im = [](const std::string& x) { return x.empty() || x == "+" ? 1.0 : x == "-" ? -1.0 : std::stod(x); };
    if (cut == std::string::npos) return {0.0, im(t)};
    return {std::stod(t.substr(0, cut)), im(t.substr(cut))};
  } catch (const std::invalid_argument&) {
    throw ConfigError("cannot parse complex number '" + t + "'");
  }
}

std::string fmt(cplx z) {
  std::ostringstream os;
  os << std::setprecision(15) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

void emit(const std::string& path, const json& doc) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

std::string fingerprint_of(const std::string& text) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(text);
  return os.str();
}

// Options shared by the subcommands that touch forms and series.
struct Common {
  long level = 37;
  std::string forms = "37a,37b";
  std::string words;
  std::string ordering = "c_le_M";
  long max_c = 0;
  unsigned L = 2;
  double tol = 1e-10;
  std::string cache;
  std::string out;
  unsigned shards = 1;
  bool oracle = false;
  std::uint64_t seed = 1;

  std::vector<std::string> labels() const {
    auto l = split_list(forms);
    if (l.empty()) throw ConfigError("--forms lists no forms");
    return l;
  }
};

std::vector<FourierSeries> load_forms(long level, const std::vector<std::string>& labels, std::size_t N) {
  std::vector<FourierSeries> out;
  for (const auto& l : labels) {
    try {
      out.push_back(standard_form(static_cast<int>(level), l, N));
    } catch (const InvariantViolation&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("form " + l + " at level " + std::to_string(level) + ": " + e.what());
    }
  }
  return out;
}

// Loads the generator cache from --cache when it exists (its key must match),
// otherwise builds it and, if a path was given, saves it there.
GeneratorCache obtain_cache(const FareySymbol& fs, const std::vector<FourierSeries>& forms, const EvalParams& p,
                            const std::string& path) {
  const CacheKey key = GeneratorCache::planned_key(fs, forms, p);
  if (!path.empty() && std::filesystem::exists(path)) {
    try {
      return GeneratorCache::load(path, key);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  GeneratorCache c = GeneratorCache::build(fs, forms, p);
  if (!path.empty()) c.save(path);
  return c;
}

void add_common(CLI::App* sub, Common& o, bool words = false, bool sampling = false) {
  sub->add_option("--level", o.level, "level q of Gamma0(q)")->capture_default_str();
  sub->add_option("--forms", o.forms, "comma-separated form labels; letter a is the first")->capture_default_str();
  sub->add_option("--trunc-len", o.L, "truncation length L of J")->capture_default_str();
  sub->add_option("--tol", o.tol, "absolute tolerance for series coefficients")->capture_default_str();
  sub->add_option("--cache", o.cache, "generator cache file (loaded if present, else written)");
  sub->add_option("--out", o.out, "machine-readable output file");
  if (words) sub->add_option("--word", o.words, "comma-separated words, e.g. a,b,ab,ba");
  if (sampling) {
    sub->add_option("--ordering", o.ordering, "c_le_M or c_sq_le_M")->capture_default_str();
    sub->add_option("--max-c", o.max_c, "M; cusps with c <= M (or c^2 <= M)")->required();
    sub->add_option("--shards", o.shards, "worker threads")->capture_default_str();
  }
}

std::vector<Word> parse_words(const std::string& text) {
  std::vector<Word> w;
  for (const auto& s : split_list(text)) {
    try {
      w.push_back(Word::parse(s));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return w;
}

// ---------------------------------------------------------------- coeffs

int cmd_coeffs(const Common& o, std::size_t N, std::size_t show) {
  json doc = json::array();
  bool ok = true;
  for (const auto& label : o.labels()) {
    const FourierSeries f = load_forms(o.level, {label}, N).front();
    validate(f);
    std::cout << label << " (level " << f.level << ", " << to_string(f.source) << ", N = " << f.size() << ")";
    if (f.fricke) std::cout << ", Fricke eigenvalue " << fmt(*f.fricke);
    std::cout << "\n ";
    for (std::size_t n = 1; n <= std::min(show, f.size()); ++n) {
      const cplx a = f(n);
      if (f.is_real())
        std::cout << ' ' << a.real();
      else
        std::cout << ' ' << std::setprecision(8) << a.real();
    }
    std::cout << '\n';
    // second independent source where the library has one
    std::optional<FourierSeries> other;
    if (label == "11a") other = curve_coefficients(curve_11a(), N);
    if (other) {
      const std::size_t bad = first_mismatch(f, *other, N);
      std::cout << "  cross-check vs " << to_string(other->source) << " up to n = " << N << ": "
                << (bad ? "MISMATCH at n = " + std::to_string(bad) : std::string("identical")) << '\n';
      ok = ok && bad == 0;
    }
    std::ostringstream rec;
    write_newform(rec, f);
    doc.push_back(json::parse(rec.str()));
  }
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) throw ConfigError("cannot write " + o.out);
    for (const auto& r : doc) out << r.dump() << '\n';
  }
  return ok ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------- generators

int cmd_generators(const Common& o, unsigned checks) {
  const FareySymbol fs = farey_symbol(o.level);
  std::cout << "Farey symbol for Gamma0(" << o.level << "): " << fs.vertices.size() << " vertices, " << fs.num_even()
            << " even, " << fs.num_odd() << " odd, " << fs.generators.size() << " generators\n  vertices:";
  for (const auto& v : fs.vertices) std::cout << ' ' << (v.den == 0 ? (v.num < 0 ? "-inf" : "inf") : std::to_string(v.num) + "/" + std::to_string(v.den));
  std::cout << '\n';
  bool ok = true;
  json gens = json::array();
  for (std::size_t g = 0; g < fs.generators.size(); ++g) {
    const auto& m = fs.generators[g];
    const bool member = m.det() == 1 && m.in_gamma0(o.level);
    ok = ok && member;
    std::cout << "  " << std::setw(4) << fs.generator_names[g] << "  " << m.str() << (member ? "" : "  NOT IN GAMMA0") << '\n';
    gens.push_back({{"name", fs.generator_names[g]}, {"matrix", m.str()}, {"member", member}});
  }
  const bool index_ok = fs.polygon_index() == index_gamma0(o.level);
  ok = ok && index_ok;
  std::cout << "  polygon index " << fs.polygon_index() << ", [SL2(Z):Gamma0(q)] = " << index_gamma0(o.level)
            << (index_ok ? "" : "  MISMATCH") << '\n';
  // random words round-trip through the decomposition
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(fs.generators.size()) - 1);
  std::uniform_int_distribution<long> expo(-3, 3);
  std::uniform_int_distribution<int> len(1, 20);
  unsigned passed = 0;
  for (unsigned t = 0; t < checks; ++t) {
    GeneratorWord w;
    for (int k = len(rng); k > 0; --k) {
      long e = expo(rng);
      if (e == 0) e = 1;
      w.factors.emplace_back(pick(rng), e);
    }
    const GroupElement g = evaluate_word(w, fs);
    const GroupElement back = evaluate_word(word_decompose(g, fs), fs);
    if (back == g || back == -g) ++passed;
  }
  ok = ok && passed == checks;
  std::cout << "  word round trips: " << passed << "/" << checks << '\n' << (ok ? "verification passed" : "VERIFICATION FAILED") << '\n';
  emit(o.out, {{"level", o.level},
               {"fingerprint", fingerprint_of("generators;q=" + std::to_string(o.level))},
               {"generators", gens},
               {"polygon_index", fs.polygon_index()},
               {"index", index_gamma0(o.level)},
               {"round_trips", passed},
               {"checks", checks},
               {"ok", ok}});
  return ok ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------- integral

int cmd_integral(const Common& o, const std::string& cusp_text) {
  const CuspFraction r = parse_cusp(cusp_text);
  if (r.c % o.level != 0) throw ConfigError("cusp " + cusp_text + ": level " + std::to_string(o.level) + " must divide c");
  const FareySymbol fs = farey_symbol(o.level);
  const auto labels = o.labels();
  EvalParams p{o.L, 0, o.tol};
  // planned_key only needs levels and labels; size the forms for both routes
  std::vector<FourierSeries> stub;
  for (const auto& l : labels) {
    FourierSeries f;
    f.level = static_cast<int>(o.level);
    f.label = l;
    stub.push_back(f);
  }
  const CacheKey key = GeneratorCache::planned_key(fs, stub, p);
  const std::size_t direct_terms = CoefficientTables::required_terms(o.L, 1.0 / static_cast<double>(r.c), o.tol);
  const auto forms = load_forms(o.level, labels, std::max(key.N, direct_terms));
  const GeneratorCache cache = obtain_cache(fs, forms, p, o.cache);
  const GeneratorWord w = word_decompose(cusp_to_matrix(r), fs);
  const TruncatedJSeries J = word_to_j(w, cache);
  std::cout << "J at " << r.a << "/" << r.c << " (d = " << r.d << "), word " << to_string(w, fs) << '\n';
  json coeffs = json::object();
  for (std::size_t i = 0; i < J.size(); ++i) {
    const Word v = J.word_at(i);
    if (v.empty()) continue;
    std::cout << "  I(" << v.str() << ") = " << fmt(J.coeffs()[i]) << "   (err <= " << J.errors()[i] << ")\n";
    coeffs[v.str()] = to_json(J.coeffs()[i]);
  }
  json doc{{"cusp", {r.a, r.c}},
           {"config", key.describe()},
           {"fingerprint", fingerprint_of(key.describe() + ";cusp=" + cusp_text)},
           {"word", to_string(w, fs)},
           {"coefficients", coeffs}};
  int rc = kOk;
  if (o.oracle) {
    const CoefficientTables tables(forms, o.L, direct_terms);
    const TruncatedJSeries D = cusp_j_direct(r, tables, o.tol);
    const double res = max_abs_difference(J, D);
    const double limit = std::max(1e-8, 10 * o.tol);
    std::cout << "oracle (direct evaluation) residual " << res << (res <= limit ? " <= " : " > ") << limit << '\n';
    doc["oracle_residual"] = res;
    doc["oracle_ok"] = res <= limit;
    if (res > limit) rc = kVerificationFailure;
  }
  emit(o.out, doc);
  return rc;
}

// ---------------------------------------------------------------- sample

int cmd_sample(const Common& o, const std::string& format) {
  const std::vector<Word> words = parse_words(o.words.empty() ? "a" : o.words);
  const Ordering ord = parse_ordering(o.ordering);
  if (o.out.empty()) throw ConfigError("sample: --out is required");
  if (o.max_c < 1) throw ConfigError("sample: --max-c must be >= 1");
  if (count_T(o.level, o.max_c, ord) == 0)
    throw EmptyCuspFamily("empty cusp family: no c <= " + std::to_string(max_denominator(o.max_c, ord)) +
                          " divisible by " + std::to_string(o.level));
  const FareySymbol fs = farey_symbol(o.level);
  const auto labels = o.labels();
  EvalParams p{o.L, 0, o.tol};
  std::vector<FourierSeries> stub(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    stub[i].level = static_cast<int>(o.level);
    stub[i].label = labels[i];
  }
  const auto forms = load_forms(o.level, labels, GeneratorCache::planned_key(fs, stub, p).N);
  const GeneratorCache cache = obtain_cache(fs, forms, p, o.cache);
  const SampleSet set = batch_evaluate(fs, cache, words, o.max_c, ord, std::max(1u, o.shards));
  SampleFormat f;
  if (format == "csv")
    f = SampleFormat::Csv;
  else if (format == "binary")
    f = SampleFormat::Binary;
  else
    throw ConfigError("unknown --format '" + format + "' (csv or binary)");
  write_samples(o.out, set, f);
  std::cout << "wrote " << set.samples.size() << " samples to " << o.out << "\n  config " << set.config.describe()
            << "\n  fingerprint " << set.config.fingerprint() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- moments

SampleSet load_checked(const std::string& path, const std::string& expect_fp) {
  SampleSet set;
  try {
    set = read_samples(path);
  } catch (const SampleFormatError& e) {
    throw ConfigError(e.what());
  }
  if (!expect_fp.empty() && expect_fp != set.config.fingerprint())
    throw ConfigError("sample file " + path + " has fingerprint " + set.config.fingerprint() + ", expected " + expect_fp);
  if (set.samples.empty()) throw EmptyCuspFamily("empty cusp family: " + path + " holds no samples");
  return set;
}

Word pick_word(const SampleSet& set, const std::string& text) {
  if (text.empty()) return set.config.words.front();
  const auto w = parse_words(text);
  if (w.size() != 1) throw ConfigError("expected exactly one --word");
  try {
    set.word_index(w.front());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return w.front();
}

int cmd_moments(const std::string& path, const std::string& word_text, unsigned max_order, const std::string& expect_fp,
                const std::string& out) {
  const SampleSet raw = load_checked(path, expect_fp);
  const Word v = pick_word(raw, word_text);
  const SampleSet set = normalize(raw, Normalization::Y_M);
  const auto z = set.column(set.word_index(v));
  const MomentTable emp = empirical_moments(z, max_order);
  // scale fitted from m11: the limit moments are homogeneous of degree n in the Gram scale
  const std::size_t k = static_cast<std::size_t>(v.max_letter()) + 1;
  const MomentTable unit = predicted_moments(v, GramMatrix::identity(k), max_order);
  const double lambda = emp.at(1, 1).real() / unit.at(1, 1).real();
  std::cout << "word " << v.str() << ", " << z.size() << " samples, fingerprint " << raw.config.fingerprint()
            << "\n  fitted scale m11_emp / m11_pred = " << lambda << "\n  n1 n2  empirical                               predicted\n";
  json rows = json::array();
  for (unsigned a = 0; a <= max_order; ++a)
    for (unsigned b = 0; b <= max_order; ++b) {
      const cplx pred = unit.at(a, b) * std::pow(lambda, a);
      std::cout << "  " << std::setw(2) << a << ' ' << std::setw(2) << b << "  " << std::setw(38) << std::left
                << fmt(emp.at(a, b)) << std::right << "  " << fmt(pred) << '\n';
      rows.push_back({{"n1", a}, {"n2", b}, {"empirical", to_json(emp.at(a, b))}, {"predicted", to_json(pred)}});
    }
  const auto re = scale_free_ratios(emp), rp = scale_free_ratios(unit);
  std::cout << "  scale-free ratios m_nn / m_11^n (empirical vs predicted):\n";
  for (std::size_t i = 0; i < re.size(); ++i) std::cout << "    n = " << i + 2 << ": " << re[i] << " vs " << rp[i] << '\n';
  const double ce = carleman_partial(emp, max_order), cp = carleman_partial(unit, max_order);
  std::cout << "  Carleman partial sum to K = " << max_order << ": " << ce << " (empirical), " << cp << " (predicted, unit scale)\n";
  emit(out, {{"sample_file", path},
             {"fingerprint", raw.config.fingerprint()},
             {"config", raw.config.describe()},
             {"word", v.str()},
             {"normalization", "Y_M"},
             {"samples", z.size()},
             {"fitted_scale", lambda},
             {"moments", rows},
             {"ratios_empirical", re},
             {"ratios_predicted", rp},
             {"carleman_empirical", ce},
             {"carleman_predicted", cp}});
  return kOk;
}

// ---------------------------------------------------------------- fe-check

int cmd_fe_check(const Common& o, const std::string& cusp_text, const std::string& s_text, double threshold) {
  std::vector<cplx> grid;
  for (const auto& s : split_list(s_text)) grid.push_back(parse_complex(s));
  if (grid.empty()) throw ConfigError("fe-check: empty --s grid");
  const auto labels = o.labels();
  if (labels.size() > 2) throw ConfigError("fe-check takes one or two forms");
  const auto forms = load_forms(o.level, labels, 10000);
  json doc{{"level", o.level}, {"forms", labels}, {"s", json::array()}};
  double worst = 0;
  auto rel = [](cplx res, cplx scale) { return std::abs(res) / std::max(1.0, std::abs(scale)); };
  if (!cusp_text.empty()) {
    const CuspFraction r = parse_cusp(cusp_text);
    try {
      check_cusp(r, static_cast<int>(o.level));
    } catch (const CuspValidityError& e) {
      throw ConfigError(e.what());
    }
    const CuspFraction pr = partner_cusp(r);
    std::cout << "twisted functional equations at " << r.a << "/" << r.c << " (partner " << pr.a << "/" << pr.c << ")\n";
    for (const cplx s : grid) {
      json row{{"s", to_json(s)}};
      for (std::size_t i = 0; i < forms.size(); ++i) {
        const double e = rel(twisted_fe_residual(forms[i], r, s), completed_twisted_L(forms[i], r, s).value);
        const double split = std::abs(twisted_integral(forms[i], r, s, {0.8, 1e-13}) - twisted_integral(forms[i], r, s, {1.25, 1e-13}));
        std::cout << "  s = " << fmt(s) << "  " << labels[i] << ": FE residual " << e << ", split difference " << split << '\n';
        row[labels[i]] = {{"fe_residual", e}, {"split_difference", split}};
        worst = std::max({worst, e, split});
      }
      if (forms.size() == 2) {
        const double e = rel(twisted_fe_residual2(forms[0], forms[1], r, s), completed_twisted_L2(forms[0], forms[1], r, s).value);
        std::cout << "  s = " << fmt(s) << "  length 2: FE residual " << e << '\n';
        row["length2"] = e;
        worst = std::max(worst, e);
      }
      doc["s"].push_back(row);
    }
    doc["cusp"] = {r.a, r.c};
  } else {
    const FEReport rep = untwisted_FE_check(forms.front(), forms.back(), grid);
    std::cout << "untwisted functional equations, eps = " << fmt(rep.eps1) << (rep.eps1_fitted ? " (fitted)" : "") << ", "
              << fmt(rep.eps2) << (rep.eps2_fitted ? " (fitted)" : "") << "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::cout << "  s = " << fmt(grid[i]) << ": length 1 " << rep.residual1[i] << ", length 2 " << rep.residual2[i] << '\n';
      doc["s"].push_back({{"s", to_json(grid[i])}, {"length1", rep.residual1[i]}, {"length2", rep.residual2[i]}});
    }
    worst = rep.max_residual();
    doc["eps"] = {to_json(rep.eps1), to_json(rep.eps2)};
  }
  const bool ok = worst <= threshold;
  std::cout << "max residual " << worst << (ok ? " <= " : " > ") << threshold << '\n';
  doc["max_residual"] = worst;
  doc["ok"] = ok;
  doc["fingerprint"] = fingerprint_of(doc["forms"].dump() + ";q=" + std::to_string(o.level) + ";cusp=" + cusp_text + ";s=" + s_text);
  emit(o.out, doc);
  return ok ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------- shuffle-check

int cmd_shuffle_check(const std::string& path, const std::string& pairs_text, double threshold, const std::string& expect_fp,
                      const std::string& out) {
  const SampleSet set = load_checked(path, expect_fp);
  json doc{{"sample_file", path}, {"fingerprint", set.config.fingerprint()}, {"pairs", json::array()}};
  bool ok = true;
  for (const auto& pair : split_list(pairs_text)) {
    const auto colon = pair.find(':');
    if (colon == std::string::npos) throw ConfigError("pair '" + pair + "' is not of the form u:w");
    const auto uw = parse_words(pair.substr(0, colon) + "," + pair.substr(colon + 1));
    if (uw.size() != 2) throw ConfigError("pair '" + pair + "' is not of the form u:w");
    const NCPolynomial sh = shuffle(uw[0], uw[1]);
    std::vector<std::pair<std::size_t, double>> terms;
    try {
      for (const auto& [x, c] : sh.terms()) terms.emplace_back(set.word_index(x), c.get_d());
      const std::size_t iu = set.word_index(uw[0]), iw = set.word_index(uw[1]);
      double worst = 0;
      long wa = 0, wc = 0;
      for (const auto& s : set.samples) {
        const cplx prod = s.values[iu] * s.values[iw];
        cplx rhs = 0;
        for (const auto& [i, c] : terms) rhs += c * s.values[i];
        const double r = std::abs(prod - rhs) / std::max(1.0, std::abs(prod));
        if (r > worst) {
          worst = r;
          wa = s.a;
          wc = s.c;
        }
      }
      const bool pass = worst <= threshold;
      ok = ok && pass;
      std::cout << "  " << uw[0].str() << " x " << uw[1].str() << ": worst relative residual " << worst << " at " << wa << "/" << wc
                << (pass ? "" : "  FAIL") << '\n';
      doc["pairs"].push_back({{"u", uw[0].str()}, {"w", uw[1].str()}, {"worst", worst}, {"at", {wa, wc}}, {"ok", pass}});
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(e.what()) + " (needed by pair " + pair + ")");
    }
  }
  std::cout << set.samples.size() << " cusps, " << (ok ? "all pairs within " : "FAILED, threshold ") << threshold << '\n';
  doc["ok"] = ok;
  emit(out, doc);
  return ok ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------- hist

int cmd_hist(const std::string& path, const std::string& word_text, const std::string& bins, const std::string& bounds,
             const std::string& norm, const std::string& expect_fp, const std::string& out) {
  const SampleSet raw = load_checked(path, expect_fp);
  const Word v = pick_word(raw, word_text);
  SampleSet set = raw;
  if (norm == "Y_M")
    set = normalize(raw, Normalization::Y_M);
  else if (norm == "Z_M")
    set = normalize(raw, Normalization::Z_M);
  else if (norm != "raw")
    throw ConfigError("unknown --normalization '" + norm + "' (Y_M, Z_M or raw)");
  const auto b = split_list(bins), x = split_list(bounds);
  if (b.size() != 2 || x.size() != 4) throw ConfigError("--bins takes nx,ny and --bounds xmin,xmax,ymin,ymax");
  Histogram2D h;
  try {
    h = histogram2d(set.column(set.word_index(v)), std::stoul(b[0]), std::stoul(b[1]), std::stod(x[0]), std::stod(x[1]),
                    std::stod(x[2]), std::stod(x[3]));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  h.meta = "fingerprint=" + raw.config.fingerprint() + ";word=" + v.str() + ";normalization=" + norm +
           ";samples=" + std::to_string(set.samples.size()) + ";color_scale=log";
  if (out.empty()) {
    write_histogram_csv(std::cout, h);
  } else {
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write " + out);
    write_histogram_csv(f, h);
    std::cout << "histogram " << h.nx << "x" << h.ny << ", " << h.total() << " in range, " << h.outside << " outside -> " << out << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- conjecture

int cmd_conjecture(unsigned n_max, const std::string& out) {
  if (n_max < 1) throw ConfigError("conjecture: n_max must be >= 1");
  bool ok = true;
  json rows = json::array();
  std::cout << "  n  m_nn (orthonormal pair)                    binom(2n,n)^-1 sec^(2n)(0)   equal\n";
  for (unsigned n = 1; n <= n_max; ++n) {
    const ConjectureRow r = conjecture_check(n);
    ok = ok && r.equal;
    std::cout << std::setw(3) << n << "  " << std::setw(42) << std::left << r.moment.get_str() << std::right << ' '
              << std::setw(28) << r.secant_ratio.get_str() << "  " << (r.equal ? "yes" : "NO") << '\n';
    rows.push_back({{"n", n},
                    {"coefficient_square_sum", r.lhs.get_str()},
                    {"secant_side", r.rhs.get_str()},
                    {"moment", r.moment.get_str()},
                    {"secant_ratio", r.secant_ratio.get_str()},
                    {"equal", r.equal}});
  }
  emit(out, {{"fingerprint", fingerprint_of("conjecture;n_max=" + std::to_string(n_max))}, {"rows", rows}, {"ok", ok}});
  return ok ? kOk : kVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noncommutative modular symbols: iterated integrals of weight-2 newforms, twisted multiple L-values and their statistics"};
  app.require_subcommand(1);
  Common o;

  auto* coeffs = app.add_subcommand("coeffs", "Fourier coefficients, validated and cross-checked");
  std::size_t N = 10000, show = 20;
  add_common(coeffs, o);
  coeffs->add_option("-n,--count", N, "number of coefficients")->capture_default_str();
  coeffs->add_option("--show", show, "coefficients printed")->capture_default_str();

  auto* gens = app.add_subcommand("generators", "Farey symbol and generators with a verification report");
  unsigned checks = 100;
  gens->add_option("--level", o.level)->capture_default_str();
  gens->add_option("--out", o.out);
  gens->add_option("--seed", o.seed, "seed for the random word round trips")->capture_default_str();
  gens->add_option("--checks", checks, "random word round trips")->capture_default_str();

  auto* integral = app.add_subcommand("integral", "J series at a cusp via the generator words");
  std::string cusp;
  add_common(integral, o);
  integral->add_option("cusp", cusp, "a/c")->required();
  integral->add_flag("--oracle", o.oracle, "compare with direct evaluation");

  auto* sample = app.add_subcommand("sample", "Evaluate configured words at every cusp of the family");
  std::string format = "binary";
  add_common(sample, o, true, true);
  sample->add_option("--format", format, "csv or binary")->capture_default_str();

  std::string file, word, expect_fp;
  auto* moments = app.add_subcommand("moments", "Empirical vs predicted moments of a sample file");
  unsigned order = 4;
  moments->add_option("file", file)->required();
  moments->add_option("--word", word);
  moments->add_option("--max-order", order)->capture_default_str();
  moments->add_option("--fingerprint", expect_fp, "refuse files with another config fingerprint");
  moments->add_option("--out", o.out);

  auto* fe = app.add_subcommand("fe-check", "Functional-equation residuals");
  std::string s_grid = "0.7,1.0,1.3,1+2i";
  double threshold = 1e-6;
  add_common(fe, o);
  fe->add_option("--cusp", cusp, "a/c; omitted = untwisted");
  fe->add_option("--s", s_grid)->capture_default_str();
  fe->add_option("--threshold", threshold)->capture_default_str();

  auto* shc = app.add_subcommand("shuffle-check", "Per-cusp shuffle relation on a sample file");
  std::string pairs = "a:b";
  double sthreshold = 1e-6;
  shc->add_option("file", file)->required();
  shc->add_option("--pairs", pairs, "u:w,...")->capture_default_str();
  shc->add_option("--threshold", sthreshold)->capture_default_str();
  shc->add_option("--fingerprint", expect_fp);
  shc->add_option("--out", o.out);

  auto* hist = app.add_subcommand("hist", "2D histogram CSV of normalized values");
  std::string bins = "100,100", bounds = "-3,3,-3,3", norm = "Y_M";
  hist->add_option("file", file)->required();
  hist->add_option("--word", word);
  hist->add_option("--bins", bins)->capture_default_str();
  hist->add_option("--bounds", bounds)->capture_default_str();
  hist->add_option("--normalization", norm, "Y_M, Z_M or raw")->capture_default_str();
  hist->add_option("--fingerprint", expect_fp);
  hist->add_option("--out", o.out);

  auto* conj = app.add_subcommand("conjecture", "Moment table vs the secant numbers, exact");
  unsigned n_max = 10;
  conj->add_option("n_max", n_max)->capture_default_str();
  conj->add_option("--out", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*coeffs) return cmd_coeffs(o, N, show);
    if (*gens) return cmd_generators(o, checks);
    if (*integral) return cmd_integral(o, cusp);
    if (*sample) return cmd_sample(o, format);
    if (*moments) return cmd_moments(file, word, order, expect_fp, o.out);
    if (*fe) return cmd_fe_check(o, cusp, s_grid, threshold);
    if (*shc) return cmd_shuffle_check(file, pairs, sthreshold, expect_fp, o.out);
    if (*hist) return cmd_hist(file, word, bins, bounds, norm, expect_fp, o.out);
    if (*conj) return cmd_conjecture(n_max, o.out);
  } catch (const InvariantViolation& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const FrickeFitError& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
