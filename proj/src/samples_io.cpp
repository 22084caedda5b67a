#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "ncmod/samples.hpp"

namespace ncmod {

namespace {

constexpr char kMagic[] = "NCMSMP01";
constexpr const char* kCsvTag = "#ncmod-samples 1";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <class T>
void put_le(std::ostream& out, T v) {
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(v);
  char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  out.write(buf, sizeof(T));
}

void put_double(std::ostream& out, double d) { put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(d)); }

template <class T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw SampleFormatError("sample file truncated");
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(buf[i]) << (8 * i);
  return static_cast<T>(u);
}

double get_double(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string SampleConfig::describe() const {
  std::ostringstream os;
  os << "q=" << q << ";forms=";
  for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? "," : "") << labels[i];
  os << ";words=";
  for (std::size_t i = 0; i < words.size(); ++i) os << (i ? "," : "") << words[i].str();
  os << ";ordering=" << to_string(ordering) << ";M=" << M << ";L=" << L << ";N=" << N << ";tol=" << fmt17(tol);
  return os.str();
}

std::string SampleConfig::fingerprint() const {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(describe());
  return os.str();
}

SampleConfig SampleConfig::parse(const std::string& description) {
  std::map<std::string, std::string> kv;
  for (const auto& item : split(description, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw SampleFormatError("config entry without '=': " + item);
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto need = [&](const char* k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw SampleFormatError(std::string("config lacks ") + k);
    return it->second;
  };
  SampleConfig c;
  try {
    c.q = std::stol(need("q"));
    if (!need("forms").empty()) c.labels = split(need("forms"), ',');
    for (const auto& w : split(need("words"), ',')) c.words.push_back(Word::parse(w));
    c.ordering = parse_ordering(need("ordering"));
    c.M = std::stol(need("M"));
    c.L = static_cast<unsigned>(std::stoul(need("L")));
    c.N = std::stoull(need("N"));
    c.tol = std::stod(need("tol"));
  } catch (const SampleFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw SampleFormatError(std::string("unreadable config: ") + e.what());
  }
  if (auto it = kv.find("fingerprint"); it != kv.end() && it->second != c.fingerprint())
    throw SampleFormatError("config fingerprint " + it->second + " does not match its contents (" + c.fingerprint() + ")");
  return c;
}

std::size_t SampleSet::word_index(const Word& w) const {
  for (std::size_t i = 0; i < config.words.size(); ++i)
    if (config.words[i] == w) return i;
  throw std::invalid_argument("sample set has no values for word " + w.str());
}

std::vector<cplx> SampleSet::column(std::size_t word) const {
  if (word >= config.words.size()) throw std::out_of_range("SampleSet::column");
  std::vector<cplx> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.values[word]);
  return out;
}

SampleSet batch_evaluate(const FareySymbol& fs, const GeneratorCache& cache, const std::vector<Word>& words, long M,
                         Ordering ordering, unsigned shards) {
  const CacheKey& key = cache.key();
  if (key.q != fs.q) throw std::invalid_argument("batch_evaluate: cache level differs from the Farey symbol");
  if (words.empty()) throw std::invalid_argument("batch_evaluate: no words requested");
  for (const auto& w : words) {
    if (w.empty() || w.size() > key.L)
      throw std::invalid_argument("batch_evaluate: word '" + w.str() + "' needs 1 <= length <= L = " + std::to_string(key.L));
    if (w.max_letter() >= key.labels.size())
      throw std::invalid_argument("batch_evaluate: word '" + w.str() + "' uses a letter beyond the form list");
  }
  SampleSet set;
  set.config = {key.q, key.labels, words, ordering, M, key.L, key.N, key.tol};
  const std::vector<CuspFraction> cusps = enumerate_T(fs.q, M, ordering);
  if (cusps.empty())
    throw EmptyCuspFamily("empty cusp family: no c <= " + std::to_string(max_denominator(M, ordering)) +
                          " divisible by " + std::to_string(fs.q));
  set.samples.resize(cusps.size());
  // bounded blocks keep the per-cusp series from accumulating in memory
  constexpr std::size_t kBlock = 1 << 15;
  for (std::size_t lo = 0; lo < cusps.size(); lo += kBlock) {
    const std::size_t hi = std::min(cusps.size(), lo + kBlock);
    const std::vector<CuspFraction> block(cusps.begin() + lo, cusps.begin() + hi);
    const std::vector<TruncatedJSeries> J = batch_series(block, fs, cache, shards);
    for (std::size_t i = 0; i < block.size(); ++i) {
      Sample& s = set.samples[lo + i];
      s.a = block[i].a;
      s.c = block[i].c;
      for (const auto& w : words) s.values.push_back(J[i][w]);
    }
  }
  return set;
}

void write_samples(const std::string& path, const SampleSet& set, SampleFormat format) {
  const std::size_t k = set.config.words.size();
  for (const auto& s : set.samples)
    if (s.values.size() != k) throw std::invalid_argument("write_samples: record width differs from the word count");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::string cfg = set.config.describe() + ";fingerprint=" + set.config.fingerprint();
  if (format == SampleFormat::Csv) {
    out << kCsvTag << "\n#config " << cfg << "\na,c";
    for (const auto& w : set.config.words) out << ",re_" << w.str() << ",im_" << w.str();
    out << '\n' << std::setprecision(17);
    for (const auto& s : set.samples) {
      out << s.a << ',' << s.c;
      for (const auto& v : s.values) out << ',' << v.real() << ',' << v.imag();
      out << '\n';
    }
  } else {
    out.write(kMagic, 8);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.size()));
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    put_le<std::uint64_t>(out, set.samples.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(k));
    const auto rec_bytes = static_cast<std::uint32_t>(16 + 16 * k);
    for (const auto& s : set.samples) {
      put_le<std::uint32_t>(out, rec_bytes);
      put_le<std::int64_t>(out, s.a);
      put_le<std::int64_t>(out, s.c);
      for (const auto& v : s.values) {
        put_double(out, v.real());
        put_double(out, v.imag());
      }
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

SampleSet read_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open sample file " + path);
  char head[8] = {};
  in.read(head, 8);
  SampleSet set;
  if (in.gcount() == 8 && std::memcmp(head, kMagic, 8) == 0) {
    const auto len = get_le<std::uint32_t>(in);
    std::string cfg(len, '\0');
    if (!in.read(cfg.data(), len)) throw SampleFormatError("sample file truncated in the config block");
    set.config = SampleConfig::parse(cfg);
    const auto count = get_le<std::uint64_t>(in);
    const auto k = get_le<std::uint32_t>(in);
    if (k != set.config.words.size()) throw SampleFormatError("record width disagrees with the configured words");
    set.samples.resize(count);
    for (auto& s : set.samples) {
      if (get_le<std::uint32_t>(in) != 16 + 16 * k) throw SampleFormatError("bad record length");
      s.a = get_le<std::int64_t>(in);
      s.c = get_le<std::int64_t>(in);
      s.values.resize(k);
      for (auto& v : s.values) {
        const double re = get_double(in);
        v = cplx(re, get_double(in));
      }
    }
    return set;
  }
  in.clear();
  in.seekg(0);
  std::string line;
  if (!std::getline(in, line) || line != kCsvTag) throw SampleFormatError(path + " is not an ncmod sample file");
  if (!std::getline(in, line) || line.rfind("#config ", 0) != 0) throw SampleFormatError(path + ": missing #config line");
  set.config = SampleConfig::parse(line.substr(8));
  const std::size_t k = set.config.words.size();
  std::getline(in, line);  // column header
  std::size_t lineno = 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 2 + 2 * k) throw SampleFormatError(path + ":" + std::to_string(lineno) + ": wrong field count");
    Sample s;
    try {
      s.a = std::stol(f[0]);
      s.c = std::stol(f[1]);
      for (std::size_t i = 0; i < k; ++i) s.values.emplace_back(std::stod(f[2 + 2 * i]), std::stod(f[3 + 2 * i]));
    } catch (const std::exception&) {
      throw SampleFormatError(path + ":" + std::to_string(lineno) + ": unparsable number");
    }
    set.samples.push_back(std::move(s));
  }
  return set;
}

}  // namespace ncmod
