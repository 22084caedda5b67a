// JSON persistence for GeneratorCache. Doubles are written with 17 significant
// digits, so a save/load round trip is bit-exact and independent of byte order.

#include <fstream>

#include "json.hpp"
#include "ncmod/iterint.hpp"

namespace ncmod {

namespace {

using nlohmann::json;

json series_to_json(const TruncatedJSeries& s) {
  json re = json::array(), im = json::array(), err = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    re.push_back(s.coeffs()[i].real());
    im.push_back(s.coeffs()[i].imag());
    err.push_back(s.errors()[i]);
  }
  return {{"re", re}, {"im", im}, {"err", err}};
}

TruncatedJSeries series_from_json(const json& j, std::size_t k, unsigned L) {
  TruncatedJSeries s(k, L);
  const auto &re = j.at("re"), &im = j.at("im"), &err = j.at("err");
  if (re.size() != s.size() || im.size() != s.size() || err.size() != s.size())
    throw std::runtime_error("generator cache: coefficient table has the wrong length");
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.coeffs()[i] = cplx(re[i].get<double>(), im[i].get<double>());
    s.errors()[i] = err[i].get<double>();
  }
  return s;
}

json key_to_json(const CacheKey& k) {
  return {{"q", k.q}, {"forms", k.labels}, {"L", k.L}, {"N", k.N}, {"tol", k.tol}};
}

CacheKey key_from_json(const json& j) {
  CacheKey k;
  k.q = j.at("q").get<long>();
  k.labels = j.at("forms").get<std::vector<std::string>>();
  k.L = j.at("L").get<unsigned>();
  k.N = j.at("N").get<std::size_t>();
  k.tol = j.at("tol").get<double>();
  return k;
}

}  // namespace

void GeneratorCache::save(const std::string& path) const {
  json doc;
  doc["format"] = "ncmod-generator-cache";
  doc["version"] = kFormatVersion;
  doc["key"] = key_to_json(key_);
  json gens = json::array();
  for (std::size_t g = 0; g < fwd_.size(); ++g)
    gens.push_back({{"forward", series_to_json(fwd_[g])}, {"inverse", series_to_json(inv_[g])}});
  doc["generators"] = std::move(gens);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write generator cache " + path);
  out << doc.dump() << '\n';
  if (!out) throw std::runtime_error("write failed for generator cache " + path);
}

GeneratorCache GeneratorCache::load(const std::string& path, const CacheKey& expected) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open generator cache " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("generator cache " + path + " is not valid JSON: " + e.what());
  }
  if (doc.value("format", "") != "ncmod-generator-cache")
    throw std::runtime_error("generator cache " + path + ": unknown format");
  if (doc.value("version", -1) != kFormatVersion)
    throw std::runtime_error("generator cache " + path + ": format version " + std::to_string(doc.value("version", -1)) +
                             ", expected " + std::to_string(kFormatVersion));
  GeneratorCache cache;
  cache.key_ = key_from_json(doc.at("key"));
  if (!(cache.key_ == expected))
    throw std::runtime_error("generator cache " + path + " was built for " + cache.key_.describe() + ", requested " +
                             expected.describe());
  const std::size_t k = cache.key_.labels.size();
  for (const auto& g : doc.at("generators")) {
    cache.fwd_.push_back(series_from_json(g.at("forward"), k, cache.key_.L));
    cache.inv_.push_back(series_from_json(g.at("inverse"), k, cache.key_.L));
  }
  return cache;
}

}  // namespace ncmod
