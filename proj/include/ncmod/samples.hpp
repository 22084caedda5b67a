#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncmod/iterint.hpp"
#include "ncmod/modgroup.hpp"
#include "ncmod/shuffle.hpp"

namespace ncmod {

struct SampleConfig {
  long q = 0;
  std::vector<std::string> labels;  // letter i of every word is form labels[i]
  std::vector<Word> words;
  Ordering ordering = Ordering::CLeM;
  long M = 0;
  unsigned L = 0;
  std::size_t N = 0;
  double tol = 0;

  // canonical "key=value;..." text; the fingerprint is its 64-bit FNV-1a hash in hex
  std::string describe() const;
  std::string fingerprint() const;
  static SampleConfig parse(const std::string& description);
  bool operator==(const SampleConfig&) const = default;
};

struct Sample {
  long a = 0;
  long c = 1;
  std::vector<cplx> values;  // raw I_{i inf}^{a/c}(w) for each configured word
};

struct SampleSet {
  SampleConfig config;
  std::vector<Sample> samples;

  std::size_t word_index(const Word& w) const;  // throws if w is not configured
  std::vector<cplx> column(std::size_t word) const;
};

class EmptyCuspFamily : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class SampleFormatError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// For every r in T(M): cusp_to_matrix -> word_decompose -> word_to_j, keeping the
// coefficients of the configured words. Samples are in enumeration order and do
// not depend on the shard count.
SampleSet batch_evaluate(const FareySymbol& fs, const GeneratorCache& cache, const std::vector<Word>& words, long M,
                         Ordering ordering, unsigned shards);

enum class SampleFormat { Csv, Binary };

// CSV: "#ncmod-samples 1", "#config <describe()>;fingerprint=<hex>", a header row,
// then a,c,re0,im0,re1,im1,... with 17 significant digits.
// Binary: magic "NCMSMP01", u32 config length + text, u64 record count, u32 word
// count, then per record a u32 byte length followed by i64 a, i64 c and the
// values as IEEE-754 doubles; every integer and double is little-endian.
void write_samples(const std::string& path, const SampleSet& set, SampleFormat format);
SampleSet read_samples(const std::string& path);  // format detected from the first bytes

std::uint64_t fnv1a64(const std::string& text);

}  // namespace ncmod
