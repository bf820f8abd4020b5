#pragma once

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gendec/corpus.hpp"
#include "gendec/vectorize.hpp"

namespace test_support {

inline std::string fixture(const std::string& name) { return std::string(GENDEC_FIXTURES) + "/" + name; }

inline std::vector<gendec::NameRecord> sample_names() { return gendec::read_corpus_file(fixture("sample_names.csv")); }

inline std::vector<gendec::NameRecord> fixture_corpus() { return gendec::read_corpus_file(fixture("corpus.csv")); }

// Small dense-ish random matrix with values in {0, 1, 2, 3} for property tests.
inline gendec::FeatureMatrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols,
                                           double density = 0.5) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> value(1, 3);
  gendec::FeatureMatrix X;
  X.cols = cols;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::size_t c = 0; c < cols; ++c) {
      if (coin(gen) < density) entries.emplace_back(static_cast<std::uint32_t>(c), value(gen));
    }
    X.push_row(entries);
  }
  return X;
}

inline std::vector<gendec::Gender> random_labels(std::mt19937_64& gen, std::size_t n) {
  std::bernoulli_distribution male(0.5);
  std::vector<gendec::Gender> y(n);
  for (auto& g : y) g = male(gen) ? gendec::Gender::kMale : gendec::Gender::kFemale;
  return y;
}

}  // namespace test_support
