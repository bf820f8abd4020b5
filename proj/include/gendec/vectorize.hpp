#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gendec {

enum class TokenMode { kWord, kCharNgram };
std::string_view to_string(TokenMode mode);
std::optional<TokenMode> parse_token_mode(std::string_view text);

struct TokenizerConfig {
  TokenMode mode = TokenMode::kWord;
  int ngram_min = 1;
  int ngram_max = 1;

  static TokenizerConfig words() { return {TokenMode::kWord, 1, 1}; }
  static TokenizerConfig char_ngrams(int lo = 2, int hi = 4) { return {TokenMode::kCharNgram, lo, hi}; }

  /// Requires 1 <= ngram_min <= ngram_max <= 8.
  void validate() const;

  bool operator==(const TokenizerConfig&) const = default;
};

/// Word mode emits space-separated n-grams of name tokens; char mode slides
/// over code points with spaces rendered as '_'.
std::vector<std::string> tokenize(std::string_view doc, const TokenizerConfig& config);

enum class Weighting { kCount, kTfidf };
std::string_view to_string(Weighting w);
std::optional<Weighting> parse_weighting(std::string_view text);

class Vocabulary {
 public:
  Vocabulary() = default;
  /// `tokens` must be strictly increasing; `idf`, when present, one positive
  /// weight per token.
  Vocabulary(std::vector<std::string> tokens, std::optional<std::vector<double>> idf, TokenizerConfig tokenizer);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::optional<std::vector<double>>& idf() const { return idf_; }
  const TokenizerConfig& tokenizer() const { return tokenizer_; }

  std::optional<std::size_t> index_of(std::string_view token) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && idf_ == other.idf_ && tokenizer_ == other.tokenizer_;
  }

 private:
  std::vector<std::string> tokens_;
  std::optional<std::vector<double>> idf_;
  TokenizerConfig tokenizer_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Compressed sparse rows; column indices ascend within each row.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
  std::span<const std::uint32_t> row_cols(std::size_t r) const {
    return {col_idx.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }
  double at(std::size_t r, std::size_t c) const;

  /// Appends a row given (col, value) pairs in ascending column order.
  void push_row(std::span<const std::pair<std::uint32_t, double>> entries);

  bool operator==(const FeatureMatrix&) const = default;
};

/// Builds the lexicographically ordered vocabulary. With `with_idf`, stores
/// idf(t) = ln((1 + N) / (1 + df(t))) + 1. Throws EmptyCorpus on no docs.
Vocabulary fit_vocabulary(std::span<const std::string> docs, const TokenizerConfig& config, bool with_idf);

/// Count or L2-normalized TF-IDF rows; unseen tokens are dropped. TF-IDF
/// needs a vocabulary fitted with idf (MissingIdf otherwise).
FeatureMatrix transform(std::span<const std::string> docs, const Vocabulary& vocab, Weighting weighting);

}  // namespace gendec
