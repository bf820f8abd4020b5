#include "gendec/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gendec/error.hpp"
#include "gendec/utf8.hpp"

namespace gendec {

std::string_view to_string(TokenMode mode) { return mode == TokenMode::kWord ? "word" : "char_ngram"; }

std::optional<TokenMode> parse_token_mode(std::string_view text) {
  if (text == "word") return TokenMode::kWord;
  if (text == "char_ngram" || text == "char") return TokenMode::kCharNgram;
  return std::nullopt;
}

std::string_view to_string(Weighting w) { return w == Weighting::kCount ? "count" : "tfidf"; }

std::optional<Weighting> parse_weighting(std::string_view text) {
  if (text == "count") return Weighting::kCount;
  if (text == "tfidf") return Weighting::kTfidf;
  return std::nullopt;
}

void TokenizerConfig::validate() const {
  if (ngram_min < 1 || ngram_min > ngram_max || ngram_max > 8) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram range must satisfy 1 <= min <= max <= 8");
  }
}

std::vector<std::string> tokenize(std::string_view doc, const TokenizerConfig& config) {
  std::vector<std::string> out;
  const auto lo = static_cast<std::size_t>(config.ngram_min);
  const auto hi = static_cast<std::size_t>(config.ngram_max);
  if (config.mode == TokenMode::kWord) {
    std::vector<std::string_view> words;
    std::size_t start = 0;
    while (start <= doc.size()) {
      const auto space = std::min(doc.find(' ', start), doc.size());
      if (space > start) words.push_back(doc.substr(start, space - start));
      start = space + 1;
    }
    for (std::size_t n = lo; n <= hi; ++n) {
      for (std::size_t i = 0; i + n <= words.size(); ++i) {
        std::string gram(words[i]);
        for (std::size_t j = 1; j < n; ++j) gram.append(" ").append(words[i + j]);
        out.push_back(std::move(gram));
      }
    }
    return out;
  }
  auto cps = utf8::decode(doc);
  std::replace(cps.begin(), cps.end(), U' ', U'_');
  for (std::size_t n = lo; n <= hi; ++n) {
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      out.push_back(utf8::encode(std::u32string_view(cps).substr(i, n)));
    }
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::optional<std::vector<double>> idf,
                       TokenizerConfig tokenizer)
    : tokens_(std::move(tokens)), idf_(std::move(idf)), tokenizer_(tokenizer) {
  tokenizer_.validate();
  if (idf_ && idf_->size() != tokens_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "idf length differs from vocabulary size");
  }
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i > 0 && !(tokens_[i - 1] < tokens_[i])) {
      throw Error(ErrorCode::kInvalidArgument, "vocabulary tokens must be sorted and unique");
    }
    if (idf_ && !((*idf_)[i] > 0.0)) throw Error(ErrorCode::kInvalidArgument, "idf weights must be positive");
    index_.emplace(tokens_[i], i);
  }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double FeatureMatrix::at(std::size_t r, std::size_t c) const {
  const auto cols_in_row = row_cols(r);
  const auto it = std::lower_bound(cols_in_row.begin(), cols_in_row.end(), static_cast<std::uint32_t>(c));
  if (it == cols_in_row.end() || *it != c) return 0.0;
  return row_values(r)[static_cast<std::size_t>(it - cols_in_row.begin())];
}

void FeatureMatrix::push_row(std::span<const std::pair<std::uint32_t, double>> entries) {
  for (const auto& [c, v] : entries) {
    col_idx.push_back(c);
    values.push_back(v);
  }
  row_ptr.push_back(values.size());
  ++rows;
}

Vocabulary fit_vocabulary(std::span<const std::string> docs, const TokenizerConfig& config, bool with_idf) {
  config.validate();
  if (docs.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot fit a vocabulary on zero documents");
  std::map<std::string, std::size_t> document_frequency;
  for (const auto& doc : docs) {
    auto tokens = tokenize(doc, config);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++document_frequency[std::move(t)];
  }
  std::vector<std::string> tokens;
  std::vector<double> idf;
  tokens.reserve(document_frequency.size());
  const double n = static_cast<double>(docs.size());
  for (const auto& [token, df] : document_frequency) {
    tokens.push_back(token);
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df))) + 1.0);
  }
  return Vocabulary(std::move(tokens), with_idf ? std::optional(std::move(idf)) : std::nullopt, config);
}

FeatureMatrix transform(std::span<const std::string> docs, const Vocabulary& vocab, Weighting weighting) {
  if (weighting == Weighting::kTfidf && !vocab.idf()) {
    throw Error(ErrorCode::kMissingIdf, "TF-IDF weighting needs a vocabulary fitted with idf");
  }
  FeatureMatrix m;
  m.cols = vocab.size();
  std::vector<std::pair<std::uint32_t, double>> entries;
  for (const auto& doc : docs) {
    entries.clear();
    for (const auto& token : tokenize(doc, vocab.tokenizer())) {
      if (const auto idx = vocab.index_of(token)) entries.emplace_back(static_cast<std::uint32_t>(*idx), 1.0);
    }
    std::sort(entries.begin(), entries.end());
    // merge duplicates into counts
    std::size_t w = 0;
    for (std::size_t r = 0; r < entries.size(); ++r) {
      if (w > 0 && entries[w - 1].first == entries[r].first) {
        entries[w - 1].second += 1.0;
      } else {
        entries[w++] = entries[r];
      }
    }
    entries.resize(w);
    if (weighting == Weighting::kTfidf) {
      double norm_sq = 0.0;
      for (auto& [c, v] : entries) {
        v *= (*vocab.idf())[c];
        norm_sq += v * v;
      }
      if (norm_sq > 0.0) {
        const double norm = std::sqrt(norm_sq);
        for (auto& entry : entries) entry.second /= norm;
      }
    }
    m.push_row(entries);
  }
  return m;
}

}  // namespace gendec
