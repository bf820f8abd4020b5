#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gendec/name_core.hpp"

namespace gendec {

/// Modified Hepburn romanization of hiragana (plus the prolonged-sound mark).
///
/// Yoon digraphs are matched first, っ doubles the following consonant (tch
/// before ch), ん is always "n", long vowels are spelled out and ー repeats the
/// previous vowel. Degenerate input (trailing っ, isolated small kana, leading
/// ー) is rendered with a literal fallback and counted in `warnings` when
/// given. Anything outside the table throws UnknownKana.
std::string kana_to_romaji(std::string_view kana, std::vector<std::string>* warnings = nullptr);

enum class NameRole { kFamily, kGiven };
std::string_view to_string(NameRole role);

struct Reading {
  std::string kana;
  std::uint64_t count = 0;

  bool operator==(const Reading&) const = default;
};

/// Whole-part kanji -> hiragana readings with observed counts, kept
/// separately for family and given parts.
class ReadingDictionary {
 public:
  static constexpr int kSchemaVersion = 1;

  void add(NameRole role, std::string_view kanji, std::string_view kana, std::uint64_t count = 1);

  bool contains(NameRole role, std::string_view kanji) const;

  /// Readings ordered best-first: count descending, then kana ascending.
  std::vector<Reading> readings(NameRole role, std::string_view kanji) const;

  /// Highest-count reading, ties to the lexicographically smallest kana.
  std::optional<std::string> best_reading(NameRole role, std::string_view kanji) const;

  std::size_t size(NameRole role) const { return table(role).size(); }
  bool empty() const { return family_.empty() && given_.empty(); }

  std::string to_json() const;
  static ReadingDictionary from_json(std::string_view text);

  bool operator==(const ReadingDictionary&) const = default;

 private:
  using Table = std::map<std::string, std::map<std::string, std::uint64_t>, std::less<>>;
  const Table& table(NameRole role) const { return role == NameRole::kFamily ? family_ : given_; }
  Table& table(NameRole role) { return role == NameRole::kFamily ? family_ : given_; }

  Table family_;
  Table given_;
};

struct AlignedName {
  std::string family_kanji;
  std::string given_kanji;
  std::string family_kana;
  std::string given_kana;
};

/// Shortest hiragana prefix (in code points) whose romanization equals the
/// lowercase romaji family token.
std::optional<std::size_t> align_hiragana(std::string_view hiragana, std::string_view family_romaji);

/// Splits records into family/given parts in every script.
///
/// The hiragana boundary comes from align_hiragana(). The kanji boundary is
/// not recorded in the corpus, so it is inferred from the record set: a true
/// family prefix (paired with its reading) is followed by many different
/// characters across records, while a spurious one is not. Ties fall back to
/// the most even kana-per-kanji split, then a two-character family name.
class PartAligner {
 public:
  explicit PartAligner(std::span<const NameRecord> records);

  std::optional<AlignedName> align(const NameRecord& record) const;

 private:
  std::unordered_map<std::string, std::size_t> branching_;
};

struct DictionaryBuild {
  ReadingDictionary dictionary;
  std::size_t skipped = 0;
};

/// Call with training records only.
DictionaryBuild build_reading_dictionary(std::span<const NameRecord> records, const PartAligner& aligner);
DictionaryBuild build_reading_dictionary(std::span<const NameRecord> records);

/// Throws UnknownKanji when the part has no entry for `role`.
std::string kanji_to_romaji(std::string_view kanji_part, NameRole role, const ReadingDictionary& dict);

struct ConvertedName {
  std::optional<std::string> family;
  std::optional<std::string> given;
};

/// Converts an unsplit kanji full name. The boundary is the longest family
/// prefix known to the dictionary whose remainder is a known given name; if
/// no such split exists, whichever single side resolves is returned.
ConvertedName convert_kanji_name(std::string_view kanji, const ReadingDictionary& dict);

struct ConsistencyReport {
  std::size_t matches = 0;
  std::size_t total = 0;
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(total); }
};

/// Fraction of records whose romanized hiragana equals the space-stripped
/// normalized romaji column.
ConsistencyReport romaji_consistency(std::span<const NameRecord> records);

}  // namespace gendec
