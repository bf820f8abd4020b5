#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gendec/name_core.hpp"
#include "gendec/translit.hpp"

namespace gendec {

/// One entry of a raw first-name or last-name list. Family entries carry no
/// gender; they are reused for both.
struct RawNamePart {
  std::string romaji;
  std::string hiragana;
  std::string kanji;
  std::optional<Gender> gender;
  NameRole role = NameRole::kGiven;

  bool operator==(const RawNamePart&) const = default;
};

inline constexpr std::string_view kRawHeader = "romaji,hiragana,kanji,gender,role";

/// Gender column: female/male for given names, "any" or empty for family names.
RawNamePart parse_raw_row(std::string_view line);
std::string to_raw_row(const RawNamePart& part);

// CSV readers expect the header on the first line and prefix errors with the
// 1-based line number.
std::vector<RawNamePart> read_raw_names(std::istream& in);
std::vector<NameRecord> read_corpus(std::istream& in);
void write_corpus(std::ostream& out, std::span<const NameRecord> records);

std::vector<NameRecord> read_corpus_file(const std::string& path);
void write_corpus_file(const std::string& path, std::span<const NameRecord> records);
std::vector<RawNamePart> read_raw_names_file(const std::string& path);

/// One row per distinct (kanji, gender); the first occurrence wins.
std::vector<RawNamePart> dedupe_first_names(std::span<const RawNamePart> rows);

enum class PairingMode { kOneToOne, kCrossK };
std::string_view to_string(PairingMode mode);
std::optional<PairingMode> parse_pairing_mode(std::string_view text);

struct PairingConfig {
  PairingMode mode = PairingMode::kOneToOne;
  std::size_t k = 1;  // family names per given name in cross-k mode
};

/// Joins given names with family names. One-to-one draws one family name per
/// given name with replacement; cross-k draws k distinct family names per
/// given name. Output follows the order of `firsts`.
std::vector<NameRecord> build_dataset(std::span<const RawNamePart> firsts, std::span<const RawNamePart> lasts,
                                      const PairingConfig& pairing, std::uint64_t seed);

struct SplitRatios {
  double train = 0.7;
  double val = 0.2;
  double test = 0.1;

  void validate() const;
};

struct DatasetSplits {
  std::vector<NameRecord> train;
  std::vector<NameRecord> val;
  std::vector<NameRecord> test;
};

/// Seeded shuffle then contiguous slicing at floor(n*train) and
/// floor(n*(train+val)). Stratified mode slices each gender separately
/// (female first) and concatenates.
DatasetSplits split_dataset(std::span<const NameRecord> records, const SplitRatios& ratios, std::uint64_t seed,
                            bool stratify = true);

/// Number of distinct kanji spellings per romaji given name, histogrammed.
struct HomonymHistogram {
  std::array<std::map<std::size_t, std::size_t>, 2> by_gender;  // indexed by index_of(Gender)
  std::size_t unaligned = 0;

  const std::map<std::size_t, std::size_t>& of(Gender g) const { return by_gender[index_of(g)]; }
};

HomonymHistogram homonym_stats(std::span<const NameRecord> records);

/// Kanji character counts over the selected name part, count descending then
/// code point ascending. Characters are UTF-8 encoded.
std::vector<std::pair<std::string, std::size_t>> char_frequency(std::span<const NameRecord> records, Gender gender,
                                                                NamePart part);

/// Fraction of male records; 0 for an empty corpus.
double male_fraction(std::span<const NameRecord> records);

}  // namespace gendec
