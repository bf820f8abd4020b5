#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace gendec {

// Canonical order female < male drives every tie-break in the library.
enum class Gender : int { kFemale = 0, kMale = 1 };

inline constexpr std::array<Gender, 2> kGenders = {Gender::kFemale, Gender::kMale};

inline constexpr int index_of(Gender g) { return static_cast<int>(g); }

std::string_view to_string(Gender g);
// Accepts exactly "female" / "male".
std::optional<Gender> parse_gender(std::string_view text);

enum class NamePart { kFirst, kLast, kFull };
std::string_view to_string(NamePart p);
std::optional<NamePart> parse_name_part(std::string_view text);

enum class InputVariant { kOriginal, kConverted };
std::string_view to_string(InputVariant v);
std::optional<InputVariant> parse_input_variant(std::string_view text);

/// One corpus row. All three scripts are family-first; only the romaji
/// column separates the parts (with exactly one space).
struct NameRecord {
  std::string romaji;    // display casing kept, e.g. "Tamai Kazuyoshi"
  std::string kanji;     // e.g. 玉井和善
  std::string hiragana;  // e.g. たまいかずよし
  Gender gender = Gender::kFemale;

  bool operator==(const NameRecord&) const = default;
};

inline constexpr std::string_view kCorpusHeader = "romaji,kanji,hiragana,gender";

/// Lowercases cased letters, trims and collapses whitespace runs to one space.
std::string normalize_romaji(std::string_view raw);

struct RomajiParts {
  std::string family;
  std::string given;
};

/// Splits a romaji full name into its two tokens. Throws MalformedName unless
/// there is exactly one space with non-empty ASCII-letter tokens either side.
RomajiParts split_romaji(std::string_view romaji);

/// Validates all NameRecord invariants; throws MalformedName on violation.
void validate(const NameRecord& record);

NameRecord parse_csv_row(std::string_view line);
std::string to_csv_row(const NameRecord& record);

class ReadingDictionary;

/// Normalized romaji for the requested part. The converted variant
/// transliterates the kanji through `dict` and throws UnknownKanji when the
/// part cannot be resolved; MissingDictionary when `dict` is null.
std::string split_parts(const NameRecord& record, NamePart part, InputVariant variant,
                        const ReadingDictionary* dict = nullptr);

}  // namespace gendec
