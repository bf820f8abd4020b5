#include "gendec/name_core.hpp"

#include <vector>

#include "gendec/error.hpp"
#include "gendec/translit.hpp"
#include "gendec/utf8.hpp"

namespace gendec {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedName: return "MalformedName";
    case ErrorCode::kMissingDictionary: return "MissingDictionary";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kLabelError: return "LabelError";
    case ErrorCode::kUnknownKana: return "UnknownKana";
    case ErrorCode::kUnknownKanji: return "UnknownKanji";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kRatioError: return "RatioError";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kMissingIdf: return "MissingIdf";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmpty: return "Empty";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string_view to_string(Gender g) { return g == Gender::kFemale ? "female" : "male"; }

std::optional<Gender> parse_gender(std::string_view text) {
  if (text == "female") return Gender::kFemale;
  if (text == "male") return Gender::kMale;
  return std::nullopt;
}

std::string_view to_string(NamePart p) {
  switch (p) {
    case NamePart::kFirst: return "first";
    case NamePart::kLast: return "last";
    case NamePart::kFull: return "full";
  }
  return "full";
}

std::optional<NamePart> parse_name_part(std::string_view text) {
  if (text == "first") return NamePart::kFirst;
  if (text == "last") return NamePart::kLast;
  if (text == "full") return NamePart::kFull;
  return std::nullopt;
}

std::string_view to_string(InputVariant v) {
  return v == InputVariant::kOriginal ? "original" : "converted";
}

std::optional<InputVariant> parse_input_variant(std::string_view text) {
  if (text == "original") return InputVariant::kOriginal;
  if (text == "converted") return InputVariant::kConverted;
  return std::nullopt;
}

namespace {

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' || cp == U'\v' ||
         cp == 0x00A0 || cp == 0x3000;
}

// Simple case mapping for ASCII, Latin-1 and Latin Extended-A, which covers
// every romanization scheme in practical use (including macron vowels).
char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x17F) {
    if (cp == 0x130) return U'i';
    if (cp == 0x131 || cp == 0x138 || cp == 0x149 || cp == 0x17F) return cp;
    const bool odd_upper = (cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E);
    if (odd_upper) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  return cp;
}

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::string normalize_romaji(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char32_t cp : utf8::decode(raw)) {
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    utf8::append(out, to_lower(cp));
  }
  return out;
}

RomajiParts split_romaji(std::string_view romaji) {
  const auto space = romaji.find(' ');
  if (space == std::string_view::npos || romaji.find(' ', space + 1) != std::string_view::npos) {
    throw Error(ErrorCode::kMalformedName,
                "romaji must contain exactly one space: \"" + std::string(romaji) + "\"");
  }
  RomajiParts parts{std::string(romaji.substr(0, space)), std::string(romaji.substr(space + 1))};
  for (const auto* token : {&parts.family, &parts.given}) {
    if (token->empty()) {
      throw Error(ErrorCode::kMalformedName, "empty name part in \"" + std::string(romaji) + "\"");
    }
    for (char c : *token) {
      if (!is_ascii_letter(c)) {
        throw Error(ErrorCode::kMalformedName,
                    "romaji must be ASCII letters: \"" + std::string(romaji) + "\"");
      }
    }
  }
  return parts;
}

void validate(const NameRecord& record) {
  split_romaji(record.romaji);
  for (const auto* field : {&record.kanji, &record.hiragana}) {
    if (field->empty()) throw Error(ErrorCode::kMalformedName, "empty kanji or hiragana field");
    for (char32_t cp : utf8::decode(*field)) {
      if (is_space(cp) || cp == U',') {
        throw Error(ErrorCode::kMalformedName, "separator inside \"" + *field + "\"");
      }
    }
  }
}

NameRecord parse_csv_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto fields = split_fields(line);
  if (fields.size() != 4) {
    throw Error(ErrorCode::kSchemaError,
                "expected 4 columns, got " + std::to_string(fields.size()));
  }
  const auto gender = parse_gender(fields[3]);
  if (!gender) throw Error(ErrorCode::kLabelError, "unknown gender \"" + std::string(fields[3]) + "\"");
  NameRecord record{std::string(fields[0]), std::string(fields[1]), std::string(fields[2]), *gender};
  validate(record);
  return record;
}

std::string to_csv_row(const NameRecord& record) {
  std::string row;
  row.reserve(record.romaji.size() + record.kanji.size() + record.hiragana.size() + 10);
  row.append(record.romaji).append(",").append(record.kanji).append(",");
  row.append(record.hiragana).append(",").append(to_string(record.gender));
  return row;
}

std::string split_parts(const NameRecord& record, NamePart part, InputVariant variant,
                        const ReadingDictionary* dict) {
  if (variant == InputVariant::kOriginal) {
    const auto parts = split_romaji(record.romaji);
    switch (part) {
      case NamePart::kFirst: return normalize_romaji(parts.given);
      case NamePart::kLast: return normalize_romaji(parts.family);
      case NamePart::kFull: return normalize_romaji(parts.family + " " + parts.given);
    }
  }
  if (dict == nullptr) {
    throw Error(ErrorCode::kMissingDictionary, "converted input requires a reading dictionary");
  }
  const auto converted = convert_kanji_name(record.kanji, *dict);
  const auto require = [&](const std::optional<std::string>& value, std::string_view role) {
    if (!value) {
      throw Error(ErrorCode::kUnknownKanji,
                  "no " + std::string(role) + " reading for " + record.kanji);
    }
    return normalize_romaji(*value);
  };
  switch (part) {
    case NamePart::kFirst: return require(converted.given, "given");
    case NamePart::kLast: return require(converted.family, "family");
    case NamePart::kFull:
      return require(converted.family, "family") + " " + require(converted.given, "given");
  }
  return {};
}

}  // namespace gendec
