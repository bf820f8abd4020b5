#include "gendec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "gendec/error.hpp"
#include "gendec/rng.hpp"
#include "gendec/utf8.hpp"

namespace gendec {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (auto comma = line.find(','); comma != std::string_view::npos; comma = line.find(',', start)) {
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  fields.push_back(line.substr(start));
  return fields;
}

[[noreturn]] void rethrow_with_line(const Error& e, std::size_t line_no) {
  throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
}

template <typename Row, typename Parse>
std::vector<Row> read_csv(std::istream& in, std::string_view header, Parse parse) {
  std::vector<Row> rows;
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kSchemaError, "line 1: missing header, expected \"" + std::string(header) + "\"");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw Error(ErrorCode::kSchemaError, "line 1: expected header \"" + std::string(header) + "\"");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      rows.push_back(parse(line));
    } catch (const Error& e) {
      rethrow_with_line(e, line_no);
    }
  }
  return rows;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return in;
}

std::size_t slice_point(std::size_t n, double fraction) {
  // 0.7 + 0.2 is 0.8999..., so nudge before flooring
  return std::min(n, static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9)));
}

void slice_into(std::span<const NameRecord> shuffled, const SplitRatios& ratios, DatasetSplits& out) {
  const std::size_t n = shuffled.size();
  const std::size_t train_end = slice_point(n, ratios.train);
  const std::size_t val_end = std::max(train_end, slice_point(n, ratios.train + ratios.val));
  out.train.insert(out.train.end(), shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(train_end));
  out.val.insert(out.val.end(), shuffled.begin() + static_cast<std::ptrdiff_t>(train_end),
                 shuffled.begin() + static_cast<std::ptrdiff_t>(val_end));
  out.test.insert(out.test.end(), shuffled.begin() + static_cast<std::ptrdiff_t>(val_end), shuffled.end());
}

NameRecord join(const RawNamePart& family, const RawNamePart& given) {
  return NameRecord{family.romaji + " " + given.romaji, family.kanji + given.kanji, family.hiragana + given.hiragana,
                    *given.gender};
}

}  // namespace

RawNamePart parse_raw_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto fields = split_commas(line);
  if (fields.size() != 5) {
    throw Error(ErrorCode::kSchemaError, "expected 5 columns, got " + std::to_string(fields.size()));
  }
  RawNamePart part;
  part.romaji = std::string(fields[0]);
  part.hiragana = std::string(fields[1]);
  part.kanji = std::string(fields[2]);
  if (fields[4] == "family") {
    part.role = NameRole::kFamily;
    if (!fields[3].empty() && fields[3] != "any") {
      throw Error(ErrorCode::kLabelError, "family names take gender \"any\", got \"" + std::string(fields[3]) + "\"");
    }
  } else if (fields[4] == "given") {
    part.role = NameRole::kGiven;
    part.gender = parse_gender(fields[3]);
    if (!part.gender) throw Error(ErrorCode::kLabelError, "unknown gender \"" + std::string(fields[3]) + "\"");
  } else {
    throw Error(ErrorCode::kSchemaError, "role must be family or given, got \"" + std::string(fields[4]) + "\"");
  }
  if (part.romaji.empty() || part.hiragana.empty() || part.kanji.empty()) {
    throw Error(ErrorCode::kMalformedName, "empty name field");
  }
  for (char c : part.romaji) {
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) {
      throw Error(ErrorCode::kMalformedName, "romaji must be ASCII letters: \"" + part.romaji + "\"");
    }
  }
  utf8::decode(part.hiragana);
  utf8::decode(part.kanji);
  return part;
}

std::string to_raw_row(const RawNamePart& part) {
  const std::string gender = part.gender ? std::string(to_string(*part.gender)) : "any";
  return part.romaji + "," + part.hiragana + "," + part.kanji + "," + gender + "," + std::string(to_string(part.role));
}

std::vector<RawNamePart> read_raw_names(std::istream& in) {
  return read_csv<RawNamePart>(in, kRawHeader, parse_raw_row);
}

std::vector<NameRecord> read_corpus(std::istream& in) {
  return read_csv<NameRecord>(in, kCorpusHeader, parse_csv_row);
}

void write_corpus(std::ostream& out, std::span<const NameRecord> records) {
  out << kCorpusHeader << '\n';
  for (const auto& record : records) out << to_csv_row(record) << '\n';
}

std::vector<NameRecord> read_corpus_file(const std::string& path) {
  auto in = open_input(path);
  return read_corpus(in);
}

void write_corpus_file(const std::string& path, std::span<const NameRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  write_corpus(out, records);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

std::vector<RawNamePart> read_raw_names_file(const std::string& path) {
  auto in = open_input(path);
  return read_raw_names(in);
}

std::vector<RawNamePart> dedupe_first_names(std::span<const RawNamePart> rows) {
  std::vector<RawNamePart> out;
  std::set<std::pair<std::string, int>> seen;
  for (const auto& row : rows) {
    const int gender = row.gender ? index_of(*row.gender) : -1;
    if (seen.emplace(row.kanji, gender).second) out.push_back(row);
  }
  return out;
}

std::string_view to_string(PairingMode mode) { return mode == PairingMode::kOneToOne ? "one-to-one" : "cross-k"; }

std::optional<PairingMode> parse_pairing_mode(std::string_view text) {
  if (text == "one-to-one") return PairingMode::kOneToOne;
  if (text == "cross-k") return PairingMode::kCrossK;
  return std::nullopt;
}

std::vector<NameRecord> build_dataset(std::span<const RawNamePart> firsts, std::span<const RawNamePart> lasts,
                                      const PairingConfig& pairing, std::uint64_t seed) {
  if (firsts.empty() || lasts.empty()) {
    throw Error(ErrorCode::kEmptyInput, "need at least one given name and one family name");
  }
  for (const auto& given : firsts) {
    if (given.role != NameRole::kGiven || !given.gender) {
      throw Error(ErrorCode::kInvalidArgument, "given-name list contains a family entry: " + given.kanji);
    }
  }
  for (const auto& family : lasts) {
    if (family.role != NameRole::kFamily) {
      throw Error(ErrorCode::kInvalidArgument, "family-name list contains a given entry: " + family.kanji);
    }
  }
  std::vector<NameRecord> records;
  Rng rng(seed);
  if (pairing.mode == PairingMode::kOneToOne) {
    records.reserve(firsts.size());
    for (const auto& given : firsts) records.push_back(join(lasts[rng.below(lasts.size())], given));
    return records;
  }
  if (pairing.k == 0 || pairing.k > lasts.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cross-k needs 1 <= k <= number of family names");
  }
  records.reserve(firsts.size() * pairing.k);
  std::vector<std::size_t> order(lasts.size());
  for (const auto& given : firsts) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // partial Fisher-Yates: the first k slots become a uniform k-subset
    for (std::size_t i = 0; i < pairing.k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
      std::swap(order[i], order[j]);
      records.push_back(join(lasts[order[i]], given));
    }
  }
  return records;
}

void SplitRatios::validate() const {
  for (double r : {train, val, test}) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::kRatioError, "each ratio must lie in (0, 1)");
  }
  if (std::abs(train + val + test - 1.0) > 1e-9) throw Error(ErrorCode::kRatioError, "ratios must sum to 1");
}

DatasetSplits split_dataset(std::span<const NameRecord> records, const SplitRatios& ratios, std::uint64_t seed,
                            bool stratify) {
  ratios.validate();
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "cannot split an empty corpus");
  DatasetSplits out;
  if (!stratify) {
    std::vector<NameRecord> shuffled(records.begin(), records.end());
    Rng(seed).shuffle(std::span<NameRecord>(shuffled));
    slice_into(shuffled, ratios, out);
    return out;
  }
  for (const auto gender : kGenders) {
    std::vector<NameRecord> group;
    for (const auto& r : records) {
      if (r.gender == gender) group.push_back(r);
    }
    Rng(seed, static_cast<std::uint64_t>(index_of(gender)) + 1).shuffle(std::span<NameRecord>(group));
    slice_into(group, ratios, out);
  }
  return out;
}

HomonymHistogram homonym_stats(std::span<const NameRecord> records) {
  const PartAligner aligner(records);
  std::array<std::map<std::string, std::set<std::string>>, 2> spellings;
  HomonymHistogram histogram;
  for (const auto& record : records) {
    const auto aligned = aligner.align(record);
    if (!aligned) {
      ++histogram.unaligned;
      continue;
    }
    const auto given = normalize_romaji(split_romaji(record.romaji).given);
    spellings[index_of(record.gender)][given].insert(aligned->given_kanji);
  }
  for (const auto gender : kGenders) {
    for (const auto& [_, kanji] : spellings[index_of(gender)]) ++histogram.by_gender[index_of(gender)][kanji.size()];
  }
  return histogram;
}

std::vector<std::pair<std::string, std::size_t>> char_frequency(std::span<const NameRecord> records, Gender gender,
                                                                NamePart part) {
  std::optional<PartAligner> aligner;
  if (part != NamePart::kFull) aligner.emplace(records);
  std::map<char32_t, std::size_t> counts;
  for (const auto& record : records) {
    if (record.gender != gender) continue;
    std::string text = record.kanji;
    if (aligner) {
      const auto aligned = aligner->align(record);
      if (!aligned) continue;
      text = part == NamePart::kFirst ? aligned->given_kanji : aligned->family_kanji;
    }
    for (char32_t cp : utf8::decode(text)) {
      if (utf8::is_kanji(cp)) ++counts[cp];
    }
  }
  std::vector<std::pair<char32_t, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::pair<std::string, std::size_t>> out;
  out.reserve(ranked.size());
  for (const auto& [cp, count] : ranked) {
    std::string ch;
    utf8::append(ch, cp);
    out.emplace_back(std::move(ch), count);
  }
  return out;
}

double male_fraction(std::span<const NameRecord> records) {
  if (records.empty()) return 0.0;
  const auto males = std::count_if(records.begin(), records.end(),
                                   [](const NameRecord& r) { return r.gender == Gender::kMale; });
  return static_cast<double>(males) / static_cast<double>(records.size());
}

}  // namespace gendec
