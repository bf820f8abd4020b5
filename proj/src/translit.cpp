#include "gendec/translit.hpp"

#include <algorithm>
#include "json.hpp"
#include <set>
#include <tuple>

#include "gendec/error.hpp"
#include "gendec/utf8.hpp"

namespace gendec {

namespace {

constexpr char32_t kSokuon = U'っ';
constexpr char32_t kProlonged = U'ー';

struct KanaEntry {
  char32_t kana;
  std::string_view romaji;
};

constexpr KanaEntry kBase[] = {
    {U'あ', "a"},   {U'い', "i"},   {U'う', "u"},   {U'え', "e"},  {U'お', "o"},
    {U'か', "ka"},  {U'き', "ki"},  {U'く', "ku"},  {U'け', "ke"}, {U'こ', "ko"},
    {U'が', "ga"},  {U'ぎ', "gi"},  {U'ぐ', "gu"},  {U'げ', "ge"}, {U'ご', "go"},
    {U'さ', "sa"},  {U'し', "shi"}, {U'す', "su"},  {U'せ', "se"}, {U'そ', "so"},
    {U'ざ', "za"},  {U'じ', "ji"},  {U'ず', "zu"},  {U'ぜ', "ze"}, {U'ぞ', "zo"},
    {U'た', "ta"},  {U'ち', "chi"}, {U'つ', "tsu"}, {U'て', "te"}, {U'と', "to"},
    {U'だ', "da"},  {U'ぢ', "ji"},  {U'づ', "zu"},  {U'で', "de"}, {U'ど', "do"},
    {U'な', "na"},  {U'に', "ni"},  {U'ぬ', "nu"},  {U'ね', "ne"}, {U'の', "no"},
    {U'は', "ha"},  {U'ひ', "hi"},  {U'ふ', "fu"},  {U'へ', "he"}, {U'ほ', "ho"},
    {U'ば', "ba"},  {U'び', "bi"},  {U'ぶ', "bu"},  {U'べ', "be"}, {U'ぼ', "bo"},
    {U'ぱ', "pa"},  {U'ぴ', "pi"},  {U'ぷ', "pu"},  {U'ぺ', "pe"}, {U'ぽ', "po"},
    {U'ま', "ma"},  {U'み', "mi"},  {U'む', "mu"},  {U'め', "me"}, {U'も', "mo"},
    {U'や', "ya"},  {U'ゆ', "yu"},  {U'よ', "yo"},
    {U'ら', "ra"},  {U'り', "ri"},  {U'る', "ru"},  {U'れ', "re"}, {U'ろ', "ro"},
    {U'わ', "wa"},  {U'ゐ', "i"},   {U'ゑ', "e"},   {U'を', "o"},  {U'ん', "n"},
    {U'ゔ', "vu"},
};

// Small kana only combine with a preceding kana; alone they read as their
// full-size counterpart.
constexpr KanaEntry kSmall[] = {
    {U'ぁ', "a"}, {U'ぃ', "i"}, {U'ぅ', "u"}, {U'ぇ', "e"}, {U'ぉ', "o"},
    {U'ゃ', "ya"}, {U'ゅ', "yu"}, {U'ょ', "yo"}, {U'ゎ', "wa"}, {U'ゕ', "ka"}, {U'ゖ', "ke"},
};

struct DigraphEntry {
  char32_t first;
  char32_t second;
  std::string_view romaji;
};

constexpr DigraphEntry kDigraphs[] = {
    {U'き', U'ゃ', "kya"}, {U'き', U'ゅ', "kyu"}, {U'き', U'ょ', "kyo"},
    {U'ぎ', U'ゃ', "gya"}, {U'ぎ', U'ゅ', "gyu"}, {U'ぎ', U'ょ', "gyo"},
    {U'し', U'ゃ', "sha"}, {U'し', U'ゅ', "shu"}, {U'し', U'ょ', "sho"},
    {U'じ', U'ゃ', "ja"},  {U'じ', U'ゅ', "ju"},  {U'じ', U'ょ', "jo"},
    {U'ち', U'ゃ', "cha"}, {U'ち', U'ゅ', "chu"}, {U'ち', U'ょ', "cho"},
    {U'ぢ', U'ゃ', "ja"},  {U'ぢ', U'ゅ', "ju"},  {U'ぢ', U'ょ', "jo"},
    {U'に', U'ゃ', "nya"}, {U'に', U'ゅ', "nyu"}, {U'に', U'ょ', "nyo"},
    {U'ひ', U'ゃ', "hya"}, {U'ひ', U'ゅ', "hyu"}, {U'ひ', U'ょ', "hyo"},
    {U'び', U'ゃ', "bya"}, {U'び', U'ゅ', "byu"}, {U'び', U'ょ', "byo"},
    {U'ぴ', U'ゃ', "pya"}, {U'ぴ', U'ゅ', "pyu"}, {U'ぴ', U'ょ', "pyo"},
    {U'み', U'ゃ', "mya"}, {U'み', U'ゅ', "myu"}, {U'み', U'ょ', "myo"},
    {U'り', U'ゃ', "rya"}, {U'り', U'ゅ', "ryu"}, {U'り', U'ょ', "ryo"},
    // extended combinations seen in modern given names
    {U'し', U'ぇ', "she"}, {U'じ', U'ぇ', "je"},  {U'ち', U'ぇ', "che"},
    {U'ふ', U'ぁ', "fa"},  {U'ふ', U'ぃ', "fi"},  {U'ふ', U'ぇ', "fe"}, {U'ふ', U'ぉ', "fo"},
    {U'ふ', U'ゅ', "fyu"}, {U'て', U'ぃ', "ti"},  {U'で', U'ぃ', "di"},
    {U'と', U'ぅ', "tu"},  {U'ど', U'ぅ', "du"},  {U'て', U'ゅ', "tyu"}, {U'で', U'ゅ', "dyu"},
    {U'う', U'ぃ', "wi"},  {U'う', U'ぇ', "we"},  {U'う', U'ぉ', "wo"},
    {U'ゔ', U'ぁ', "va"},  {U'ゔ', U'ぃ', "vi"},  {U'ゔ', U'ぇ', "ve"}, {U'ゔ', U'ぉ', "vo"},
};

template <typename Range>
std::optional<std::string_view> find_in(const Range& table, char32_t cp) {
  for (const auto& entry : table) {
    if (entry.kana == cp) return entry.romaji;
  }
  return std::nullopt;
}

std::optional<std::string_view> find_digraph(char32_t first, char32_t second) {
  for (const auto& entry : kDigraphs) {
    if (entry.first == first && entry.second == second) return entry.romaji;
  }
  return std::nullopt;
}

bool is_vowel(char c) { return c == 'a' || c == 'i' || c == 'u' || c == 'e' || c == 'o'; }

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings != nullptr) warnings->push_back(std::move(message));
}

struct Syllable {
  std::string_view romaji;
  std::size_t consumed = 0;
};

// Reads one syllable (digraph, base or small kana) starting at `i`.
std::optional<Syllable> read_syllable(const std::u32string& cps, std::size_t i,
                                      std::vector<std::string>* warnings) {
  if (i + 1 < cps.size()) {
    if (auto digraph = find_digraph(cps[i], cps[i + 1])) return Syllable{*digraph, 2};
  }
  if (auto base = find_in(kBase, cps[i])) return Syllable{*base, 1};
  if (auto small = find_in(kSmall, cps[i])) {
    warn(warnings, "isolated small kana at position " + std::to_string(i));
    return Syllable{*small, 1};
  }
  return std::nullopt;
}

[[noreturn]] void unknown_kana(char32_t cp, std::size_t i) {
  std::string shown;
  utf8::append(shown, cp);
  throw Error(ErrorCode::kUnknownKana,
              "'" + shown + "' at position " + std::to_string(i) + " is not hiragana");
}

}  // namespace

std::string kana_to_romaji(std::string_view kana, std::vector<std::string>* warnings) {
  const auto cps = utf8::decode(kana);
  std::string out;
  out.reserve(cps.size() * 3);
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t cp = cps[i];
    if (cp == kProlonged) {
      if (!out.empty() && is_vowel(out.back())) {
        out.push_back(out.back());
      } else {
        warn(warnings, "prolonged sound mark without a preceding vowel at position " + std::to_string(i));
      }
      ++i;
      continue;
    }
    if (cp == kSokuon) {
      std::optional<Syllable> next;
      if (i + 1 < cps.size() && cps[i + 1] != kSokuon && cps[i + 1] != kProlonged) {
        next = read_syllable(cps, i + 1, nullptr);
        if (!next) unknown_kana(cps[i + 1], i + 1);
      }
      if (!next || is_vowel(next->romaji.front()) || cps[i + 1] == U'ん') {
        warn(warnings, "sokuon without a following consonant at position " + std::to_string(i));
        out += "tsu";
      } else if (next->romaji.starts_with("ch")) {
        out.push_back('t');
      } else {
        out.push_back(next->romaji.front());
      }
      ++i;
      continue;
    }
    const auto syllable = read_syllable(cps, i, warnings);
    if (!syllable) unknown_kana(cp, i);
    out += syllable->romaji;
    i += syllable->consumed;
  }
  return out;
}

std::string_view to_string(NameRole role) { return role == NameRole::kFamily ? "family" : "given"; }

void ReadingDictionary::add(NameRole role, std::string_view kanji, std::string_view kana, std::uint64_t count) {
  if (count == 0) throw Error(ErrorCode::kInvalidArgument, "reading counts must be positive");
  auto& readings = table(role)[std::string(kanji)];
  readings[std::string(kana)] += count;
}

bool ReadingDictionary::contains(NameRole role, std::string_view kanji) const {
  return table(role).find(kanji) != table(role).end();
}

std::vector<Reading> ReadingDictionary::readings(NameRole role, std::string_view kanji) const {
  std::vector<Reading> out;
  const auto it = table(role).find(kanji);
  if (it == table(role).end()) return out;
  for (const auto& [kana, count] : it->second) out.push_back({kana, count});
  // map order is kana ascending, so a stable sort on count keeps the tie rule
  std::stable_sort(out.begin(), out.end(),
                   [](const Reading& a, const Reading& b) { return a.count > b.count; });
  return out;
}

std::optional<std::string> ReadingDictionary::best_reading(NameRole role, std::string_view kanji) const {
  const auto it = table(role).find(kanji);
  if (it == table(role).end()) return std::nullopt;
  const std::string* best = nullptr;
  std::uint64_t best_count = 0;
  for (const auto& [kana, count] : it->second) {
    if (count > best_count) {
      best = &kana;
      best_count = count;
    }
  }
  return *best;
}

std::string ReadingDictionary::to_json() const {
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  for (const auto role : {NameRole::kFamily, NameRole::kGiven}) {
    auto section = nlohmann::json::object();
    for (const auto& [kanji, _] : table(role)) {
      auto list = nlohmann::json::array();
      for (const auto& reading : readings(role, kanji)) list.push_back({reading.kana, reading.count});
      section[kanji] = std::move(list);
    }
    doc[std::string(to_string(role))] = std::move(section);
  }
  return doc.dump();
}

ReadingDictionary ReadingDictionary::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("reading dictionary: ") + e.what());
  }
  if (!doc.contains("schema_version") || doc["schema_version"] != kSchemaVersion) {
    throw Error(ErrorCode::kVersionMismatch, "reading dictionary schema_version must be 1");
  }
  ReadingDictionary dict;
  try {
    for (const auto role : {NameRole::kFamily, NameRole::kGiven}) {
      for (const auto& [kanji, list] : doc.at(std::string(to_string(role))).items()) {
        for (const auto& pair : list) {
          dict.add(role, kanji, pair.at(0).get<std::string>(), pair.at(1).get<std::uint64_t>());
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("reading dictionary: ") + e.what());
  }
  return dict;
}

std::optional<std::size_t> align_hiragana(std::string_view hiragana, std::string_view family_romaji) {
  const auto cps = utf8::decode(hiragana);
  for (std::size_t p = 1; p < cps.size(); ++p) {
    std::string romaji;
    try {
      romaji = kana_to_romaji(utf8::encode(std::u32string_view(cps).substr(0, p)));
    } catch (const Error&) {
      return std::nullopt;
    }
    if (romaji == family_romaji) return p;
    if (romaji.size() > family_romaji.size() + 3) break;
  }
  return std::nullopt;
}

namespace {

struct HiraganaSplit {
  std::u32string kanji;
  std::u32string family_kana;
  std::u32string given_kana;
};

std::optional<HiraganaSplit> split_hiragana(const NameRecord& record) {
  std::string family;
  try {
    family = normalize_romaji(split_romaji(record.romaji).family);
  } catch (const Error&) {
    return std::nullopt;
  }
  const auto split = align_hiragana(record.hiragana, family);
  if (!split) return std::nullopt;
  const auto kana = utf8::decode(record.hiragana);
  return HiraganaSplit{utf8::decode(record.kanji), kana.substr(0, *split), kana.substr(*split)};
}

std::string branching_key(const std::u32string& family_kana, std::u32string_view prefix) {
  auto key = utf8::encode(family_kana);
  key.push_back('\t');
  key += utf8::encode(prefix);
  return key;
}

bool feasible(std::size_t k, const HiraganaSplit& s) {
  return k <= s.family_kana.size() && s.kanji.size() - k <= s.given_kana.size();
}

}  // namespace

PartAligner::PartAligner(std::span<const NameRecord> records) {
  std::unordered_map<std::string, std::set<char32_t>> followers;
  for (const auto& record : records) {
    const auto split = split_hiragana(record);
    if (!split) continue;
    for (std::size_t k = 1; k < split->kanji.size(); ++k) {
      if (!feasible(k, *split)) continue;
      followers[branching_key(split->family_kana, std::u32string_view(split->kanji).substr(0, k))]
          .insert(split->kanji[k]);
    }
  }
  branching_.reserve(followers.size());
  for (const auto& [key, next] : followers) branching_.emplace(key, next.size());
}

std::optional<AlignedName> PartAligner::align(const NameRecord& record) const {
  const auto split = split_hiragana(record);
  if (!split) return std::nullopt;
  const auto& s = *split;

  std::optional<std::size_t> best;
  // (branching desc, max kana-per-kanji asc, distance from two-char family asc, k asc)
  std::tuple<std::size_t, double, std::ptrdiff_t> best_score{};
  for (std::size_t k = 1; k < s.kanji.size(); ++k) {
    if (!feasible(k, s)) continue;
    const auto it = branching_.find(branching_key(s.family_kana, std::u32string_view(s.kanji).substr(0, k)));
    const std::size_t branching = it == branching_.end() ? 0 : it->second;
    const double ratio = std::max(static_cast<double>(s.family_kana.size()) / static_cast<double>(k),
                                  static_cast<double>(s.given_kana.size()) /
                                      static_cast<double>(s.kanji.size() - k));
    const auto two_char = static_cast<std::ptrdiff_t>(k > 2 ? k - 2 : 2 - k);
    const std::tuple<std::size_t, double, std::ptrdiff_t> score{branching, -ratio, -two_char};
    // strict comparison keeps the smallest k on a full tie
    if (!best || score > best_score) {
      best = k;
      best_score = score;
    }
  }
  if (!best) return std::nullopt;
  const std::u32string_view kanji(s.kanji);
  return AlignedName{utf8::encode(kanji.substr(0, *best)), utf8::encode(kanji.substr(*best)),
                     utf8::encode(s.family_kana), utf8::encode(s.given_kana)};
}

DictionaryBuild build_reading_dictionary(std::span<const NameRecord> records, const PartAligner& aligner) {
  DictionaryBuild build;
  for (const auto& record : records) {
    const auto aligned = aligner.align(record);
    if (!aligned) {
      ++build.skipped;
      continue;
    }
    build.dictionary.add(NameRole::kFamily, aligned->family_kanji, aligned->family_kana);
    build.dictionary.add(NameRole::kGiven, aligned->given_kanji, aligned->given_kana);
  }
  return build;
}

DictionaryBuild build_reading_dictionary(std::span<const NameRecord> records) {
  return build_reading_dictionary(records, PartAligner(records));
}

std::string kanji_to_romaji(std::string_view kanji_part, NameRole role, const ReadingDictionary& dict) {
  const auto reading = dict.best_reading(role, kanji_part);
  if (!reading) {
    throw Error(ErrorCode::kUnknownKanji,
                std::string(to_string(role)) + " part " + std::string(kanji_part) + " not in dictionary");
  }
  return kana_to_romaji(*reading);
}

ConvertedName convert_kanji_name(std::string_view kanji, const ReadingDictionary& dict) {
  const auto cps = utf8::decode(kanji);
  std::optional<std::size_t> both, family_only, given_only;
  for (std::size_t k = 1; k < cps.size(); ++k) {
    const auto prefix = utf8::encode(std::u32string_view(cps).substr(0, k));
    const auto suffix = utf8::encode(std::u32string_view(cps).substr(k));
    const bool family_known = dict.contains(NameRole::kFamily, prefix);
    const bool given_known = dict.contains(NameRole::kGiven, suffix);
    if (family_known && given_known) both = k;
    if (family_known) family_only = k;
    if (given_known && !given_only) given_only = k;
  }
  ConvertedName out;
  const auto family_at = [&](std::size_t k) {
    out.family = kanji_to_romaji(utf8::encode(std::u32string_view(cps).substr(0, k)), NameRole::kFamily, dict);
  };
  const auto given_at = [&](std::size_t k) {
    out.given = kanji_to_romaji(utf8::encode(std::u32string_view(cps).substr(k)), NameRole::kGiven, dict);
  };
  if (both) {
    family_at(*both);
    given_at(*both);
  } else if (family_only) {
    family_at(*family_only);
  } else if (given_only) {
    given_at(*given_only);
  }
  return out;
}

ConsistencyReport romaji_consistency(std::span<const NameRecord> records) {
  ConsistencyReport report;
  for (const auto& record : records) {
    ++report.total;
    auto expected = normalize_romaji(record.romaji);
    std::erase(expected, ' ');
    try {
      if (kana_to_romaji(record.hiragana) == expected) ++report.matches;
    } catch (const Error&) {
      // unknown kana counts as a mismatch
    }
  }
  return report;
}

}  // namespace gendec
