#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "gendec/corpus.hpp"
#include "gendec/error.hpp"
#include "support.hpp"

using namespace gendec;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected gendec::Error");
  return ErrorCode::kInvalidArgument;
}

RawNamePart given(std::string romaji, std::string kana, std::string kanji, Gender g) {
  return {std::move(romaji), std::move(kana), std::move(kanji), g, NameRole::kGiven};
}

RawNamePart family(std::string romaji, std::string kana, std::string kanji) {
  return {std::move(romaji), std::move(kana), std::move(kanji), std::nullopt, NameRole::kFamily};
}

std::vector<NameRecord> synthetic(std::size_t females, std::size_t males) {
  std::vector<NameRecord> out;
  for (std::size_t i = 0; i < females + males; ++i) {
    const auto g = i < females ? Gender::kFemale : Gender::kMale;
    // distinct romaji so records stay distinguishable after shuffling
    std::string tag;
    for (std::size_t v = i + 1; v > 0; v /= 26) tag += static_cast<char>('a' + v % 26);
    out.push_back({"Ta " + tag, "田" + std::to_string(i), "た", g});
  }
  return out;
}

std::multiset<std::string> romaji_of(std::span<const NameRecord> rows) {
  std::multiset<std::string> out;
  for (const auto& r : rows) out.insert(r.romaji);
  return out;
}

std::size_t distinct_romaji(std::span<const NameRecord> rows) {
  const auto all = romaji_of(rows);
  return std::set<std::string>(all.begin(), all.end()).size();
}

}  // namespace

TEST_CASE("raw rows parse and round-trip") {
  std::ifstream in(test_support::fixture("raw_given.csv"));
  const auto rows = read_raw_names(in);
  REQUIRE(rows.size() == 25);
  CHECK(rows[0] == given("Hanako", "はなこ", "花子", Gender::kFemale));
  for (const auto& r : rows) CHECK(parse_raw_row(to_raw_row(r)) == r);
  const auto families = read_raw_names_file(test_support::fixture("raw_family.csv"));
  REQUIRE(families.size() == 10);
  CHECK(families[0] == family("Satou", "さとう", "佐藤"));
  CHECK(code_of([] { parse_raw_row("Hanako,はなこ,花子,other,given"); }) == ErrorCode::kLabelError);
  CHECK(code_of([] { parse_raw_row("Hanako,はなこ"); }) == ErrorCode::kSchemaError);
}

TEST_CASE("reader errors carry the line number") {
  std::istringstream in(std::string(kCorpusHeader) + "\nTamai Kazuyoshi,玉井和善,たまいかずよし,male\nbad\n");
  try {
    read_corpus(in);
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSchemaError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream wrong_header("a,b,c,d\n");
  CHECK(code_of([&] { read_corpus(wrong_header); }) == ErrorCode::kSchemaError);
}

TEST_CASE("corpus files round-trip") {
  const auto rows = test_support::fixture_corpus();
  std::ostringstream out;
  write_corpus(out, rows);
  std::istringstream in(out.str());
  CHECK(read_corpus(in) == rows);
}

TEST_CASE("dedupe keeps the first row per kanji and gender") {
  const auto rows = read_raw_names_file(test_support::fixture("raw_given.csv"));
  const auto unique = dedupe_first_names(rows);
  CHECK(unique.size() == 24);
  CHECK(std::equal(unique.begin(), unique.end(), rows.begin()));
  const std::vector<RawNamePart> both{given("Kaoru", "かおる", "薫", Gender::kFemale),
                                      given("Kaoru", "かおる", "薫", Gender::kMale),
                                      given("Kaoru2", "かおる", "薫", Gender::kFemale)};
  const auto kept = dedupe_first_names(both);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].romaji == "Kaoru");
  CHECK(kept[1].gender == Gender::kMale);
  CHECK(dedupe_first_names(unique) == unique);
}

TEST_CASE("build_dataset examples") {
  const std::vector<RawNamePart> firsts{given("Kazuyoshi", "かずよし", "和善", Gender::kMale)};
  const std::vector<RawNamePart> lasts{family("Tamai", "たまい", "玉井")};
  const auto one = build_dataset(firsts, lasts, {}, 42);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == test_support::sample_names()[0]);

  const std::vector<RawNamePart> three{given("Hanako", "はなこ", "花子", Gender::kFemale),
                                       given("Hiroshi", "ひろし", "博", Gender::kMale),
                                       given("Emi", "えみ", "恵美", Gender::kFemale)};
  const std::vector<RawNamePart> two{family("Satou", "さとう", "佐藤"), family("Suzuki", "すずき", "鈴木")};
  const auto crossed = build_dataset(three, two, {PairingMode::kCrossK, 2}, 42);
  CHECK(crossed.size() == 6);
  CHECK(distinct_romaji(crossed) == 6);

  CHECK(code_of([&] { build_dataset(three, {}, {}, 1); }) == ErrorCode::kEmptyInput);
  CHECK(code_of([&] { build_dataset(three, two, {PairingMode::kCrossK, 3}, 1); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { build_dataset(two, three, {}, 1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("build_dataset properties on the raw fixture") {
  const auto firsts = dedupe_first_names(read_raw_names_file(test_support::fixture("raw_given.csv")));
  const auto lasts = read_raw_names_file(test_support::fixture("raw_family.csv"));
  const std::set<std::string> family_kanji{"佐藤", "鈴木", "高橋", "田中", "渡辺",
                                           "伊藤", "山本", "中村", "小林", "加藤"};
  for (std::uint64_t seed : {1u, 42u, 99u}) {
    const auto records = build_dataset(firsts, lasts, {}, seed);
    REQUIRE(records.size() == firsts.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(records[i].gender == *firsts[i].gender);
      CHECK(records[i].kanji.ends_with(firsts[i].kanji));
      CHECK(records[i].hiragana.ends_with(firsts[i].hiragana));
      CHECK(family_kanji.contains(records[i].kanji.substr(0, records[i].kanji.size() - firsts[i].kanji.size())));
      CHECK_NOTHROW(validate(records[i]));
    }
    CHECK(build_dataset(firsts, lasts, {}, seed) == records);
    const auto crossed = build_dataset(firsts, lasts, {PairingMode::kCrossK, 3}, seed);
    CHECK(crossed.size() == 3 * firsts.size());
    CHECK(distinct_romaji(crossed) == crossed.size());
  }
  CHECK(build_dataset(firsts, lasts, {}, 1) != build_dataset(firsts, lasts, {}, 2));
  CHECK(male_fraction(build_dataset(firsts, lasts, {}, 3)) == doctest::Approx(0.5));
}

TEST_CASE("split_dataset sizes and partition") {
  const auto ten = synthetic(4, 6);
  const auto plain = split_dataset(ten, {}, 42, false);
  CHECK(plain.train.size() == 7);
  CHECK(plain.val.size() == 2);
  CHECK(plain.test.size() == 1);

  const auto hundred = synthetic(50, 50);
  const auto strat = split_dataset(hundred, {}, 42, true);
  CHECK(strat.train.size() == 70);
  CHECK(strat.val.size() == 20);
  CHECK(strat.test.size() == 10);
  const auto count = [](std::span<const NameRecord> rows, Gender g) {
    return std::count_if(rows.begin(), rows.end(), [&](const NameRecord& r) { return r.gender == g; });
  };
  CHECK(count(strat.train, Gender::kFemale) == 35);
  CHECK(count(strat.train, Gender::kMale) == 35);

  for (bool stratify : {false, true}) {
    for (std::uint64_t seed : {0u, 7u, 42u}) {
      const auto rows = synthetic(37, 61);
      const auto s = split_dataset(rows, {0.6, 0.25, 0.15}, seed, stratify);
      std::vector<NameRecord> joined = s.train;
      joined.insert(joined.end(), s.val.begin(), s.val.end());
      joined.insert(joined.end(), s.test.begin(), s.test.end());
      CHECK(romaji_of(joined) == romaji_of(rows));
      const auto again = split_dataset(rows, {0.6, 0.25, 0.15}, seed, stratify);
      CHECK(again.train == s.train);
      CHECK(again.val == s.val);
      CHECK(again.test == s.test);
    }
  }
  CHECK(split_dataset(hundred, {}, 1).train != split_dataset(hundred, {}, 2).train);
}

TEST_CASE("split ratios are validated") {
  const auto rows = synthetic(5, 5);
  CHECK(code_of([&] { split_dataset(rows, {0.5, 0.5, 0.1}, 1); }) == ErrorCode::kRatioError);
  CHECK(code_of([&] { split_dataset(rows, {1.0, 0.0, 0.0}, 1); }) == ErrorCode::kRatioError);
  CHECK(code_of([&] { split_dataset(std::span<const NameRecord>(), {}, 1); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("homonym histogram of the sample names") {
  const auto rows = test_support::sample_names();
  const auto h = homonym_stats(rows);
  CHECK(h.unaligned == 0);
  CHECK(h.of(Gender::kFemale) == std::map<std::size_t, std::size_t>{{1, 1}, {2, 1}});
  CHECK(h.of(Gender::kMale) == std::map<std::size_t, std::size_t>{{1, 1}, {2, 1}});
  const auto empty = homonym_stats(std::span<const NameRecord>());
  CHECK(empty.of(Gender::kFemale).empty());
}

TEST_CASE("char frequency ranks by count then code point") {
  const auto rows = test_support::sample_names();
  const auto first = char_frequency(std::span(rows).first(1), Gender::kMale, NamePart::kFirst);
  CHECK(first == std::vector<std::pair<std::string, std::size_t>>{{"和", 1}, {"善", 1}});
  const auto male = char_frequency(rows, Gender::kMale, NamePart::kFirst);
  CHECK(male == std::vector<std::pair<std::string, std::size_t>>{
                    {"重", 2}, {"和", 1}, {"善", 1}, {"国", 1}, {"邦", 1}});
  const auto family = char_frequency(rows, Gender::kFemale, NamePart::kLast);
  CHECK(family.size() == 6);
  CHECK(char_frequency(std::span<const NameRecord>(), Gender::kMale, NamePart::kFull).empty());

  std::size_t total = 0;
  for (const auto& [_, n] : char_frequency(rows, Gender::kFemale, NamePart::kFull)) total += n;
  CHECK(total == 12);
}

TEST_CASE("male fraction") {
  CHECK(male_fraction(test_support::sample_names()) == doctest::Approx(0.5));
  CHECK(male_fraction(std::span<const NameRecord>()) == 0.0);
}
