#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "gendec/error.hpp"
#include "gendec/eval.hpp"
#include "gendec/model_io.hpp"
#include "json.hpp"
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

TrainedModel trained(ModelKind kind, Weighting weighting, InputVariant variant, NamePart part = NamePart::kFull) {
  const auto splits = split_dataset(test_support::fixture_corpus(), {}, 42, true);
  CellSpec spec{{kind, weighting, variant, part}, {TokenizerConfig::char_ngrams(2, 3)}, {}};
  spec.params.forest.n_trees = 4;
  auto model = run_cell(spec, splits, 42).model;
  model.metadata.corpus_checksum = fnv1a64_hex("corpus");
  model.metadata.created_at = 1700000000;
  return model;
}

std::string mutate(const std::string& text, auto&& fn) {
  auto j = nlohmann::json::parse(text);
  fn(j);
  return j.dump();
}

}  // namespace

TEST_CASE("every model kind round-trips byte for byte with identical predictions") {
  const auto test = test_support::fixture_corpus();
  for (const auto kind : {ModelKind::kNaiveBayes, ModelKind::kLogistic, ModelKind::kTree, ModelKind::kForest,
                          ModelKind::kSvm}) {
    for (const auto weighting : {Weighting::kCount, Weighting::kTfidf}) {
      for (const auto variant : {InputVariant::kOriginal, InputVariant::kConverted}) {
        CAPTURE(to_string(kind));
        CAPTURE(to_string(weighting));
        CAPTURE(to_string(variant));
        const auto model = trained(kind, weighting, variant);
        const auto text = model_to_json(model);
        const auto loaded = model_from_json(text);
        CHECK(model_to_json(loaded) == text);
        CHECK(loaded.vocabulary == model.vocabulary);
        CHECK(loaded.metadata == model.metadata);
        CHECK(loaded.dictionary == model.dictionary);
        const auto before = evaluate_model(model, test);
        const auto after = evaluate_model(loaded, test);
        CHECK(after.confusion == before.confusion);
      }
    }
  }
}

TEST_CASE("files save and load") {
  const auto model = trained(ModelKind::kForest, Weighting::kTfidf, InputVariant::kOriginal, NamePart::kFirst);
  const auto path = (std::filesystem::temp_directory_path() / "gendec_model_io_test.json").string();
  save_model(path, model);
  const auto loaded = load_model(path);
  CHECK(model_to_json(loaded) == model_to_json(model));
  std::filesystem::remove(path);
  CHECK(code_of([&] { load_model(path); }) == ErrorCode::kIoError);
}

TEST_CASE("single-class naive bayes stores the empty prior as null") {
  const auto rows = test_support::sample_names();
  std::vector<NameRecord> males;
  for (const auto& r : rows) {
    if (r.gender == Gender::kMale) males.push_back(r);
  }
  DatasetSplits splits{males, {}, males};
  const auto model = run_cell({{ModelKind::kNaiveBayes, Weighting::kCount, InputVariant::kOriginal, NamePart::kFull},
                               {TokenizerConfig::words()},
                               {}},
                              splits, 1)
                         .model;
  const auto text = model_to_json(model);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["parameters"]["class_log_prior"][0].is_null());
  const auto loaded = model_from_json(text);
  CHECK(std::isinf(std::get<NBModel>(loaded.model).class_log_prior[0]));
  CHECK(model_to_json(loaded) == text);
}

TEST_CASE("schema violations are rejected") {
  const auto text = model_to_json(trained(ModelKind::kTree, Weighting::kTfidf, InputVariant::kOriginal));
  CHECK(code_of([&] { model_from_json(mutate(text, [](auto& j) { j["schema_version"] = 99; })); }) ==
        ErrorCode::kVersionMismatch);
  CHECK(code_of([&] { model_from_json(mutate(text, [](auto& j) { j.erase("vocabulary"); })); }) ==
        ErrorCode::kSchemaError);
  CHECK(code_of([&] { model_from_json(mutate(text, [](auto& j) { j["vocabulary"]["idf"] = nullptr; })); }) ==
        ErrorCode::kSchemaError);
  CHECK(code_of([&] { model_from_json(mutate(text, [](auto& j) { j["model_kind"] = "knn"; })); }) ==
        ErrorCode::kSchemaError);
  CHECK(code_of([&] {
          model_from_json(mutate(text, [](auto& j) { j["parameters"]["left"][0] = 100000; }));
        }) == ErrorCode::kSchemaError);
  CHECK(code_of([&] {
          model_from_json(mutate(text, [](auto& j) { j["parameters"]["n_features"] = 3; }));
        }) == ErrorCode::kSchemaError);
  CHECK(code_of([] { model_from_json("[1, 2"); }) == ErrorCode::kSchemaError);
}

TEST_CASE("names are featurized like training documents") {
  const auto rows = test_support::fixture_corpus();
  const auto full = trained(ModelKind::kTree, Weighting::kCount, InputVariant::kOriginal);
  std::vector<std::string> names;
  for (const auto& r : rows) names.push_back(r.romaji);
  const auto by_name = predict_names(full, names);
  const auto docs = extract_documents(rows, NamePart::kFull, InputVariant::kOriginal, nullptr);
  const auto expected = predict(full.model, transform(docs.docs, full.vocabulary, full.weighting));
  REQUIRE(by_name.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(by_name[i].gender == expected[i]);
    REQUIRE(by_name[i].probability.has_value());
    CHECK(*by_name[i].probability >= 0.5);
  }

  const auto first = trained(ModelKind::kSvm, Weighting::kCount, InputVariant::kOriginal, NamePart::kFirst);
  const std::vector<std::string> pair{"Tamai Kazuyoshi", "kazuyoshi"};
  const auto p = predict_names(first, pair);
  CHECK(p[0].gender == p[1].gender);
  CHECK_FALSE(p[0].probability.has_value());
  CHECK(code_of([&] { predict_names(first, std::vector<std::string>{"   "}); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("checksum and timestamp helpers") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
  ::setenv("SOURCE_DATE_EPOCH", "1234", 1);
  CHECK(reproducible_timestamp() == 1234);
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK(reproducible_timestamp() == 0);
}
