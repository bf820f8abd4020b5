#include "gendec/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>

#include "gendec/error.hpp"
#include "json.hpp"

namespace gendec {

namespace {

using Json = nlohmann::ordered_json;

double ratio(double num, double den, bool& degenerate) {
  if (den == 0.0) {
    degenerate = true;
    return 0.0;
  }
  return num / den;
}

template <class T, class Parse>
T parse_field(std::string_view text, std::string_view what, Parse parse) {
  const auto value = parse(text);
  if (!value) {
    throw Error(ErrorCode::kInvalidArgument, "unknown " + std::string(what) + " \"" + std::string(text) + "\"");
  }
  return *value;
}

std::vector<std::string> string_or_list(const Json& j, const char* field) {
  const auto& v = j.at(field);
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

TokenizerConfig tokenizer_from(const Json& j) {
  TokenizerConfig config;
  config.mode = parse_field<TokenMode>(j.at("mode").get<std::string>(), "tokenizer mode", parse_token_mode);
  const bool chars = config.mode == TokenMode::kCharNgram;
  config.ngram_min = j.value("ngram_min", chars ? 2 : 1);
  config.ngram_max = j.value("ngram_max", chars ? 4 : 1);
  config.validate();
  return config;
}

Json tokenizer_to(const TokenizerConfig& config) {
  return {{"mode", to_string(config.mode)}, {"ngram_min", config.ngram_min}, {"ngram_max", config.ngram_max}};
}

TrainingParams params_from(const Json& j, TrainingParams params) {
  if (j.contains("nb")) params.nb_alpha = j["nb"].value("alpha", params.nb_alpha);
  if (j.contains("lr")) {
    const auto& lr = j["lr"];
    params.lr.learning_rate = lr.value("learning_rate", params.lr.learning_rate);
    params.lr.epochs = lr.value("epochs", params.lr.epochs);
    params.lr.l2 = lr.value("l2", params.lr.l2);
  }
  if (j.contains("dt")) {
    const auto& dt = j["dt"];
    if (dt.contains("max_depth")) {
      params.tree.max_depth = dt["max_depth"].is_null() ? std::nullopt
                                                        : std::optional<std::size_t>(dt["max_depth"].get<std::size_t>());
    }
    params.tree.min_samples_leaf = dt.value("min_samples_leaf", params.tree.min_samples_leaf);
  }
  if (j.contains("rf")) {
    const auto& rf = j["rf"];
    params.forest.n_trees = rf.value("n_trees", params.forest.n_trees);
    params.forest.features_per_split = rf.value("features_per_split", params.forest.features_per_split);
    params.forest.bootstrap = rf.value("bootstrap", params.forest.bootstrap);
  }
  if (j.contains("svm")) {
    const auto& svm = j["svm"];
    params.svm.lambda = svm.value("lambda", params.svm.lambda);
    params.svm.epochs = svm.value("epochs", params.svm.epochs);
  }
  return params;
}

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string(what) + ": " + e.what());
  }
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct Featurized {
  Vocabulary vocab;
  FeatureMatrix X;
};

Featurized featurize(std::span<const std::string> docs, const TokenizerConfig& tokenizer, Weighting weighting) {
  auto vocab = fit_vocabulary(docs, tokenizer, weighting == Weighting::kTfidf);
  auto X = transform(docs, vocab, weighting);
  return {std::move(vocab), std::move(X)};
}

double macro_f1(const Classifier& model, const Vocabulary& vocab, Weighting weighting, const ExtractedDocs& eval) {
  const auto X = transform(eval.docs, vocab, weighting);
  return f1_scores(confusion(eval.labels, predict(model, X))).macro;
}

}  // namespace

ConfusionMatrix confusion(std::span<const Gender> y_true, std::span<const Gender> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(y_true.size()) + " labels but " +
                                                std::to_string(y_pred.size()) + " predictions");
  }
  if (y_true.empty()) throw Error(ErrorCode::kEmpty, "no labels to score");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.counts[index_of(y_true[i])][index_of(y_pred[i])];
  return cm;
}

F1Scores f1_scores(const ConfusionMatrix& cm) {
  F1Scores out;
  std::array<double, 2> f1{};
  for (const auto g : kGenders) {
    const int c = index_of(g);
    const int other = 1 - c;
    const double tp = static_cast<double>(cm.counts[c][c]);
    const double fp = static_cast<double>(cm.counts[other][c]);
    const double fn = static_cast<double>(cm.counts[c][other]);
    const double precision = ratio(tp, tp + fp, out.degenerate);
    const double recall = ratio(tp, tp + fn, out.degenerate);
    f1[c] = ratio(2.0 * precision * recall, precision + recall, out.degenerate);
  }
  out.female = f1[index_of(Gender::kFemale)];
  out.male = f1[index_of(Gender::kMale)];
  out.macro = (out.female + out.male) / 2.0;
  return out;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  return total == 0 ? 0.0 : static_cast<double>(cm.counts[0][0] + cm.counts[1][1]) / static_cast<double>(total);
}

std::string to_string(const CellKey& key) {
  return std::string(to_string(key.model)) + "/" + std::string(to_string(key.weighting)) + "/" +
         std::string(to_string(key.variant)) + "/" + std::string(to_string(key.part));
}

ExtractedDocs extract_documents(std::span<const NameRecord> records, NamePart part, InputVariant variant,
                                const ReadingDictionary* dict) {
  ExtractedDocs out;
  out.docs.reserve(records.size());
  out.labels.reserve(records.size());
  if (variant == InputVariant::kConverted && dict == nullptr) {
    throw Error(ErrorCode::kMissingDictionary, "converted input requires a reading dictionary");
  }
  for (const auto& record : records) {
    out.labels.push_back(record.gender);
    if (variant == InputVariant::kOriginal) {
      out.docs.push_back(split_parts(record, part, variant));
      continue;
    }
    const auto original = split_romaji(normalize_romaji(record.romaji));
    const auto converted = convert_kanji_name(record.kanji, *dict);
    bool fell_back = false;
    const auto pick = [&](const std::optional<std::string>& value, const std::string& fallback) {
      if (value) return normalize_romaji(*value);
      fell_back = true;
      return fallback;
    };
    switch (part) {
      case NamePart::kFirst: out.docs.push_back(pick(converted.given, original.given)); break;
      case NamePart::kLast: out.docs.push_back(pick(converted.family, original.family)); break;
      case NamePart::kFull: {
        auto family = pick(converted.family, original.family);
        out.docs.push_back(family + " " + pick(converted.given, original.given));
        break;
      }
    }
    out.fallbacks += fell_back;
  }
  return out;
}

EvalReport evaluate_model(const TrainedModel& model, std::span<const NameRecord> test) {
  if (test.empty()) throw Error(ErrorCode::kEmpty, "test set is empty");
  const auto docs = extract_documents(test, model.part, model.variant,
                                      model.dictionary ? &*model.dictionary : nullptr);
  const auto X = transform(docs.docs, model.vocabulary, model.weighting);
  EvalReport report;
  report.cell = {kind_of(model.model), model.weighting, model.variant, model.part};
  report.tokenizer = model.vocabulary.tokenizer();
  report.confusion = confusion(docs.labels, predict(model.model, X));
  report.f1 = f1_scores(report.confusion);
  report.accuracy = accuracy(report.confusion);
  report.fallback_rate = static_cast<double>(docs.fallbacks) / static_cast<double>(test.size());
  report.train_rows = model.metadata.train_rows;
  report.test_rows = test.size();
  return report;
}

CellRun run_cell(const CellSpec& spec, const DatasetSplits& splits, std::uint64_t seed) {
  if (spec.tokenizers.empty()) throw Error(ErrorCode::kInvalidArgument, "cell has no tokenizer candidates");
  std::optional<ReadingDictionary> dict;
  if (spec.key.variant == InputVariant::kConverted) dict = build_reading_dictionary(splits.train).dictionary;
  const ReadingDictionary* dict_ptr = dict ? &*dict : nullptr;

  const auto train = extract_documents(splits.train, spec.key.part, spec.key.variant, dict_ptr);
  std::optional<ExtractedDocs> val;
  if (spec.tokenizers.size() > 1) {
    if (splits.val.empty()) throw Error(ErrorCode::kEmpty, "tokenizer selection needs a validation split");
    val = extract_documents(splits.val, spec.key.part, spec.key.variant, dict_ptr);
  }

  auto params = spec.params;
  params.set_seed(seed);
  std::optional<TrainedModel> best;
  std::optional<double> best_score;
  for (const auto& tokenizer : spec.tokenizers) {
    auto features = featurize(train.docs, tokenizer, spec.key.weighting);
    auto model = train_model(spec.key.model, features.X, train.labels, params);
    std::optional<double> score;
    if (val) score = macro_f1(model, features.vocab, spec.key.weighting, *val);
    if (!best || (score && *score > *best_score)) {
      best = TrainedModel{std::move(model), spec.key.weighting, std::move(features.vocab), spec.key.part,
                          spec.key.variant, dict, ModelMetadata{train.docs.size(), seed, 0, {}}};
      best_score = score;
    }
  }
  CellRun run{std::move(*best), {}};
  run.report = evaluate_model(run.model, splits.test);
  run.report.validation_macro_f1 = best_score;
  return run;
}

ExperimentGrid ExperimentGrid::from_json(std::string_view text, const std::string& base_dir) {
  const auto j = parse_json(text, "grid config");
  ExperimentGrid grid;
  try {
    grid.seed = j.value("seed", std::uint64_t{42});
    const auto resolve = [&](const std::string& path) {
      const std::filesystem::path p(path);
      return (p.is_absolute() ? p : std::filesystem::path(base_dir) / p).string();
    };
    if (j.contains("corpus")) {
      SplitRatios ratios;
      if (j.contains("ratios")) {
        ratios.train = j["ratios"].at("train").get<double>();
        ratios.val = j["ratios"].at("val").get<double>();
        ratios.test = j["ratios"].at("test").get<double>();
      }
      const auto records = read_corpus_file(resolve(j["corpus"].get<std::string>()));
      grid.splits = split_dataset(records, ratios, grid.seed, j.value("stratify", true));
    } else {
      grid.splits.train = read_corpus_file(resolve(j.at("train").get<std::string>()));
      if (j.contains("val")) grid.splits.val = read_corpus_file(resolve(j["val"].get<std::string>()));
      grid.splits.test = read_corpus_file(resolve(j.at("test").get<std::string>()));
    }

    const auto base_params = j.contains("params") ? params_from(j["params"], {}) : TrainingParams{};
    std::vector<TokenizerConfig> base_tokenizers{TokenizerConfig::words()};
    if (j.contains("tokenizers")) {
      base_tokenizers.clear();
      for (const auto& t : j["tokenizers"]) base_tokenizers.push_back(tokenizer_from(t));
    }

    std::set<CellKey> seen;
    for (const auto& cell : j.at("cells")) {
      auto tokenizers = base_tokenizers;
      if (cell.contains("tokenizers")) {
        tokenizers.clear();
        for (const auto& t : cell["tokenizers"]) tokenizers.push_back(tokenizer_from(t));
      }
      const auto params = cell.contains("params") ? params_from(cell["params"], base_params) : base_params;
      for (const auto& m : string_or_list(cell, "model")) {
        for (const auto& f : string_or_list(cell, "features")) {
          for (const auto& v : string_or_list(cell, "variant")) {
            for (const auto& p : string_or_list(cell, "part")) {
              CellKey key{parse_field<ModelKind>(m, "model", parse_model_kind),
                          parse_field<Weighting>(f, "features", parse_weighting),
                          parse_field<InputVariant>(v, "variant", parse_input_variant),
                          parse_field<NamePart>(p, "part", parse_name_part)};
              if (!seen.insert(key).second) {
                throw Error(ErrorCode::kInvalidArgument, "duplicate cell " + to_string(key));
              }
              grid.cells.push_back({key, tokenizers, params});
            }
          }
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("grid config: ") + e.what());
  }
  if (grid.cells.empty()) throw Error(ErrorCode::kInvalidArgument, "grid config lists no cells");
  return grid;
}

std::vector<EvalReport> run_experiment(const ExperimentGrid& grid) {
  auto cells = grid.cells;
  std::sort(cells.begin(), cells.end(), [](const CellSpec& a, const CellSpec& b) { return a.key < b.key; });
  std::vector<EvalReport> reports;
  for (const auto& cell : cells) {
    try {
      reports.push_back(run_cell(cell, grid.splits, grid.seed).report);
    } catch (const Error& e) {
      EvalReport failed;
      failed.cell = cell.key;
      failed.tokenizer = cell.tokenizers.empty() ? TokenizerConfig{} : cell.tokenizers.front();
      failed.error = e.what();
      reports.push_back(std::move(failed));
    }
  }
  return reports;
}

TrainingParams parse_training_params(std::string_view json_text, TrainingParams base) {
  const auto j = parse_json(json_text, "training params");
  try {
    return params_from(j, base);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("training params: ") + e.what());
  }
}

TokenizerConfig parse_tokenizer(std::string_view json_text) {
  const auto j = parse_json(json_text, "tokenizer");
  try {
    return tokenizer_from(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("tokenizer: ") + e.what());
  }
}

std::string reports_to_json(std::span<const EvalReport> reports) {
  auto out = Json::array();
  for (const auto& r : reports) {
    Json j;
    j["model"] = to_string(r.cell.model);
    j["features"] = to_string(r.cell.weighting);
    j["variant"] = to_string(r.cell.variant);
    j["part"] = to_string(r.cell.part);
    j["tokenizer"] = tokenizer_to(r.tokenizer);
    if (r.error) {
      j["error"] = *r.error;
      out.push_back(std::move(j));
      continue;
    }
    j["f1_female"] = r.f1.female;
    j["f1_male"] = r.f1.male;
    j["macro_f1"] = r.f1.macro;
    j["accuracy"] = r.accuracy;
    j["degenerate"] = r.f1.degenerate;
    j["confusion"] = r.confusion.counts;
    j["fallback_rate"] = r.fallback_rate;
    j["train_rows"] = r.train_rows;
    j["test_rows"] = r.test_rows;
    j["validation_macro_f1"] = r.validation_macro_f1 ? Json(*r.validation_macro_f1) : Json(nullptr);
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::string reports_to_csv(std::span<const EvalReport> reports) {
  std::string out(kReportCsvHeader);
  out += "\n";
  for (const auto& r : reports) {
    out += std::string(to_string(r.cell.model)) + "," + std::string(to_string(r.cell.weighting)) + "," +
           std::string(to_string(r.cell.variant)) + "," + std::string(to_string(r.cell.part));
    if (r.error) {
      out += ",,,,,\n";
      continue;
    }
    out += "," + fixed(r.f1.female) + "," + fixed(r.f1.male) + "," + fixed(r.f1.macro) + "," + fixed(r.accuracy) +
           "," + fixed(r.fallback_rate) + "\n";
  }
  return out;
}

}  // namespace gendec
