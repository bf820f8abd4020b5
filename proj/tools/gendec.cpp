#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gendec/corpus.hpp"
#include "gendec/error.hpp"
#include "gendec/eval.hpp"
#include "gendec/model_io.hpp"
#include "gendec/rng.hpp"
#include "gendec/translit.hpp"
#include "json.hpp"

namespace {

using namespace gendec;
using Json = nlohmann::ordered_json;

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path);
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * fraction);
  return buf;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <class T, class Parse>
T parse_or_throw(const std::string& text, const char* what, Parse parse) {
  const auto value = parse(text);
  if (!value) throw Error(ErrorCode::kInvalidArgument, std::string("unknown ") + what + " \"" + text + "\"");
  return *value;
}

// ---- build-dataset ---------------------------------------------------------

struct BuildArgs {
  std::string given;
  std::string family;
  std::string out;
  std::string meta;
  std::string pairing = "one-to-one";
  std::size_t k = 1;
  std::uint64_t seed = 42;
};

int cmd_build_dataset(const BuildArgs& a) {
  const auto raw_given = read_raw_names_file(a.given);
  const auto family = read_raw_names_file(a.family);
  const auto firsts = dedupe_first_names(raw_given);
  const PairingConfig pairing{parse_or_throw<PairingMode>(a.pairing, "pairing mode", parse_pairing_mode), a.k};
  const auto records = build_dataset(firsts, family, pairing, a.seed);
  write_corpus_file(a.out, records);

  const double male = male_fraction(records);
  std::size_t males = 0;
  for (const auto& r : records) males += r.gender == Gender::kMale;
  Json meta;
  meta["seed"] = a.seed;
  meta["pairing"] = {{"mode", to_string(pairing.mode)}, {"k", pairing.k}};
  meta["prng"] = Rng::kAlgorithm;
  meta["rows"] = {{"given_input", raw_given.size()},
                  {"given_deduplicated", firsts.size()},
                  {"family_input", family.size()},
                  {"corpus", records.size()},
                  {"male", males},
                  {"female", records.size() - males}};
  write_text(a.meta.empty() ? a.out + ".meta.json" : a.meta, meta.dump(2) + "\n");
  std::cout << "rows: " << records.size() << "\n"
            << "male: " << percent(male) << "\n"
            << "female: " << percent(records.empty() ? 0.0 : 1.0 - male) << "\n";
  return 0;
}

// ---- split -----------------------------------------------------------------

struct SplitArgs {
  std::string in;
  std::string out_dir;
  SplitRatios ratios;
  std::uint64_t seed = 42;
  bool no_stratify = false;
};

int cmd_split(const SplitArgs& a) {
  a.ratios.validate();
  const auto records = read_corpus_file(a.in);
  const auto splits = split_dataset(records, a.ratios, a.seed, !a.no_stratify);
  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  write_corpus_file((dir / "train.csv").string(), splits.train);
  write_corpus_file((dir / "val.csv").string(), splits.val);
  write_corpus_file((dir / "test.csv").string(), splits.test);
  Json meta;
  meta["seed"] = a.seed;
  meta["ratios"] = {{"train", a.ratios.train}, {"val", a.ratios.val}, {"test", a.ratios.test}};
  meta["stratify"] = !a.no_stratify;
  meta["prng"] = Rng::kAlgorithm;
  meta["rows"] = {{"train", splits.train.size()}, {"val", splits.val.size()}, {"test", splits.test.size()}};
  write_text((dir / "split.meta.json").string(), meta.dump(2) + "\n");
  std::cout << "train: " << splits.train.size() << "\nval: " << splits.val.size()
            << "\ntest: " << splits.test.size() << "\n";
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string model = "nb";
  std::string features = "count";
  std::string part = "full";
  std::string variant = "original";
  std::string train;
  std::string out;
  std::uint64_t seed = 42;
  std::string tokenizer = "word";
  int ngram_min = 0;
  int ngram_max = 0;
  TrainingParams params;
  std::optional<std::size_t> max_depth;
  bool no_bootstrap = false;
};

int cmd_train(const TrainArgs& a) {
  const auto kind = parse_or_throw<ModelKind>(a.model, "model", parse_model_kind);
  CellSpec spec;
  spec.key = {kind, parse_or_throw<Weighting>(a.features, "features", parse_weighting),
              parse_or_throw<InputVariant>(a.variant, "variant", parse_input_variant),
              parse_or_throw<NamePart>(a.part, "part", parse_name_part)};
  TokenizerConfig tokenizer;
  tokenizer.mode = parse_or_throw<TokenMode>(a.tokenizer, "tokenizer", parse_token_mode);
  const bool chars = tokenizer.mode == TokenMode::kCharNgram;
  tokenizer.ngram_min = a.ngram_min > 0 ? a.ngram_min : (chars ? 2 : 1);
  tokenizer.ngram_max = a.ngram_max > 0 ? a.ngram_max : (chars ? 4 : 1);
  tokenizer.validate();
  spec.tokenizers = {tokenizer};
  spec.params = a.params;
  spec.params.tree.max_depth = a.max_depth;
  spec.params.forest.bootstrap = !a.no_bootstrap;

  const auto text = read_text(a.train);
  std::istringstream in(text);
  DatasetSplits splits;
  splits.train = read_corpus(in);
  if (splits.train.empty()) throw Error(ErrorCode::kEmpty, a.train + " has no records");

  const auto start = std::chrono::steady_clock::now();
  std::optional<ReadingDictionary> dict;
  if (spec.key.variant == InputVariant::kConverted) dict = build_reading_dictionary(splits.train).dictionary;
  const auto docs = extract_documents(splits.train, spec.key.part, spec.key.variant, dict ? &*dict : nullptr);
  const auto vocab = fit_vocabulary(docs.docs, tokenizer, spec.key.weighting == Weighting::kTfidf);
  const auto X = transform(docs.docs, vocab, spec.key.weighting);
  auto params = spec.params;
  params.set_seed(a.seed);
  TrainedModel model{train_model(kind, X, docs.labels, params), spec.key.weighting, vocab, spec.key.part,
                     spec.key.variant, dict, ModelMetadata{splits.train.size(), a.seed, reproducible_timestamp(),
                                                           fnv1a64_hex(text)}};
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_model(a.out, model);
  std::cout << "train rows: " << splits.train.size() << "\n"
            << "vocabulary: " << vocab.size() << "\n";
  std::cerr << "elapsed: " << fixed6(elapsed) << " s\n";
  return 0;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string model_file;
  std::string test;
  std::string report;
  std::string csv;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const auto model = load_model(a.model_file);
  const auto test = read_corpus_file(a.test);
  const std::vector<EvalReport> reports{evaluate_model(model, test)};
  if (!a.report.empty()) write_text(a.report, reports_to_json(reports));
  if (!a.csv.empty()) write_text(a.csv, reports_to_csv(reports));
  const auto& r = reports.front();
  std::cout << "cell: " << to_string(r.cell) << "\n"
            << "f1_female: " << fixed6(r.f1.female) << "\n"
            << "f1_male: " << fixed6(r.f1.male) << "\n"
            << "macro_f1: " << fixed6(r.f1.macro) << "\n"
            << "accuracy: " << fixed6(r.accuracy) << "\n"
            << "fallback_rate: " << fixed6(r.fallback_rate) << "\n";
  return 0;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  std::string model_file;
  std::optional<std::string> name;
  std::optional<std::string> batch;
};

std::vector<std::string> batch_names(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<std::string> names;
  std::string line;
  bool first = true;
  bool corpus = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      first = false;
      corpus = line == kCorpusHeader;
      if (corpus || line == "romaji" || line == "name") continue;
    }
    if (line.empty()) continue;
    names.push_back(corpus ? line.substr(0, line.find(',')) : line);
  }
  return names;
}

int cmd_predict(const PredictArgs& a) {
  if (a.name.has_value() == a.batch.has_value()) {
    throw Error(ErrorCode::kInvalidArgument, "give exactly one of --name or --batch");
  }
  const auto model = load_model(a.model_file);
  const auto names = a.name ? std::vector<std::string>{*a.name} : batch_names(*a.batch);
  const auto predictions = predict_names(model, names);
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::cout << names[i] << "\t" << to_string(predictions[i].gender);
    if (predictions[i].probability) std::cout << "\t" << fixed6(*predictions[i].probability);
    std::cout << "\n";
  }
  return 0;
}

// ---- stats -----------------------------------------------------------------

struct StatsArgs {
  std::string in;
  std::string gender;
  std::string part = "full";
  std::string out;
};

int cmd_stats(const std::string& which, const StatsArgs& a) {
  const auto records = read_corpus_file(a.in);
  const auto gender = parse_or_throw<Gender>(a.gender, "gender", parse_gender);
  std::string csv;
  if (which == "homonyms") {
    csv = "key,count\n";
    const auto histogram = homonym_stats(records);
    for (const auto& [k, count] : histogram.of(gender)) csv += std::to_string(k) + "," + std::to_string(count) + "\n";
    if (histogram.unaligned > 0) std::cerr << "unaligned records skipped: " << histogram.unaligned << "\n";
  } else {
    csv = "char,count\n";
    const auto part = parse_or_throw<NamePart>(a.part, "part", parse_name_part);
    for (const auto& [ch, count] : char_frequency(records, gender, part)) csv += ch + "," + std::to_string(count) + "\n";
  }
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_text(a.out, csv);
  }
  return 0;
}

// ---- translit --------------------------------------------------------------

int cmd_translit(const std::string& kana) {
  std::vector<std::string> warnings;
  std::cout << kana_to_romaji(kana, &warnings) << "\n";
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

// ---- grid ------------------------------------------------------------------

struct GridArgs {
  std::string config;
  std::string corpus;
  std::string report;
  std::string csv;
};

int cmd_grid(const GridArgs& a) {
  const auto base = std::filesystem::path(a.config).parent_path().string();
  auto text = read_text(a.config);
  if (!a.corpus.empty()) {
    auto config = Json::parse(text);
    for (const char* key : {"train", "val", "test"}) config.erase(key);
    config["corpus"] = std::filesystem::absolute(a.corpus).string();
    text = config.dump();
  }
  const auto grid = ExperimentGrid::from_json(text, base.empty() ? "." : base);
  const auto reports = run_experiment(grid);
  if (!a.report.empty()) write_text(a.report, reports_to_json(reports));
  const auto csv = reports_to_csv(reports);
  if (!a.csv.empty()) write_text(a.csv, csv);
  std::cout << csv;
  bool failed = false;
  for (const auto& r : reports) {
    if (r.error) {
      std::cerr << to_string(r.cell) << ": " << *r.error << "\n";
      failed = true;
    }
  }
  return failed ? kExitInput : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gender detection from romaji Japanese names"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build-dataset", "Join raw given and family name lists into a corpus");
  build_cmd->add_option("--given", build.given, "Raw given-name CSV")->required();
  build_cmd->add_option("--family", build.family, "Raw family-name CSV")->required();
  build_cmd->add_option("--out", build.out, "Corpus CSV to write")->required();
  build_cmd->add_option("--meta", build.meta, "Metadata JSON (default <out>.meta.json)");
  build_cmd->add_option("--pairing", build.pairing, "one-to-one or cross-k")->capture_default_str();
  build_cmd->add_option("--k", build.k, "Family names per given name in cross-k mode")->capture_default_str();
  build_cmd->add_option("--seed", build.seed, "Random seed")->capture_default_str();

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Shuffle and split a corpus into train/val/test");
  split_cmd->add_option("--in", split.in, "Corpus CSV")->required();
  split_cmd->add_option("--out-dir", split.out_dir, "Directory for train.csv, val.csv, test.csv")->required();
  split_cmd->add_option("--train", split.ratios.train, "Train ratio")->capture_default_str();
  split_cmd->add_option("--val", split.ratios.val, "Validation ratio")->capture_default_str();
  split_cmd->add_option("--test", split.ratios.test, "Test ratio")->capture_default_str();
  split_cmd->add_option("--seed", split.seed, "Random seed")->capture_default_str();
  split_cmd->add_flag("--no-stratify", split.no_stratify, "Shuffle without per-gender stratification");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train one model and write a model file");
  train_cmd->add_option("--model", train.model, "nb, lr, dt, rf or svm")->capture_default_str();
  train_cmd->add_option("--features", train.features, "count or tfidf")->capture_default_str();
  train_cmd->add_option("--part", train.part, "first, last or full")->capture_default_str();
  train_cmd->add_option("--variant", train.variant, "original or converted")->capture_default_str();
  train_cmd->add_option("--train", train.train, "Training corpus CSV")->required();
  train_cmd->add_option("--out", train.out, "Model file to write")->required();
  train_cmd->add_option("--seed", train.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--tokenizer", train.tokenizer, "word or char_ngram")->capture_default_str();
  train_cmd->add_option("--ngram-min", train.ngram_min, "Smallest n-gram (default 1 word, 2 char)");
  train_cmd->add_option("--ngram-max", train.ngram_max, "Largest n-gram (default 1 word, 4 char)");
  train_cmd->add_option("--alpha", train.params.nb_alpha, "Naive Bayes smoothing")->capture_default_str();
  train_cmd->add_option("--lr", train.params.lr.learning_rate, "Logistic regression step size")->capture_default_str();
  train_cmd->add_option("--epochs", train.params.lr.epochs, "Logistic regression epochs")->capture_default_str();
  train_cmd->add_option("--l2", train.params.lr.l2, "Logistic regression L2 penalty")->capture_default_str();
  train_cmd->add_option("--max-depth", train.max_depth, "Tree depth limit (default unbounded)");
  train_cmd->add_option("--min-samples-leaf", train.params.tree.min_samples_leaf, "Smallest leaf")
      ->capture_default_str();
  train_cmd->add_option("--n-trees", train.params.forest.n_trees, "Forest size")->capture_default_str();
  train_cmd->add_option("--features-per-split", train.params.forest.features_per_split,
                        "Columns tried per split (0 = ceil(sqrt(V)))")
      ->capture_default_str();
  train_cmd->add_flag("--no-bootstrap", train.no_bootstrap, "Train every tree on the full set");
  train_cmd->add_option("--lambda", train.params.svm.lambda, "SVM regularization")->capture_default_str();
  train_cmd->add_option("--svm-epochs", train.params.svm.epochs, "SVM passes over the data")->capture_default_str();

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model file on a labelled corpus");
  evaluate_cmd->add_option("--model-file", evaluate.model_file, "Model file")->required();
  evaluate_cmd->add_option("--test", evaluate.test, "Test corpus CSV")->required();
  evaluate_cmd->add_option("--report", evaluate.report, "JSON report to write");
  evaluate_cmd->add_option("--csv", evaluate.csv, "CSV report to write");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Predict genders for romaji names");
  predict_cmd->add_option("--model-file", predict_args.model_file, "Model file")->required();
  predict_cmd->add_option("--name", predict_args.name, "One name, \"Family Given\"");
  predict_cmd->add_option("--batch", predict_args.batch, "File with one name per line, or a corpus CSV");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics as CSV");
  stats_cmd->require_subcommand(1);
  for (const auto& [name, help] : {std::pair{"homonyms", "Kanji spellings per romaji given name"},
                                   std::pair{"chars", "Kanji character frequencies"}}) {
    auto* sub = stats_cmd->add_subcommand(name, help);
    sub->add_option("--in", stats.in, "Corpus CSV")->required();
    sub->add_option("--gender", stats.gender, "female or male")->required();
    sub->add_option("--out", stats.out, "CSV to write (default stdout)");
    if (std::string(name) == "chars") sub->add_option("--part", stats.part, "first, last or full")->capture_default_str();
  }

  std::string kana;
  auto* translit_cmd = app.add_subcommand("translit", "Romanize hiragana");
  translit_cmd->add_option("--kana", kana, "Hiragana text")->required();

  GridArgs grid;
  auto* grid_cmd = app.add_subcommand("grid", "Run an experiment grid from a JSON config");
  grid_cmd->add_option("--config", grid.config, "Grid config JSON")->required();
  grid_cmd->add_option("--corpus", grid.corpus, "Corpus CSV replacing the config's dataset paths");
  grid_cmd->add_option("--report", grid.report, "JSON report to write");
  grid_cmd->add_option("--csv", grid.csv, "CSV report to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*build_cmd) return cmd_build_dataset(build);
    if (*split_cmd) return cmd_split(split);
    if (*train_cmd) return cmd_train(train);
    if (*evaluate_cmd) return cmd_evaluate(evaluate);
    if (*predict_cmd) return cmd_predict(predict_args);
    if (*stats_cmd) return cmd_stats(stats_cmd->get_subcommands().front()->get_name(), stats);
    if (*translit_cmd) return cmd_translit(kana);
    if (*grid_cmd) return cmd_grid(grid);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kNonFinite ? kExitNumeric : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
