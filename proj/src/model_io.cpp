#include "gendec/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <limits>

#include "gendec/error.hpp"
#include "json.hpp"

namespace gendec {

namespace {

using Json = nlohmann::json;

Json log_prob(double v) { return std::isinf(v) && v < 0 ? Json(nullptr) : Json(v); }
double log_prob(const Json& j) { return j.is_null() ? -std::numeric_limits<double>::infinity() : j.get<double>(); }

Json tree_to_json(const TreeModel& tree) {
  Json j;
  j["n_features"] = tree.n_features;
  j["max_depth"] = tree.params.max_depth ? Json(*tree.params.max_depth) : Json(nullptr);
  j["min_samples_leaf"] = tree.params.min_samples_leaf;
  j["rng_stream"] = tree.rng_stream;
  j["feature"] = tree.feature;
  j["threshold"] = tree.threshold;
  j["left"] = tree.left;
  j["right"] = tree.right;
  j["class_counts"] = tree.class_counts;
  return j;
}

TreeModel tree_from_json(const Json& j) {
  TreeModel tree;
  tree.n_features = j.at("n_features").get<std::size_t>();
  if (!j.at("max_depth").is_null()) tree.params.max_depth = j.at("max_depth").get<std::size_t>();
  tree.params.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
  tree.rng_stream = j.at("rng_stream").get<std::uint64_t>();
  j.at("feature").get_to(tree.feature);
  j.at("threshold").get_to(tree.threshold);
  j.at("left").get_to(tree.left);
  j.at("right").get_to(tree.right);
  j.at("class_counts").get_to(tree.class_counts);
  const auto n = tree.feature.size();
  if (n == 0 || tree.threshold.size() != n || tree.left.size() != n || tree.right.size() != n ||
      tree.class_counts.size() != n) {
    throw Error(ErrorCode::kSchemaError, "tree node arrays must be non-empty and equally long");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (tree.feature[i] < 0) continue;
    const auto in_range = [n](std::int32_t child) { return child > 0 && static_cast<std::size_t>(child) < n; };
    if (static_cast<std::size_t>(tree.feature[i]) >= tree.n_features || !in_range(tree.left[i]) ||
        !in_range(tree.right[i])) {
      throw Error(ErrorCode::kSchemaError, "tree node " + std::to_string(i) + " is out of range");
    }
  }
  return tree;
}

Json parameters_to_json(const Classifier& model) {
  Json j;
  if (const auto* nb = std::get_if<NBModel>(&model)) {
    j["alpha"] = nb->alpha;
    j["single_class"] = nb->single_class;
    j["class_log_prior"] = Json::array({log_prob(nb->class_log_prior[0]), log_prob(nb->class_log_prior[1])});
    j["feature_log_prob"] = nb->feature_log_prob;
  } else if (const auto* lr = std::get_if<LRModel>(&model)) {
    j["weights"] = lr->weights;
    j["bias"] = lr->bias;
    j["l2"] = lr->l2;
    j["training_trace"] = lr->training_trace;
  } else if (const auto* tree = std::get_if<TreeModel>(&model)) {
    j = tree_to_json(*tree);
  } else if (const auto* forest = std::get_if<ForestModel>(&model)) {
    j["n_trees"] = forest->trees.size();
    j["features_per_split"] = forest->features_per_split;
    j["bootstrap"] = forest->bootstrap;
    j["seed"] = forest->seed;
    j["trees"] = Json::array();
    for (const auto& t : forest->trees) j["trees"].push_back(tree_to_json(t));
  } else if (const auto* svm = std::get_if<SVMModel>(&model)) {
    j["weights"] = svm->weights;
    j["bias"] = svm->bias;
    j["lambda"] = svm->lambda;
    j["epochs"] = svm->epochs;
    j["seed"] = svm->seed;
  }
  return j;
}

Classifier parameters_from_json(ModelKind kind, const Json& j) {
  switch (kind) {
    case ModelKind::kNaiveBayes: {
      NBModel nb;
      nb.alpha = j.at("alpha").get<double>();
      nb.single_class = j.at("single_class").get<bool>();
      const auto& prior = j.at("class_log_prior");
      if (prior.size() != 2) throw Error(ErrorCode::kSchemaError, "class_log_prior needs two entries");
      nb.class_log_prior = {log_prob(prior.at(0)), log_prob(prior.at(1))};
      j.at("feature_log_prob").get_to(nb.feature_log_prob);
      if (nb.feature_log_prob[0].size() != nb.feature_log_prob[1].size()) {
        throw Error(ErrorCode::kSchemaError, "feature_log_prob rows differ in length");
      }
      return nb;
    }
    case ModelKind::kLogistic: {
      LRModel lr;
      j.at("weights").get_to(lr.weights);
      lr.bias = j.at("bias").get<double>();
      lr.l2 = j.at("l2").get<double>();
      j.at("training_trace").get_to(lr.training_trace);
      return lr;
    }
    case ModelKind::kTree: return tree_from_json(j);
    case ModelKind::kForest: {
      ForestModel forest;
      forest.features_per_split = j.at("features_per_split").get<std::size_t>();
      forest.bootstrap = j.at("bootstrap").get<bool>();
      forest.seed = j.at("seed").get<std::uint64_t>();
      for (const auto& t : j.at("trees")) forest.trees.push_back(tree_from_json(t));
      if (forest.trees.empty() || forest.trees.size() != j.at("n_trees").get<std::size_t>()) {
        throw Error(ErrorCode::kSchemaError, "forest n_trees does not match its tree list");
      }
      return forest;
    }
    case ModelKind::kSvm: {
      SVMModel svm;
      j.at("weights").get_to(svm.weights);
      svm.bias = j.at("bias").get<double>();
      svm.lambda = j.at("lambda").get<double>();
      svm.epochs = j.at("epochs").get<int>();
      svm.seed = j.at("seed").get<std::uint64_t>();
      return svm;
    }
  }
  throw Error(ErrorCode::kSchemaError, "unknown model kind");
}

template <class T, class Parse>
T parse_enum(const Json& j, const char* field, Parse parse) {
  const auto text = j.at(field).get<std::string>();
  const auto value = parse(text);
  if (!value) throw Error(ErrorCode::kSchemaError, std::string(field) + ": unknown value \"" + text + "\"");
  return *value;
}

std::string document_for(const TrainedModel& model, const std::string& raw) {
  const auto normalized = normalize_romaji(raw);
  if (normalized.empty()) throw Error(ErrorCode::kEmptyInput, "name is empty");
  if (model.part == NamePart::kFull) return normalized;
  if (normalized.find(' ') == std::string::npos) return normalized;
  const auto parts = split_romaji(normalized);
  return model.part == NamePart::kLast ? parts.family : parts.given;
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
  Json j;
  j["schema_version"] = kModelSchemaVersion;
  j["model_kind"] = to_string(kind_of(model.model));
  j["weighting"] = to_string(model.weighting);
  j["part"] = to_string(model.part);
  j["variant"] = to_string(model.variant);
  const auto& tok = model.vocabulary.tokenizer();
  j["tokenizer"] = {{"mode", to_string(tok.mode)}, {"ngram_min", tok.ngram_min}, {"ngram_max", tok.ngram_max}};
  j["vocabulary"]["tokens"] = model.vocabulary.tokens();
  j["vocabulary"]["idf"] = model.vocabulary.idf() ? Json(*model.vocabulary.idf()) : Json(nullptr);
  j["parameters"] = parameters_to_json(model.model);
  j["reading_dictionary"] = model.dictionary ? Json::parse(model.dictionary->to_json()) : Json(nullptr);
  j["metadata"] = {{"train_rows", model.metadata.train_rows},
                   {"seed", model.metadata.seed},
                   {"created_at", model.metadata.created_at},
                   {"corpus_checksum", model.metadata.corpus_checksum}};
  return j.dump() + "\n";
}

TrainedModel model_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    throw Error(ErrorCode::kSchemaError, "model file has no integer schema_version");
  }
  if (j["schema_version"].get<std::int64_t>() != kModelSchemaVersion) {
    throw Error(ErrorCode::kVersionMismatch, "unsupported model schema_version " + j["schema_version"].dump() +
                                                 " (expected " + std::to_string(kModelSchemaVersion) + ")");
  }
  try {
    TrainedModel model;
    const auto kind = parse_enum<ModelKind>(j, "model_kind", parse_model_kind);
    model.weighting = parse_enum<Weighting>(j, "weighting", parse_weighting);
    model.part = parse_enum<NamePart>(j, "part", parse_name_part);
    model.variant = parse_enum<InputVariant>(j, "variant", parse_input_variant);
    const auto& tj = j.at("tokenizer");
    TokenizerConfig tok{parse_enum<TokenMode>(tj, "mode", parse_token_mode), tj.at("ngram_min").get<int>(),
                        tj.at("ngram_max").get<int>()};
    tok.validate();
    std::optional<std::vector<double>> idf;
    if (!j.at("vocabulary").at("idf").is_null()) idf = j["vocabulary"]["idf"].get<std::vector<double>>();
    model.vocabulary = Vocabulary(j["vocabulary"].at("tokens").get<std::vector<std::string>>(), std::move(idf), tok);
    model.model = parameters_from_json(kind, j.at("parameters"));
    if (feature_count(model.model) != model.vocabulary.size()) {
      throw Error(ErrorCode::kSchemaError, "model parameters do not match the vocabulary size");
    }
    if (model.weighting == Weighting::kTfidf && !model.vocabulary.idf()) {
      throw Error(ErrorCode::kSchemaError, "tfidf model without idf weights");
    }
    if (!j.at("reading_dictionary").is_null()) {
      model.dictionary = ReadingDictionary::from_json(j["reading_dictionary"].dump());
    }
    const auto& meta = j.at("metadata");
    model.metadata.train_rows = meta.at("train_rows").get<std::size_t>();
    model.metadata.seed = meta.at("seed").get<std::uint64_t>();
    model.metadata.created_at = meta.at("created_at").get<std::int64_t>();
    model.metadata.corpus_checksum = meta.at("corpus_checksum").get<std::string>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("model file: ") + e.what());
  }
}

void save_model(const std::string& path, const TrainedModel& model) {
  const auto text = model_to_json(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return model_from_json(text);
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::int64_t reproducible_timestamp() {
  const char* env = std::getenv("SOURCE_DATE_EPOCH");
  if (!env || !*env) return 0;
  try {
    return std::stoll(env);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "SOURCE_DATE_EPOCH is not an integer");
  }
}

std::vector<NamePrediction> predict_names(const TrainedModel& model, std::span<const std::string> romaji_names) {
  std::vector<std::string> docs;
  docs.reserve(romaji_names.size());
  for (const auto& name : romaji_names) docs.push_back(document_for(model, name));
  const auto X = transform(docs, model.vocabulary, model.weighting);
  const auto labels = predict(model.model, X);
  std::vector<NamePrediction> out(labels.size());
  std::optional<std::vector<ClassProbabilities>> proba;
  if (supports_proba(kind_of(model.model))) proba = predict_proba(model.model, X);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i].gender = labels[i];
    if (proba) out[i].probability = (*proba)[i][index_of(labels[i])];
  }
  return out;
}

}  // namespace gendec
