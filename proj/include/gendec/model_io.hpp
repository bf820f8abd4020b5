#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "gendec/models.hpp"
#include "gendec/name_core.hpp"
#include "gendec/translit.hpp"
#include "gendec/vectorize.hpp"

namespace gendec {

struct ModelMetadata {
  std::size_t train_rows = 0;
  std::uint64_t seed = 42;
  std::int64_t created_at = 0;  // unix seconds
  std::string corpus_checksum;  // fnv1a64 hex of the training CSV bytes
  bool operator==(const ModelMetadata&) const = default;
};

/// A trained model with everything needed to featurize new names.
struct TrainedModel {
  Classifier model;
  Weighting weighting = Weighting::kCount;
  Vocabulary vocabulary;
  NamePart part = NamePart::kFull;
  InputVariant variant = InputVariant::kOriginal;
  std::optional<ReadingDictionary> dictionary;  // converted models only
  ModelMetadata metadata;
};

inline constexpr int kModelSchemaVersion = 1;

/// Single JSON document. Doubles are written in shortest round-trip form and
/// -inf log priors as null, so save -> load -> save is byte-identical.
std::string model_to_json(const TrainedModel& model);
/// Throws VersionMismatch on an unknown schema_version, SchemaError otherwise.
TrainedModel model_from_json(std::string_view text);

void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

std::string fnv1a64_hex(std::string_view bytes);

/// Seconds from SOURCE_DATE_EPOCH when set, else 0, keeping files reproducible.
std::int64_t reproducible_timestamp();

/// Featurizes romaji names ("Family Given") the way the model was trained and
/// returns the model's predictions.
struct NamePrediction {
  Gender gender = Gender::kFemale;
  std::optional<double> probability;  // of the predicted class
};
std::vector<NamePrediction> predict_names(const TrainedModel& model, std::span<const std::string> romaji_names);

}  // namespace gendec
