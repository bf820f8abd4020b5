#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gendec/corpus.hpp"
#include "gendec/model_io.hpp"
#include "gendec/models.hpp"
#include "gendec/vectorize.hpp"

namespace gendec {

// ---- Metrics ---------------------------------------------------------------

struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};  // [true][predicted], by index_of(Gender)

  std::uint64_t at(Gender truth, Gender predicted) const { return counts[index_of(truth)][index_of(predicted)]; }
  std::uint64_t total() const { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws LengthMismatch or Empty.
ConfusionMatrix confusion(std::span<const Gender> y_true, std::span<const Gender> y_pred);

struct F1Scores {
  double female = 0.0;
  double male = 0.0;
  double macro = 0.0;
  bool degenerate = false;  // some precision, recall or F1 was 0/0 and set to 0
};

F1Scores f1_scores(const ConfusionMatrix& cm);
double accuracy(const ConfusionMatrix& cm);

// ---- Experiment cells ------------------------------------------------------

struct CellKey {
  ModelKind model = ModelKind::kNaiveBayes;
  Weighting weighting = Weighting::kCount;
  InputVariant variant = InputVariant::kOriginal;
  NamePart part = NamePart::kFull;

  auto operator<=>(const CellKey&) const = default;
};

std::string to_string(const CellKey& key);  // e.g. "rf/tfidf/original/full"

struct CellSpec {
  CellKey key;
  /// Candidate tokenizers. With more than one, the candidate with the best
  /// validation macro F1 is kept (earlier wins ties).
  std::vector<TokenizerConfig> tokenizers{TokenizerConfig::words()};
  TrainingParams params;
};

struct EvalReport {
  CellKey cell;
  TokenizerConfig tokenizer;
  F1Scores f1;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  double fallback_rate = 0.0;  // share of test names with a part kept in original romaji
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::optional<double> validation_macro_f1;
  std::optional<std::string> error;  // the cell failed; scores are meaningless
};

/// Per-part documents for classification. Converted names whose kanji part is
/// unknown to `dict` keep that part in original romaji.
struct ExtractedDocs {
  std::vector<std::string> docs;
  std::vector<Gender> labels;
  std::size_t fallbacks = 0;
};
ExtractedDocs extract_documents(std::span<const NameRecord> records, NamePart part, InputVariant variant,
                                const ReadingDictionary* dict);

/// Fits the vocabulary and model on `train` only. Converted cells build their
/// reading dictionary from `train` as well.
struct CellRun {
  TrainedModel model;
  EvalReport report;
};
CellRun run_cell(const CellSpec& spec, const DatasetSplits& splits, std::uint64_t seed);

/// Evaluates a trained model on labelled records.
EvalReport evaluate_model(const TrainedModel& model, std::span<const NameRecord> test);

// ---- Grid ------------------------------------------------------------------

struct ExperimentGrid {
  DatasetSplits splits;
  std::uint64_t seed = 42;
  std::vector<CellSpec> cells;

  /// JSON config. Dataset: either "train"/"val"/"test" CSV paths or "corpus"
  /// with optional "ratios" and "stratify". Each entry of "cells" names
  /// "model", "features", "variant" and "part" as a string or a list (lists
  /// expand to their product) plus optional "tokenizers" and "params". Paths
  /// resolve against `base_dir`. Throws InvalidArgument on duplicate cells.
  static ExperimentGrid from_json(std::string_view text, const std::string& base_dir = ".");
};

/// One report per cell, ordered by cell key. A failing cell is reported with
/// its error and does not stop the grid.
std::vector<EvalReport> run_experiment(const ExperimentGrid& grid);

TrainingParams parse_training_params(std::string_view json_text, TrainingParams base = {});
TokenizerConfig parse_tokenizer(std::string_view json_text);

std::string reports_to_json(std::span<const EvalReport> reports);
inline constexpr std::string_view kReportCsvHeader =
    "model,features,variant,part,f1_female,f1_male,macro_f1,accuracy,fallback_rate";
std::string reports_to_csv(std::span<const EvalReport> reports);

}  // namespace gendec
