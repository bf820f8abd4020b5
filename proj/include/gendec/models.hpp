#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "gendec/name_core.hpp"
#include "gendec/vectorize.hpp"

namespace gendec {

enum class ModelKind { kNaiveBayes, kLogistic, kTree, kForest, kSvm };
std::string_view to_string(ModelKind kind);  // nb, lr, dt, rf, svm
std::optional<ModelKind> parse_model_kind(std::string_view text);

using ClassProbabilities = std::array<double, 2>;  // indexed by index_of(Gender)

// ---- Multinomial Naive Bayes -------------------------------------------

struct NBModel {
  std::array<double, 2> class_log_prior{};
  std::array<std::vector<double>, 2> feature_log_prob;
  double alpha = 1.0;
  bool single_class = false;  // trained on one label; predictions are constant
};

/// Fractional (TF-IDF) inputs are treated as fractional counts.
NBModel train_naive_bayes(const FeatureMatrix& X, std::span<const Gender> y, double alpha = 1.0);

// ---- Logistic regression -----------------------------------------------

struct LRParams {
  double learning_rate = 0.1;
  int epochs = 200;
  double l2 = 1e-4;
};

struct LRModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;
  std::vector<double> training_trace;  // loss before each epoch's update
};

/// Mean log loss plus (l2/2)·||w||²; the bias is not penalized.
double logistic_loss(const FeatureMatrix& X, std::span<const Gender> y, std::span<const double> weights, double bias,
                     double l2);

struct LogisticGradient {
  std::vector<double> weights;
  double bias = 0.0;
};
LogisticGradient logistic_gradient(const FeatureMatrix& X, std::span<const Gender> y, std::span<const double> weights,
                                   double bias, double l2);

/// Full-batch gradient descent from zero. Throws NonFinite on divergence.
LRModel train_logistic(const FeatureMatrix& X, std::span<const Gender> y, const LRParams& params = {});

// ---- CART decision tree --------------------------------------------------

struct TreeParams {
  std::optional<std::size_t> max_depth;  // nullopt = unbounded
  std::size_t min_samples_leaf = 1;
};

/// Flat node arrays. Node 0 is the root; a node is a leaf iff feature < 0.
/// Samples go right when x[feature] > threshold.
struct TreeModel {
  std::size_t n_features = 0;
  std::vector<std::int32_t> feature;
  std::vector<double> threshold;
  std::vector<std::int32_t> left;
  std::vector<std::int32_t> right;
  std::vector<std::array<std::uint64_t, 2>> class_counts;  // per node, indexed by index_of(Gender)
  TreeParams params;
  std::uint64_t rng_stream = 0;

  std::size_t node_count() const { return feature.size(); }
  bool is_leaf(std::size_t node) const { return feature[node] < 0; }
  std::size_t depth() const;
};

/// Gini CART over every (column, midpoint) candidate. Ties go to the lowest
/// column, then the lowest threshold.
TreeModel train_tree(const FeatureMatrix& X, std::span<const Gender> y, const TreeParams& params = {});

// ---- Random forest -------------------------------------------------------

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t features_per_split = 0;  // 0 = ceil(sqrt(V))
  bool bootstrap = true;
  std::uint64_t seed = 42;
  TreeParams tree;
};

struct ForestModel {
  std::vector<TreeModel> trees;
  std::size_t features_per_split = 0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

/// Tree t draws its bootstrap sample and split features from the stream
/// Rng(seed, t), so the result does not depend on training order.
ForestModel train_forest(const FeatureMatrix& X, std::span<const Gender> y, const ForestParams& params = {});

// ---- Linear SVM ----------------------------------------------------------

struct SVMParams {
  double lambda = 1e-4;
  int epochs = 20;
  std::uint64_t seed = 42;
};

struct SVMModel {
  std::vector<double> weights;
  double bias = 0.0;
  double lambda = 1e-4;
  int epochs = 20;
  std::uint64_t seed = 42;
};

/// Mean of max(0, 1 - y·(w·x + b)) with female = -1, male = +1.
double hinge_loss(const FeatureMatrix& X, std::span<const Gender> y, std::span<const double> weights, double bias);

/// Pegasos stochastic subgradient descent with step 1/(lambda·t). The bias is
/// an extra constant-1 feature and is regularized with the weights.
SVMModel train_svm(const FeatureMatrix& X, std::span<const Gender> y, const SVMParams& params = {});

// ---- Prediction ----------------------------------------------------------

using Classifier = std::variant<NBModel, LRModel, TreeModel, ForestModel, SVMModel>;

ModelKind kind_of(const Classifier& model);
std::size_t feature_count(const Classifier& model);

/// All ties resolve to female.
std::vector<Gender> predict(const Classifier& model, const FeatureMatrix& X);

/// Throws Unsupported for SVM models.
std::vector<ClassProbabilities> predict_proba(const Classifier& model, const FeatureMatrix& X);

/// Raw w·x + b for the linear models (LR logit, SVM margin).
std::vector<double> decision_scores(const Classifier& model, const FeatureMatrix& X);

bool supports_proba(ModelKind kind);

// ---- Dispatch --------------------------------------------------------------

struct TrainingParams {
  double nb_alpha = 1.0;
  LRParams lr;
  TreeParams tree;      // also shapes every forest tree
  ForestParams forest;  // forest.tree is ignored
  SVMParams svm;

  /// Sets the seed of every randomized trainer.
  void set_seed(std::uint64_t seed) {
    forest.seed = seed;
    svm.seed = seed;
  }
};

Classifier train_model(ModelKind kind, const FeatureMatrix& X, std::span<const Gender> y,
                       const TrainingParams& params = {});

}  // namespace gendec
