#include <algorithm>
#include <cmath>

#include "models_common.hpp"

namespace gendec {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Gender argmax(const ClassProbabilities& p) { return p[1] > p[0] ? Gender::kMale : Gender::kFemale; }

// Dense scatter of one sparse row so deep trees walk in O(depth).
class DenseRow {
 public:
  explicit DenseRow(std::size_t cols) : values_(cols, 0.0) {}

  void load(const FeatureMatrix& X, std::size_t r) {
    for (const auto c : cols_) values_[c] = 0.0;
    cols_ = X.row_cols(r);
    const auto vals = X.row_values(r);
    for (std::size_t k = 0; k < cols_.size(); ++k) values_[cols_[k]] = vals[k];
  }

  double operator[](std::size_t c) const { return values_[c]; }

 private:
  std::vector<double> values_;
  std::span<const std::uint32_t> cols_;
};

std::size_t leaf_for(const TreeModel& tree, const DenseRow& x) {
  std::size_t node = 0;
  while (!tree.is_leaf(node)) {
    const double v = x[static_cast<std::size_t>(tree.feature[node])];
    node = static_cast<std::size_t>(v > tree.threshold[node] ? tree.right[node] : tree.left[node]);
  }
  return node;
}

Gender leaf_vote(const TreeModel& tree, std::size_t leaf) {
  const auto& c = tree.class_counts[leaf];
  return c[1] > c[0] ? Gender::kMale : Gender::kFemale;
}

std::array<double, 2> nb_joint_log_likelihood(const NBModel& model, const FeatureMatrix& X, std::size_t r) {
  std::array<double, 2> jll = model.class_log_prior;
  const auto cols = X.row_cols(r);
  const auto vals = X.row_values(r);
  for (int c = 0; c < 2; ++c) {
    if (std::isinf(jll[c])) continue;
    for (std::size_t k = 0; k < cols.size(); ++k) jll[c] += vals[k] * model.feature_log_prob[c][cols[k]];
  }
  // scores equal up to summation rounding are a tie
  if (std::isfinite(jll[0]) && std::isfinite(jll[1])) {
    const double scale = std::max({1.0, std::abs(jll[0]), std::abs(jll[1])});
    if (std::abs(jll[1] - jll[0]) <= 1e-12 * scale) jll[1] = jll[0];
  }
  return jll;
}

ClassProbabilities normalize_log(const std::array<double, 2>& jll) {
  const double top = std::max(jll[0], jll[1]);
  const double e0 = std::exp(jll[0] - top);
  const double e1 = std::exp(jll[1] - top);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_columns(const Classifier& model, const FeatureMatrix& X) {
  const auto expected = feature_count(model);
  if (X.cols != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model expects " + std::to_string(expected) + " columns, got " + std::to_string(X.cols));
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kNaiveBayes: return "nb";
    case ModelKind::kLogistic: return "lr";
    case ModelKind::kTree: return "dt";
    case ModelKind::kForest: return "rf";
    case ModelKind::kSvm: return "svm";
  }
  return "nb";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
  for (const auto kind :
       {ModelKind::kNaiveBayes, ModelKind::kLogistic, ModelKind::kTree, ModelKind::kForest, ModelKind::kSvm}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

bool supports_proba(ModelKind kind) { return kind != ModelKind::kSvm; }

Classifier train_model(ModelKind kind, const FeatureMatrix& X, std::span<const Gender> y,
                       const TrainingParams& params) {
  switch (kind) {
    case ModelKind::kNaiveBayes: return train_naive_bayes(X, y, params.nb_alpha);
    case ModelKind::kLogistic: return train_logistic(X, y, params.lr);
    case ModelKind::kTree: return train_tree(X, y, params.tree);
    case ModelKind::kForest: {
      auto forest = params.forest;
      forest.tree = params.tree;
      return train_forest(X, y, forest);
    }
    case ModelKind::kSvm: return train_svm(X, y, params.svm);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown model kind");
}

ModelKind kind_of(const Classifier& model) {
  return std::visit(Overloaded{[](const NBModel&) { return ModelKind::kNaiveBayes; },
                               [](const LRModel&) { return ModelKind::kLogistic; },
                               [](const TreeModel&) { return ModelKind::kTree; },
                               [](const ForestModel&) { return ModelKind::kForest; },
                               [](const SVMModel&) { return ModelKind::kSvm; }},
                    model);
}

std::size_t feature_count(const Classifier& model) {
  return std::visit(Overloaded{[](const NBModel& m) { return m.feature_log_prob[0].size(); },
                               [](const LRModel& m) { return m.weights.size(); },
                               [](const TreeModel& m) { return m.n_features; },
                               [](const ForestModel& m) { return m.trees.empty() ? 0 : m.trees.front().n_features; },
                               [](const SVMModel& m) { return m.weights.size(); }},
                    model);
}

std::vector<double> decision_scores(const Classifier& model, const FeatureMatrix& X) {
  check_columns(model, X);
  const auto linear = [&](std::span<const double> w, double b) {
    std::vector<double> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) out[r] = detail::dot_row(X, r, w) + b;
    return out;
  };
  if (const auto* lr = std::get_if<LRModel>(&model)) return linear(lr->weights, lr->bias);
  if (const auto* svm = std::get_if<SVMModel>(&model)) return linear(svm->weights, svm->bias);
  throw Error(ErrorCode::kUnsupported, "decision scores exist only for linear models");
}

std::vector<ClassProbabilities> predict_proba(const Classifier& model, const FeatureMatrix& X) {
  check_columns(model, X);
  std::vector<ClassProbabilities> out(X.rows);
  std::visit(Overloaded{
                 [&](const NBModel& m) {
                   for (std::size_t r = 0; r < X.rows; ++r) out[r] = normalize_log(nb_joint_log_likelihood(m, X, r));
                 },
                 [&](const LRModel& m) {
                   for (std::size_t r = 0; r < X.rows; ++r) {
                     const double p = sigmoid(detail::dot_row(X, r, m.weights) + m.bias);
                     out[r] = {1.0 - p, p};
                   }
                 },
                 [&](const TreeModel& m) {
                   DenseRow x(X.cols);
                   for (std::size_t r = 0; r < X.rows; ++r) {
                     x.load(X, r);
                     const auto& c = m.class_counts[leaf_for(m, x)];
                     const double n = static_cast<double>(c[0] + c[1]);
                     out[r] = {static_cast<double>(c[0]) / n, static_cast<double>(c[1]) / n};
                   }
                 },
                 [&](const ForestModel& m) {
                   DenseRow x(X.cols);
                   for (std::size_t r = 0; r < X.rows; ++r) {
                     x.load(X, r);
                     double male_votes = 0.0;
                     for (const auto& tree : m.trees) {
                       if (leaf_vote(tree, leaf_for(tree, x)) == Gender::kMale) male_votes += 1.0;
                     }
                     const double n = static_cast<double>(m.trees.size());
                     out[r] = {(n - male_votes) / n, male_votes / n};
                   }
                 },
                 [&](const SVMModel&) {
                   throw Error(ErrorCode::kUnsupported, "SVM models do not produce probabilities");
                 }},
             model);
  return out;
}

std::vector<Gender> predict(const Classifier& model, const FeatureMatrix& X) {
  check_columns(model, X);
  if (std::holds_alternative<SVMModel>(model)) {
    const auto scores = decision_scores(model, X);
    std::vector<Gender> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) out[r] = scores[r] > 0.0 ? Gender::kMale : Gender::kFemale;
    return out;
  }
  if (const auto* nb = std::get_if<NBModel>(&model)) {
    std::vector<Gender> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) {
      const auto jll = nb_joint_log_likelihood(*nb, X, r);
      out[r] = jll[1] > jll[0] ? Gender::kMale : Gender::kFemale;
    }
    return out;
  }
  if (const auto* forest = std::get_if<ForestModel>(&model)) {
    std::vector<Gender> out(X.rows);
    DenseRow x(X.cols);
    for (std::size_t r = 0; r < X.rows; ++r) {
      x.load(X, r);
      std::size_t male_votes = 0;
      for (const auto& tree : forest->trees) male_votes += leaf_vote(tree, leaf_for(tree, x)) == Gender::kMale;
      out[r] = 2 * male_votes > forest->trees.size() ? Gender::kMale : Gender::kFemale;
    }
    return out;
  }
  if (const auto* tree = std::get_if<TreeModel>(&model)) {
    std::vector<Gender> out(X.rows);
    DenseRow x(X.cols);
    for (std::size_t r = 0; r < X.rows; ++r) {
      x.load(X, r);
      out[r] = leaf_vote(*tree, leaf_for(*tree, x));
    }
    return out;
  }
  const auto proba = predict_proba(model, X);
  std::vector<Gender> out(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) out[r] = argmax(proba[r]);
  return out;
}

}  // namespace gendec
