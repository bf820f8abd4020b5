#include <cmath>
#include <numeric>

#include "gendec/rng.hpp"
#include "models_common.hpp"

namespace gendec {

namespace {

// log(1 + exp(x)) without overflow
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_dimensions(const FeatureMatrix& X, std::span<const double> weights) {
  if (weights.size() != X.cols) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model has " + std::to_string(weights.size()) + " weights, matrix has " + std::to_string(X.cols) +
                    " columns");
  }
}

}  // namespace

double logistic_loss(const FeatureMatrix& X, std::span<const Gender> y, std::span<const double> weights, double bias,
                     double l2) {
  detail::check_training_inputs(X, y);
  check_dimensions(X, weights);
  double loss = 0.0;
  for (std::size_t r = 0; r < X.rows; ++r) {
    const double z = detail::dot_row(X, r, weights) + bias;
    // -log σ(z) for male, -log(1 - σ(z)) for female
    loss += softplus(y[r] == Gender::kMale ? -z : z);
  }
  loss /= static_cast<double>(X.rows);
  double norm_sq = 0.0;
  for (double w : weights) norm_sq += w * w;
  return loss + 0.5 * l2 * norm_sq;
}

LogisticGradient logistic_gradient(const FeatureMatrix& X, std::span<const Gender> y, std::span<const double> weights,
                                   double bias, double l2) {
  detail::check_training_inputs(X, y);
  check_dimensions(X, weights);
  LogisticGradient g{std::vector<double>(X.cols, 0.0), 0.0};
  const double inv_n = 1.0 / static_cast<double>(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) {
    const double residual = sigmoid(detail::dot_row(X, r, weights) + bias) - (y[r] == Gender::kMale ? 1.0 : 0.0);
    const auto cols = X.row_cols(r);
    const auto vals = X.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) g.weights[cols[k]] += residual * vals[k] * inv_n;
    g.bias += residual * inv_n;
  }
  for (std::size_t t = 0; t < X.cols; ++t) g.weights[t] += l2 * weights[t];
  return g;
}

LRModel train_logistic(const FeatureMatrix& X, std::span<const Gender> y, const LRParams& params) {
  detail::check_training_inputs(X, y);
  if (!(params.learning_rate > 0.0) || params.epochs < 1 || params.l2 < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "logistic regression needs learning_rate > 0, epochs >= 1, l2 >= 0");
  }
  LRModel model;
  model.weights.assign(X.cols, 0.0);
  model.l2 = params.l2;
  model.training_trace.reserve(static_cast<std::size_t>(params.epochs));
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    const double loss = logistic_loss(X, y, model.weights, model.bias, params.l2);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kNonFinite, "logistic loss diverged at epoch " + std::to_string(epoch));
    }
    model.training_trace.push_back(loss);
    const auto g = logistic_gradient(X, y, model.weights, model.bias, params.l2);
    for (std::size_t t = 0; t < X.cols; ++t) model.weights[t] -= params.learning_rate * g.weights[t];
    model.bias -= params.learning_rate * g.bias;
  }
  return model;
}

double hinge_loss(const FeatureMatrix& X, std::span<const Gender> y, std::span<const double> weights, double bias) {
  detail::check_training_inputs(X, y);
  check_dimensions(X, weights);
  double loss = 0.0;
  for (std::size_t r = 0; r < X.rows; ++r) {
    loss += std::max(0.0, 1.0 - detail::label_sign(y[r]) * (detail::dot_row(X, r, weights) + bias));
  }
  return loss / static_cast<double>(X.rows);
}

SVMModel train_svm(const FeatureMatrix& X, std::span<const Gender> y, const SVMParams& params) {
  detail::check_training_inputs(X, y);
  if (!(params.lambda > 0.0) || params.epochs < 1) {
    throw Error(ErrorCode::kInvalidArgument, "svm needs lambda > 0 and epochs >= 1");
  }
  // w = scale · v keeps the per-step shrink O(1)
  std::vector<double> v(X.cols, 0.0);
  double v_bias = 0.0;
  double scale = 1.0;
  std::vector<std::size_t> order(X.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(params.seed);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (const std::size_t r : order) {
      ++t;
      const double eta = 1.0 / (params.lambda * static_cast<double>(t));
      const double label = detail::label_sign(y[r]);
      const double margin = label * scale * (detail::dot_row(X, r, v) + v_bias);
      const double shrink = 1.0 - eta * params.lambda;
      if (shrink <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        v_bias = 0.0;
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      if (margin < 1.0) {
        const double step = eta * label / scale;
        const auto cols = X.row_cols(r);
        const auto vals = X.row_values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) v[cols[k]] += step * vals[k];
        v_bias += step;
      }
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        v_bias *= scale;
        scale = 1.0;
      }
    }
  }
  SVMModel model;
  model.lambda = params.lambda;
  model.epochs = params.epochs;
  model.seed = params.seed;
  model.weights.resize(X.cols);
  for (std::size_t c = 0; c < X.cols; ++c) model.weights[c] = scale * v[c];
  model.bias = scale * v_bias;
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::kNonFinite, "svm weights diverged");
  }
  if (!std::isfinite(model.bias)) throw Error(ErrorCode::kNonFinite, "svm bias diverged");
  return model;
}

}  // namespace gendec
