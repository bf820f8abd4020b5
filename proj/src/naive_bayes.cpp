#include <cmath>

#include "models_common.hpp"

namespace gendec {

NBModel train_naive_bayes(const FeatureMatrix& X, std::span<const Gender> y, double alpha) {
  detail::check_training_inputs(X, y);
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be positive");

  std::array<double, 2> class_count{};
  std::array<std::vector<double>, 2> token_count{std::vector<double>(X.cols, 0.0), std::vector<double>(X.cols, 0.0)};
  for (std::size_t r = 0; r < X.rows; ++r) {
    const int c = index_of(y[r]);
    class_count[c] += 1.0;
    const auto cols = X.row_cols(r);
    const auto vals = X.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) token_count[c][cols[k]] += vals[k];
  }

  NBModel model;
  model.alpha = alpha;
  model.single_class = class_count[0] == 0.0 || class_count[1] == 0.0;
  const double n = static_cast<double>(X.rows);
  const double v = static_cast<double>(X.cols);
  for (int c = 0; c < 2; ++c) {
    // an absent class gets -inf and can never win
    model.class_log_prior[c] = std::log(class_count[c] / n);
    double total = 0.0;
    for (double t : token_count[c]) total += t;
    const double denom = std::log(total + alpha * v);
    auto& flp = model.feature_log_prob[c];
    flp.resize(X.cols);
    for (std::size_t t = 0; t < X.cols; ++t) flp[t] = std::log(token_count[c][t] + alpha) - denom;
  }
  return model;
}

}  // namespace gendec
