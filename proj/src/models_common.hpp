#pragma once

#include <span>
#include <string>

#include "gendec/error.hpp"
#include "gendec/models.hpp"

namespace gendec::detail {

inline void check_training_inputs(const FeatureMatrix& X, std::span<const Gender> y) {
  if (X.rows != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(X.rows) + " feature rows but " + std::to_string(y.size()) + " labels");
  }
  if (X.rows == 0) throw Error(ErrorCode::kEmpty, "no training samples");
}

inline double label_sign(Gender g) { return g == Gender::kMale ? 1.0 : -1.0; }

inline double dot_row(const FeatureMatrix& X, std::size_t r, std::span<const double> w) {
  const auto cols = X.row_cols(r);
  const auto vals = X.row_values(r);
  double s = 0.0;
  for (std::size_t k = 0; k < cols.size(); ++k) s += vals[k] * w[cols[k]];
  return s;
}

}  // namespace gendec::detail
