#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "gendec/rng.hpp"
#include "models_common.hpp"

namespace gendec {

namespace {

struct Csc {
  std::vector<std::size_t> col_ptr;
  std::vector<std::uint32_t> row_idx;
  std::vector<double> values;
};

Csc to_csc(const FeatureMatrix& X) {
  Csc csc;
  csc.col_ptr.assign(X.cols + 1, 0);
  for (const auto c : X.col_idx) ++csc.col_ptr[c + 1];
  for (std::size_t c = 0; c < X.cols; ++c) csc.col_ptr[c + 1] += csc.col_ptr[c];
  csc.row_idx.resize(X.nnz());
  csc.values.resize(X.nnz());
  std::vector<std::size_t> fill(csc.col_ptr.begin(), csc.col_ptr.end() - 1);
  for (std::size_t r = 0; r < X.rows; ++r) {
    const auto cols = X.row_cols(r);
    const auto vals = X.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto at = fill[cols[k]]++;
      csc.row_idx[at] = static_cast<std::uint32_t>(r);
      csc.values[at] = vals[k];
    }
  }
  return csc;
}

// Columns with at least one nonzero among a node's samples, with how many
// samples carry each. The larger child of a split inherits its parent's index
// minus the smaller child's rows, so maintenance costs O(smaller side).
class ColumnIndex {
 public:
  void add_row(const FeatureMatrix& X, std::size_t r) {
    for (const auto c : X.row_cols(r)) {
      const auto [it, inserted] = where_.try_emplace(c, static_cast<std::uint32_t>(dense_.size()));
      if (inserted) {
        dense_.push_back(c);
        count_.push_back(1);
      } else {
        ++count_[it->second];
      }
    }
  }

  void remove_row(const FeatureMatrix& X, std::size_t r) {
    for (const auto c : X.row_cols(r)) {
      const auto it = where_.find(c);
      const auto i = it->second;
      if (--count_[i] > 0) continue;
      const auto last = static_cast<std::uint32_t>(dense_.size() - 1);
      if (i != last) {
        dense_[i] = dense_[last];
        count_[i] = count_[last];
        where_[dense_[i]] = i;
      }
      dense_.pop_back();
      count_.pop_back();
      where_.erase(it);
    }
  }

  std::size_t size() const { return dense_.size(); }
  std::uint32_t column(std::size_t i) const { return dense_[i]; }

  void swap_positions(std::size_t i, std::size_t j) {
    if (i == j) return;
    std::swap(dense_[i], dense_[j]);
    std::swap(count_[i], count_[j]);
    where_[dense_[i]] = static_cast<std::uint32_t>(i);
    where_[dense_[j]] = static_cast<std::uint32_t>(j);
  }

 private:
  std::unordered_map<std::uint32_t, std::uint32_t> where_;
  std::vector<std::uint32_t> dense_;
  std::vector<std::uint32_t> count_;
};

using Counts = std::array<std::uint64_t, 2>;

struct Entry {
  double value;
  std::uint32_t sample;
};

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // Σ over children of (f² + m²) / n; larger is purer
};

struct WorkItem {
  std::size_t node = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t depth = 0;
  std::size_t nnz = 0;
  ColumnIndex index;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& X, const Csc& csc, std::span<const Gender> y, std::vector<std::uint32_t> weights,
              const TreeParams& params, std::size_t features_per_split, Rng* rng)
      : X_(X), csc_(csc), y_(y), weights_(std::move(weights)), params_(params),
        features_per_split_(features_per_split), rng_(rng), stamp_(X.cols, 0), slot_(X.cols, 0) {}

  TreeModel build() {
    model_.n_features = X_.cols;
    model_.params = params_;
    pos_.assign(X_.rows, 0);
    WorkItem root;
    Counts root_counts{};
    for (std::size_t r = 0; r < X_.rows; ++r) {
      if (weights_[r] == 0) continue;
      pos_[r] = perm_.size();
      perm_.push_back(static_cast<std::uint32_t>(r));
      root_counts[index_of(y_[r])] += weights_[r];
      root.index.add_row(X_, r);
      root.nnz += X_.row_cols(r).size();
    }
    root.end = perm_.size();
    root.node = add_node(root_counts);

    std::vector<WorkItem> stack;
    stack.push_back(std::move(root));
    while (!stack.empty()) {
      WorkItem item = std::move(stack.back());
      stack.pop_back();
      expand(std::move(item), stack);
    }
    return std::move(model_);
  }

 private:
  std::size_t add_node(const Counts& counts) {
    model_.feature.push_back(-1);
    model_.threshold.push_back(0.0);
    model_.left.push_back(-1);
    model_.right.push_back(-1);
    model_.class_counts.push_back(counts);
    return model_.feature.size() - 1;
  }

  void expand(WorkItem item, std::vector<WorkItem>& stack) {
    const Counts counts = model_.class_counts[item.node];
    const std::uint64_t total = counts[0] + counts[1];
    if (counts[0] == 0 || counts[1] == 0) return;
    if (params_.max_depth && item.depth >= *params_.max_depth) return;
    if (total < 2 * params_.min_samples_leaf) return;

    const auto split = find_split(item, counts);
    if (!split) return;

    // move samples going right to the back of the range
    const auto best_column = static_cast<std::uint32_t>(split->feature);
    const auto& entries = gather(item, std::span<const std::uint32_t>(&best_column, 1));
    std::size_t boundary = item.end;
    Counts right_counts{};
    for (const auto& e : entries[0]) {
      if (!(e.value > split->threshold)) continue;
      right_counts[index_of(y_[e.sample])] += weights_[e.sample];
      --boundary;
      const std::size_t from = pos_[e.sample];
      const std::uint32_t displaced = perm_[boundary];
      std::swap(perm_[from], perm_[boundary]);
      pos_[displaced] = from;
      pos_[e.sample] = boundary;
    }
    const Counts left_counts{counts[0] - right_counts[0], counts[1] - right_counts[1]};
    const auto left_node = add_node(left_counts);
    const auto right_node = add_node(right_counts);
    model_.feature[item.node] = split->feature;
    model_.threshold[item.node] = split->threshold;
    model_.left[item.node] = static_cast<std::int32_t>(left_node);
    model_.right[item.node] = static_cast<std::int32_t>(right_node);

    WorkItem left{left_node, item.begin, boundary, item.depth + 1, 0, {}};
    WorkItem right{right_node, boundary, item.end, item.depth + 1, 0, {}};
    const bool right_is_light = (right.end - right.begin) <= (left.end - left.begin);
    WorkItem& light = right_is_light ? right : left;
    WorkItem& heavy = right_is_light ? left : right;
    for (std::size_t i = light.begin; i < light.end; ++i) {
      light.index.add_row(X_, perm_[i]);
      item.index.remove_row(X_, perm_[i]);
      light.nnz += X_.row_cols(perm_[i]).size();
    }
    heavy.index = std::move(item.index);
    heavy.nnz = item.nnz - light.nnz;
    stack.push_back(std::move(heavy));
    stack.push_back(std::move(light));
  }

  std::optional<Split> find_split(WorkItem& item, const Counts& counts) {
    const std::size_t present = item.index.size();
    std::size_t k = present;
    if (features_per_split_ != 0 && features_per_split_ < present) {
      k = features_per_split_;
      for (std::size_t i = 0; i < k; ++i) {
        item.index.swap_positions(i, i + static_cast<std::size_t>(rng_->below(present - i)));
      }
    }
    std::optional<Split> best;
    evaluate(item, counts, 0, k, best);
    // every sampled column was constant in this node: widen to the rest
    if (!best && k < present) evaluate(item, counts, k, present, best);
    return best;
  }

  void evaluate(const WorkItem& item, const Counts& counts, std::size_t from, std::size_t to,
                std::optional<Split>& best) {
    candidates_.clear();
    for (std::size_t i = from; i < to; ++i) candidates_.push_back(item.index.column(i));
    auto& entries = gather(item, candidates_);
    for (std::size_t i = 0; i < candidates_.size(); ++i) score_column(candidates_[i], entries[i], counts, best);
  }

  // Node-local nonzeros for each column in `columns`, either by filtering the
  // global column lists or by scanning the node's rows, whichever is cheaper.
  std::vector<std::vector<Entry>>& gather(const WorkItem& item, std::span<const std::uint32_t> columns) {
    if (buckets_.size() < columns.size()) buckets_.resize(columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) buckets_[i].clear();
    std::size_t filter_cost = 0;
    for (const auto c : columns) filter_cost += csc_.col_ptr[c + 1] - csc_.col_ptr[c];
    const auto in_node = [&](std::uint32_t r) {
      return weights_[r] != 0 && pos_[r] >= item.begin && pos_[r] < item.end;
    };
    if (filter_cost <= item.nnz) {
      for (std::size_t i = 0; i < columns.size(); ++i) {
        const auto c = columns[i];
        for (std::size_t at = csc_.col_ptr[c]; at < csc_.col_ptr[c + 1]; ++at) {
          const auto r = csc_.row_idx[at];
          if (in_node(r)) buckets_[i].push_back({csc_.values[at], r});
        }
      }
    } else {
      ++current_stamp_;
      for (std::size_t i = 0; i < columns.size(); ++i) {
        stamp_[columns[i]] = current_stamp_;
        slot_[columns[i]] = static_cast<std::uint32_t>(i);
      }
      for (std::size_t p = item.begin; p < item.end; ++p) {
        const auto r = perm_[p];
        const auto cols = X_.row_cols(r);
        const auto vals = X_.row_values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
          if (stamp_[cols[k]] == current_stamp_) buckets_[slot_[cols[k]]].push_back({vals[k], r});
        }
      }
    }
    return buckets_;
  }

  void score_column(std::uint32_t column, std::vector<Entry>& entries, const Counts& counts,
                    std::optional<Split>& best) const {
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
    Counts zeros{counts};
    for (const auto& e : entries) zeros[index_of(y_[e.sample])] -= weights_[e.sample];
    const bool have_zeros = zeros[0] + zeros[1] > 0;
    const auto min_leaf = static_cast<double>(params_.min_samples_leaf);
    const double total_f = static_cast<double>(counts[0]);
    const double total_m = static_cast<double>(counts[1]);
    Counts left{};
    bool have_left = false;
    double previous = 0.0;
    const auto boundary = [&](double value) {
      if (!have_left) return;
      const double lf = static_cast<double>(left[0]);
      const double lm = static_cast<double>(left[1]);
      const double rf = total_f - lf;
      const double rm = total_m - lm;
      const double nl = lf + lm;
      const double nr = rf + rm;
      if (nl < min_leaf || nr < min_leaf) return;
      const double score = (lf * lf + lm * lm) / nl + (rf * rf + rm * rm) / nr;
      consider(Split{static_cast<std::int32_t>(column), previous + (value - previous) / 2.0, score}, best);
    };
    bool zeros_done = !have_zeros;
    std::size_t i = 0;
    while (i < entries.size() || !zeros_done) {
      // the implicit zero group sits in value order among the explicit entries
      if (!zeros_done && (i == entries.size() || entries[i].value >= 0.0)) {
        const bool merge = i < entries.size() && entries[i].value == 0.0;
        boundary(0.0);
        left[0] += zeros[0];
        left[1] += zeros[1];
        zeros_done = true;
        have_left = true;
        previous = 0.0;
        if (!merge) continue;
      } else {
        boundary(entries[i].value);
      }
      const double value = entries[i].value;
      while (i < entries.size() && entries[i].value == value) {
        left[index_of(y_[entries[i].sample])] += weights_[entries[i].sample];
        ++i;
      }
      previous = value;
      have_left = true;
    }
  }

  static void consider(const Split& candidate, std::optional<Split>& best) {
    if (!best) {
      best = candidate;
      return;
    }
    const double tolerance = 1e-12 * std::max(1.0, std::abs(best->score));
    if (candidate.score > best->score + tolerance) {
      best = candidate;
    } else if (candidate.score >= best->score - tolerance) {
      if (candidate.feature < best->feature ||
          (candidate.feature == best->feature && candidate.threshold < best->threshold)) {
        best = candidate;
      }
    }
  }

  const FeatureMatrix& X_;
  const Csc& csc_;
  std::span<const Gender> y_;
  std::vector<std::uint32_t> weights_;
  TreeParams params_;
  std::size_t features_per_split_;
  Rng* rng_;

  TreeModel model_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::size_t> pos_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> slot_;
  std::uint32_t current_stamp_ = 0;
  std::vector<std::uint32_t> candidates_;
  std::vector<std::vector<Entry>> buckets_;
};

void check_tree_params(const TreeParams& params) {
  if (params.max_depth && *params.max_depth < 1) throw Error(ErrorCode::kInvalidArgument, "max_depth must be >= 1");
  if (params.min_samples_leaf < 1) throw Error(ErrorCode::kInvalidArgument, "min_samples_leaf must be >= 1");
}

}  // namespace

std::size_t TreeModel::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty() && node_count() > 0) {
    const auto [node, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!is_leaf(node)) {
      stack.emplace_back(static_cast<std::size_t>(left[node]), d + 1);
      stack.emplace_back(static_cast<std::size_t>(right[node]), d + 1);
    }
  }
  return deepest;
}

TreeModel train_tree(const FeatureMatrix& X, std::span<const Gender> y, const TreeParams& params) {
  detail::check_training_inputs(X, y);
  check_tree_params(params);
  const Csc csc = to_csc(X);
  return TreeBuilder(X, csc, y, std::vector<std::uint32_t>(X.rows, 1), params, 0, nullptr).build();
}

ForestModel train_forest(const FeatureMatrix& X, std::span<const Gender> y, const ForestParams& params) {
  detail::check_training_inputs(X, y);
  check_tree_params(params.tree);
  if (params.n_trees < 1) throw Error(ErrorCode::kInvalidArgument, "n_trees must be >= 1");
  std::size_t features = params.features_per_split;
  if (features == 0) {
    features = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(X.cols)))));
  }
  if (features < 1 || features > std::max<std::size_t>(X.cols, 1)) {
    throw Error(ErrorCode::kInvalidArgument, "features_per_split must lie in [1, V]");
  }
  const Csc csc = to_csc(X);
  ForestModel forest;
  forest.features_per_split = features;
  forest.bootstrap = params.bootstrap;
  forest.seed = params.seed;
  forest.trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(params.seed, t);
    std::vector<std::uint32_t> weights(X.rows, params.bootstrap ? 0 : 1);
    if (params.bootstrap) {
      for (std::size_t draw = 0; draw < X.rows; ++draw) ++weights[rng.below(X.rows)];
    }
    auto tree = TreeBuilder(X, csc, y, std::move(weights), params.tree, features, &rng).build();
    tree.rng_stream = t;
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

}  // namespace gendec
