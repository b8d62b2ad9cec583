#pragma once

// Random forest of CART-style trees: bootstrap rows, random feature subsets
// of size ceil(sqrt(d)) per node, splits by maximum weighted Gini impurity
// decrease, no depth limit. Per-tree RNG streams are derived from the master
// seed so the forest is identical however tree growth is scheduled.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "issuetypes/errors.hpp"
#include "issuetypes/info_type.hpp"
#include "issuetypes/logreg.hpp"  // Prediction
#include "issuetypes/parallel.hpp"
#include "issuetypes/rng.hpp"
#include "issuetypes/sparse.hpp"

namespace issuetypes {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::vector<double> histogram;  // leaves: weighted label counts
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct RandomForestModel {
  std::vector<InfoType> labels;
  std::vector<DecisionTree> trees;
  int n_estimators = 0;
  int min_samples_split = 2;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  std::uint32_t feature_width = 0;
};

namespace detail {

struct ForestData {
  const std::vector<SparseVector>* X;
  std::vector<int> label_index;    // per sample, into the model's label list
  std::vector<double> weight;      // per sample
  std::uint32_t width;
  std::size_t n_labels;
};

inline double gini(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += c * c;
  return 1.0 - sum_sq / (total * total);
}

class TreeBuilder {
 public:
  TreeBuilder(const ForestData& data, int min_samples_split, std::uint64_t tree_seed)
      : data_(data),
        min_samples_split_(min_samples_split),
        rng_(tree_seed),
        feature_pool_(data.width) {
    for (std::uint32_t j = 0; j < data.width; ++j) feature_pool_[j] = j;
    max_features_ = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(data.width))));
  }

  DecisionTree build(std::vector<std::uint32_t> rows) {
    tree_.nodes.clear();
    grow(std::move(rows));
    return std::move(tree_);
  }

 private:
  struct Split {
    bool found = false;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double gain = -1.0;  // best so far; valid splits may legitimately gain 0
  };

  std::vector<double> label_counts(const std::vector<std::uint32_t>& rows, double& total) const {
    std::vector<double> counts(data_.n_labels, 0.0);
    total = 0.0;
    for (std::uint32_t r : rows) {
      counts[static_cast<std::size_t>(data_.label_index[r])] += data_.weight[r];
      total += data_.weight[r];
    }
    return counts;
  }

  // Best threshold for one feature via a sorted sweep. Returns false when the
  // feature is constant on these rows. A valid split with zero gain still
  // counts: rows that differ anywhere must end up separable.
  bool consider_feature(std::uint32_t feature, const std::vector<std::uint32_t>& rows,
                        const std::vector<double>& parent_counts, double parent_total,
                        double parent_impurity, Split& best) const {
    scratch_.clear();
    scratch_.reserve(rows.size());
    for (std::uint32_t r : rows) {
      scratch_.emplace_back((*data_.X)[r].value_at(feature), r);
    }
    std::sort(scratch_.begin(), scratch_.end());
    if (scratch_.front().first == scratch_.back().first) return false;  // constant

    std::vector<double> left_counts(data_.n_labels, 0.0);
    double left_total = 0.0;
    for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
      const std::uint32_t r = scratch_[i].second;
      left_counts[static_cast<std::size_t>(data_.label_index[r])] += data_.weight[r];
      left_total += data_.weight[r];
      if (scratch_[i].first == scratch_[i + 1].first) continue;
      const double right_total = parent_total - left_total;
      double right_sq = 0.0, left_sq = 0.0;
      for (std::size_t c = 0; c < data_.n_labels; ++c) {
        left_sq += left_counts[c] * left_counts[c];
        const double rc = parent_counts[c] - left_counts[c];
        right_sq += rc * rc;
      }
      const double left_impurity = 1.0 - left_sq / (left_total * left_total);
      const double right_impurity = 1.0 - right_sq / (right_total * right_total);
      const double gain =
          parent_impurity -
          (left_total * left_impurity + right_total * right_impurity) / parent_total;
      if (gain > best.gain + 1e-15) {
        best.found = true;
        best.gain = gain;
        best.feature = feature;
        best.threshold = (scratch_[i].first + scratch_[i + 1].first) / 2.0;
      }
    }
    return true;
  }

  std::int32_t grow(std::vector<std::uint32_t> rows) {
    double total = 0.0;
    std::vector<double> counts = label_counts(rows, total);
    const double impurity = gini(counts, total);

    const auto make_leaf = [&]() {
      TreeNode leaf;
      leaf.histogram = counts;
      tree_.nodes.push_back(std::move(leaf));
      return static_cast<std::int32_t>(tree_.nodes.size() - 1);
    };

    if (rows.size() < static_cast<std::size_t>(min_samples_split_) || impurity <= 0.0) {
      return make_leaf();
    }

    // Walk a lazily shuffled feature permutation: evaluate max_features
    // non-constant candidates, extending past constant draws so a node whose
    // rows differ anywhere always finds a split.
    Split best;
    std::size_t evaluated = 0;
    for (std::size_t drawn = 0; drawn < feature_pool_.size(); ++drawn) {
      std::uniform_int_distribution<std::size_t> pick(drawn, feature_pool_.size() - 1);
      std::swap(feature_pool_[drawn], feature_pool_[pick(rng_)]);
      if (consider_feature(feature_pool_[drawn], rows, counts, total, impurity, best)) {
        ++evaluated;
      }
      if (evaluated >= max_features_) break;
    }
    if (!best.found) return make_leaf();  // all features constant on these rows

    std::vector<std::uint32_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (std::uint32_t r : rows) {
      if ((*data_.X)[r].value_at(best.feature) <= best.threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }
    rows.clear();
    rows.shrink_to_fit();

    const std::int32_t node_index = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[node_index].feature = static_cast<std::int32_t>(best.feature);
    tree_.nodes[node_index].threshold = best.threshold;
    const std::int32_t left = grow(std::move(left_rows));
    const std::int32_t right = grow(std::move(right_rows));
    tree_.nodes[node_index].left = left;
    tree_.nodes[node_index].right = right;
    return node_index;
  }

  const ForestData& data_;
  int min_samples_split_;
  std::mt19937_64 rng_;
  std::vector<std::uint32_t> feature_pool_;
  std::size_t max_features_;
  DecisionTree tree_;
  mutable std::vector<std::pair<double, std::uint32_t>> scratch_;
};

}  // namespace detail

struct ForestOptions {
  bool bootstrap = true;
  unsigned threads = 1;
};

inline RandomForestModel train_forest(const std::vector<SparseVector>& X,
                                      const std::vector<InfoType>& y, int n_estimators,
                                      int min_samples_split,
                                      const std::vector<double>& sample_weights,
                                      std::uint64_t seed, const ForestOptions& opts = {}) {
  if (X.size() != y.size() || X.size() < 2) {
    throw ValidationError("train_forest: need at least two samples with matching labels");
  }
  if (!sample_weights.empty() && sample_weights.size() != X.size()) {
    throw ValidationError("train_forest: sample_weights length mismatch");
  }
  if (n_estimators < 1) throw std::invalid_argument("train_forest: n_estimators must be >= 1");
  if (min_samples_split < 2) {
    throw std::invalid_argument("train_forest: min_samples_split must be >= 2");
  }
  for (const SparseVector& x : X) {
    for (double v : x.values) {
      if (!std::isfinite(v)) throw ValidationError("train_forest: non-finite feature value");
    }
  }

  RandomForestModel model;
  model.n_estimators = n_estimators;
  model.min_samples_split = min_samples_split;
  model.bootstrap = opts.bootstrap;
  model.seed = seed;
  model.feature_width = X.front().dim;
  {
    std::set<InfoType> distinct(y.begin(), y.end());
    model.labels.assign(distinct.begin(), distinct.end());
  }

  detail::ForestData data;
  data.X = &X;
  data.width = model.feature_width;
  data.n_labels = model.labels.size();
  data.weight.resize(X.size());
  data.label_index.resize(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    data.weight[i] = sample_weights.empty() ? 1.0 : sample_weights[i];
    data.label_index[i] = static_cast<int>(
        std::lower_bound(model.labels.begin(), model.labels.end(), y[i]) - model.labels.begin());
  }

  model.trees.resize(static_cast<std::size_t>(n_estimators));
  parallel_for(static_cast<std::size_t>(n_estimators), opts.threads, [&](std::size_t t) {
    std::mt19937_64 rng = make_rng(seed, {rng_stream::kModel, t});
    std::vector<std::uint32_t> rows;
    rows.reserve(X.size());
    if (opts.bootstrap) {
      std::uniform_int_distribution<std::uint32_t> pick(0,
                                                        static_cast<std::uint32_t>(X.size()) - 1);
      for (std::size_t i = 0; i < X.size(); ++i) rows.push_back(pick(rng));
    } else {
      for (std::uint32_t i = 0; i < X.size(); ++i) rows.push_back(i);
    }
    detail::TreeBuilder builder(data, min_samples_split, rng());
    model.trees[t] = builder.build(std::move(rows));
  });
  return model;
}

namespace detail {

inline std::size_t tree_vote(const DecisionTree& tree, const SparseVector& x) {
  std::int32_t node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    node = x.value_at(static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left : n.right;
  }
  const auto& hist = tree.nodes[static_cast<std::size_t>(node)].histogram;
  std::size_t best = 0;
  for (std::size_t c = 1; c < hist.size(); ++c) {
    if (hist[c] > hist[best]) best = c;  // ties keep the lower ordinal
  }
  return best;
}

}  // namespace detail

// Plurality vote over per-tree leaf majorities; scores are vote fractions.
inline Prediction predict_forest(const RandomForestModel& model, const SparseVector& x) {
  if (x.dim != model.feature_width) {
    throw ValidationError("predict_forest: feature width mismatch (" + std::to_string(x.dim) +
                          " vs " + std::to_string(model.feature_width) + ")");
  }
  Prediction p;
  p.scores.assign(model.labels.size(), 0.0);
  for (const DecisionTree& tree : model.trees) {
    p.scores[detail::tree_vote(tree, x)] += 1.0;
  }
  std::size_t best = 0;
  for (std::size_t c = 0; c < p.scores.size(); ++c) {
    p.scores[c] /= static_cast<double>(model.trees.size());
    if (p.scores[c] > p.scores[best]) best = c;
  }
  p.label = model.labels[best];
  return p;
}

}  // namespace issuetypes
