#pragma once

// Experiment machinery: the two cross-validation scenarios (stratified 5-fold
// and leave-one-issue-out), nested hyperparameter grid search, and report
// aggregation. All vectorizers, scalers and balancing run strictly inside the
// training side of each split.

#include <cstdint>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "issuetypes/balance.hpp"
#include "issuetypes/config.hpp"
#include "issuetypes/corpus.hpp"
#include "issuetypes/features.hpp"
#include "issuetypes/forest.hpp"
#include "issuetypes/logreg.hpp"
#include "issuetypes/metrics.hpp"
#include "issuetypes/model_io.hpp"
#include "issuetypes/parallel.hpp"
#include "issuetypes/rng.hpp"

namespace issuetypes {

// ---------------------------------------------------------------------------
// Fold construction
// ---------------------------------------------------------------------------

// Stratified k-fold: per-label counts across folds differ by at most one, and
// the rotating start fold keeps total fold sizes balanced too. Shuffling is
// seeded per label.
inline std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<InfoType>& labels,
                                                              int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("stratified_kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > labels.size()) {
    throw ValidationError("stratified_kfold: k exceeds the sample count");
  }
  std::map<InfoType, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);

  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t start = 0;
  for (auto& [label, members] : by_label) {
    std::mt19937_64 rng = make_rng(seed, {rng_stream::kOuterSplit,
                                          static_cast<std::uint64_t>(ordinal(label))});
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < members.size(); ++i) {
      folds[(start + i) % static_cast<std::size_t>(k)].push_back(members[i]);
    }
    start = (start + members.size()) % static_cast<std::size_t>(k);
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

// One fold per issue thread: the fold holds the item indices of that thread.
inline std::vector<std::vector<std::size_t>> leave_one_issue_out(const Dataset& dataset) {
  std::map<std::size_t, std::vector<std::size_t>> by_thread;
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    by_thread[dataset.items[i].thread_index].push_back(i);
  }
  if (by_thread.size() < 2) {
    throw ValidationError("leave_one_issue_out: need at least two issue threads");
  }
  std::vector<std::vector<std::size_t>> folds;
  folds.reserve(by_thread.size());
  for (auto& [thread, members] : by_thread) folds.push_back(std::move(members));
  return folds;
}

// ---------------------------------------------------------------------------
// Feature pipeline over dataset items
// ---------------------------------------------------------------------------

namespace detail {

// Cached per-thread conversational extractors for one dataset.
class ConversationalCache {
 public:
  explicit ConversationalCache(const Dataset& dataset) : dataset_(&dataset) {
    extractors_.resize(dataset.threads->size());
  }

  std::array<double, kConversationalWidth> raw(const DatasetItem& item) {
    auto& slot = extractors_[item.thread_index];
    if (!slot) slot.emplace((*dataset_->threads)[item.thread_index]);
    return slot->extract(item.comment_index, dataset_->sentence(item)).encode();
  }

 private:
  const Dataset* dataset_;
  std::vector<std::optional<ConversationalExtractor>> extractors_;
};

struct FittedFeatures {
  FeatureSet config;
  std::optional<TextualVectorizer> vectorizer;
  std::optional<StandardScaler> scaler;

  std::uint32_t textual_width() const { return vectorizer ? vectorizer->width() : 0; }
};

inline FittedFeatures fit_features(const Dataset& dataset, const std::vector<std::size_t>& train,
                                   const ExperimentConfig& cfg, const Hyperparameters& hyper,
                                   ConversationalCache& conv) {
  FittedFeatures fitted;
  fitted.config = cfg.feature_set;
  if (cfg.uses_textual()) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(train.size());
    for (std::size_t i : train) docs.push_back(dataset.sentence(dataset.items[i]).tokens);
    fitted.vectorizer = fit_vectorizer(docs, hyper.ngram_lo, hyper.ngram_hi);
  }
  if (cfg.uses_conversational()) {
    std::vector<std::array<double, kConversationalWidth>> rows;
    rows.reserve(train.size());
    for (std::size_t i : train) rows.push_back(conv.raw(dataset.items[i]));
    StandardScaler scaler;
    scaler.fit(rows);
    fitted.scaler = std::move(scaler);
  }
  return fitted;
}

inline SparseVector make_vector(const Dataset& dataset, std::size_t index,
                                const FittedFeatures& fitted, ConversationalCache& conv) {
  const DatasetItem& item = dataset.items[index];
  SparseVector textual;
  std::array<double, kConversationalWidth> raw{};
  if (fitted.vectorizer) {
    textual = transform_textual(*fitted.vectorizer, dataset.sentence(item).tokens);
  }
  if (fitted.scaler) raw = conv.raw(item);
  static const StandardScaler kNoScaler;
  return assemble_features(fitted.config, textual, raw,
                           fitted.scaler ? *fitted.scaler : kNoScaler)
      .combined();
}

struct TrainedOnSplit {
  FittedFeatures features;
  std::optional<LogisticRegressionModel> logreg;
  std::optional<RandomForestModel> forest;

  Prediction predict(const SparseVector& x) const {
    return logreg ? predict_logreg(*logreg, x) : predict_forest(*forest, x);
  }
};

// Fits features on the training indices, applies balancing, trains the
// configured model. `threads` parallelizes OvR labels / trees.
inline TrainedOnSplit train_on_split(const Dataset& dataset, const std::vector<std::size_t>& train,
                                     const ExperimentConfig& cfg, const Hyperparameters& hyper,
                                     std::uint64_t split_seed, int smote_k, double undersample,
                                     unsigned threads, ConversationalCache& conv) {
  TrainedOnSplit result;
  result.features = fit_features(dataset, train, cfg, hyper, conv);

  std::vector<SparseVector> X;
  std::vector<InfoType> y;
  X.reserve(train.size());
  y.reserve(train.size());
  for (std::size_t i : train) {
    X.push_back(make_vector(dataset, i, result.features, conv));
    y.push_back(dataset.items[i].label);
  }

  std::vector<double> sample_weights;
  if (cfg.balancing == Balancing::ClassWeight) {
    sample_weights = compute_class_weights(y).per_sample(y);
  } else {
    if (undersample < 1.0) {
      undersample_majority(X, y, undersample,
                           mix_seed(split_seed, {rng_stream::kUndersample}));
    }
    const auto snaps = binary_snap_columns(cfg.feature_set, result.features.textual_width(),
                                           result.features.scaler ? *result.features.scaler
                                                                  : StandardScaler{});
    SmoteResult balanced = smote_resample(X, y, smote_k,
                                          mix_seed(split_seed, {rng_stream::kSmote}), snaps);
    X = std::move(balanced.X);
    y = std::move(balanced.y);
  }

  const std::uint64_t model_seed = mix_seed(split_seed, {rng_stream::kModel});
  if (cfg.model == ModelKind::LogisticRegression) {
    LogRegOptions opts;
    opts.threads = threads;
    result.logreg = train_logreg(X, y, hyper.C, sample_weights, model_seed, opts);
  } else {
    ForestOptions opts;
    opts.threads = threads;
    result.forest = train_forest(X, y, hyper.n_estimators, hyper.min_samples_split,
                                 sample_weights, model_seed, opts);
  }
  return result;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Nested grid search
// ---------------------------------------------------------------------------

struct GridSearchOptions {
  int inner_k = 5;
  int smote_k = 5;
  double undersample = 1.0;
  unsigned threads = 1;
  std::ostream* warnings = nullptr;  // defaults to std::cerr
};

// Inner stratified k-fold over the outer-training items; selects the grid
// point with the highest mean weighted F1. Grid order breaks ties toward the
// simpler point.
inline Hyperparameters grid_search(const Dataset& dataset, const std::vector<std::size_t>& train,
                                   const ExperimentConfig& cfg, std::uint64_t seed,
                                   const GridSearchOptions& opts = {}) {
  std::ostream& warn = opts.warnings ? *opts.warnings : std::cerr;
  const std::vector<Hyperparameters> grid = hyperparameter_grid(cfg);

  std::vector<InfoType> train_labels;
  train_labels.reserve(train.size());
  for (std::size_t i : train) train_labels.push_back(dataset.items[i].label);
  const auto inner_folds =
      stratified_kfold(train_labels, opts.inner_k, mix_seed(seed, {rng_stream::kInnerSplit}));

  // Warn once per missing-label inner fold; its labels still score zero.
  {
    std::set<InfoType> all_labels(train_labels.begin(), train_labels.end());
    for (std::size_t f = 0; f < inner_folds.size(); ++f) {
      std::set<InfoType> fold_labels;
      for (std::size_t local : inner_folds[f]) fold_labels.insert(train_labels[local]);
      if (fold_labels.size() < all_labels.size()) {
        warn << "warning: inner fold " << f
             << " is missing some labels; they contribute 0 to their own metrics\n";
      }
    }
  }

  struct Task {
    std::size_t grid_index;
    std::size_t fold_index;
  };
  std::vector<Task> tasks;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t f = 0; f < inner_folds.size(); ++f) tasks.push_back({g, f});
  }
  std::vector<double> task_f1(tasks.size(), 0.0);

  parallel_for(tasks.size(), opts.threads, [&](std::size_t t) {
    const auto& [g, f] = tasks[t];
    std::vector<std::size_t> inner_train, inner_val;
    for (std::size_t fold = 0; fold < inner_folds.size(); ++fold) {
      for (std::size_t local : inner_folds[fold]) {
        (fold == f ? inner_val : inner_train).push_back(train[local]);
      }
    }
    detail::ConversationalCache cache(dataset);
    const std::uint64_t split_seed = mix_seed(seed, {rng_stream::kInnerSplit, g, f});
    auto trained = detail::train_on_split(dataset, inner_train, cfg, grid[g], split_seed,
                                          opts.smote_k, opts.undersample, 1, cache);
    std::vector<InfoType> gold, predicted;
    gold.reserve(inner_val.size());
    predicted.reserve(inner_val.size());
    for (std::size_t i : inner_val) {
      gold.push_back(dataset.items[i].label);
      predicted.push_back(
          trained.predict(detail::make_vector(dataset, i, trained.features, cache)).label);
    }
    task_f1[t] = score_predictions(gold, predicted).weighted_f1;
  });

  std::vector<double> mean_f1(grid.size(), 0.0);
  for (std::size_t t = 0; t < tasks.size(); ++t) mean_f1[tasks[t].grid_index] += task_f1[t];
  for (double& f : mean_f1) f /= static_cast<double>(inner_folds.size());

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (mean_f1[g] > mean_f1[best] + 1e-12) best = g;  // ties keep the earlier, simpler point
  }
  return grid[best];
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct FoldResult {
  int fold_index = 0;
  std::size_t test_size = 0;
  Hyperparameters hyper;
  MetricsReport metrics;
  ConfusionCounts confusion;
  // Vocabulary actually fitted for this fold (leakage checks); empty for
  // conversational-only configs.
  std::vector<std::string> vocabulary;
};

struct ExperimentResult {
  ExperimentConfig config;
  int scenario = 1;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  MetricsReport pooled;            // confusion pooled over all folds
  double weighted_f1 = 0.0;        // fold-size-weighted mean of fold weighted F1
  double weighted_f1_uniform = 0.0;  // unweighted mean across folds
};

struct ExperimentOptions {
  int outer_k = 5;  // scenario 1
  GridSearchOptions grid;
  unsigned threads = 1;
};

// One full nested-CV run of a single configuration. Per fold: grid search on
// the training side, refit on all training items with the chosen point,
// evaluate on the held-out fold. Identical seeds give identical results at
// any thread count.
inline ExperimentResult run_experiment(const Dataset& dataset, int scenario,
                                       const ExperimentConfig& cfg, std::uint64_t seed,
                                       ExperimentOptions opts = {}) {
  if (scenario != 1 && scenario != 2) {
    throw ValidationError("scenario must be 1 (stratified 5-fold) or 2 (leave-one-issue-out)");
  }
  ExperimentResult result;
  result.config = cfg;
  result.scenario = scenario;
  result.seed = seed;

  std::vector<InfoType> labels;
  labels.reserve(dataset.items.size());
  for (const auto& item : dataset.items) labels.push_back(item.label);

  const auto folds = scenario == 1
                         ? stratified_kfold(labels, opts.outer_k,
                                            mix_seed(seed, {rng_stream::kOuterSplit}))
                         : leave_one_issue_out(dataset);

  opts.grid.threads = opts.threads;
  result.folds.resize(folds.size());

  ConfusionCounts pooled;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train;
    train.reserve(dataset.items.size() - folds[f].size());
    for (std::size_t other = 0; other < folds.size(); ++other) {
      if (other == f) continue;
      train.insert(train.end(), folds[other].begin(), folds[other].end());
    }
    std::sort(train.begin(), train.end());

    const std::uint64_t fold_seed = mix_seed(seed, {static_cast<std::uint64_t>(scenario), f});
    const Hyperparameters chosen = grid_search(dataset, train, cfg, fold_seed, opts.grid);

    detail::ConversationalCache cache(dataset);
    auto trained = detail::train_on_split(dataset, train, cfg, chosen, fold_seed,
                                          opts.grid.smote_k, opts.grid.undersample,
                                          opts.threads, cache);

    FoldResult& fold_result = result.folds[f];
    fold_result.fold_index = static_cast<int>(f);
    fold_result.test_size = folds[f].size();
    fold_result.hyper = chosen;
    if (trained.features.vectorizer) {
      for (const auto& [gram, column] : trained.features.vectorizer->vocabulary) {
        fold_result.vocabulary.push_back(gram);
      }
    }
    std::vector<InfoType> gold, predicted;
    gold.reserve(folds[f].size());
    predicted.reserve(folds[f].size());
    for (std::size_t i : folds[f]) {
      gold.push_back(dataset.items[i].label);
      predicted.push_back(
          trained.predict(detail::make_vector(dataset, i, trained.features, cache)).label);
      fold_result.confusion.add(gold.back(), predicted.back());
    }
    fold_result.metrics = score_predictions(gold, predicted);
    pooled.merge(fold_result.confusion);
  }

  result.pooled = pooled.report();
  double weighted_sum = 0.0, uniform_sum = 0.0;
  std::size_t total = 0;
  for (const FoldResult& fr : result.folds) {
    weighted_sum += static_cast<double>(fr.test_size) * fr.metrics.weighted_f1;
    uniform_sum += fr.metrics.weighted_f1;
    total += fr.test_size;
  }
  result.weighted_f1 = total > 0 ? weighted_sum / static_cast<double>(total) : 0.0;
  result.weighted_f1_uniform =
      result.folds.empty() ? 0.0 : uniform_sum / static_cast<double>(result.folds.size());
  return result;
}

// All 12 configurations. A configuration that fails aborts only itself; its
// error message lands in the second member of the result.
inline std::vector<std::pair<ExperimentResult, std::string>> run_all_experiments(
    const Dataset& dataset, int scenario, std::uint64_t seed, const ExperimentOptions& opts = {}) {
  std::vector<std::pair<ExperimentResult, std::string>> results;
  for (const ExperimentConfig& cfg : all_experiment_configs()) {
    try {
      results.emplace_back(run_experiment(dataset, scenario, cfg, seed, opts), "");
    } catch (const std::exception& e) {
      ExperimentResult failed;
      failed.config = cfg;
      failed.scenario = scenario;
      failed.seed = seed;
      results.emplace_back(std::move(failed), e.what());
    }
  }
  return results;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

inline ordered_json metrics_to_json(const MetricsReport& m) {
  ordered_json per_label = ordered_json::array();
  for (const LabelMetrics& lm : m.per_label) {
    ordered_json row;
    row["label"] = to_string(lm.label);
    row["precision"] = lm.precision;
    row["recall"] = lm.recall;
    row["f1"] = lm.f1;
    row["support"] = lm.support;
    per_label.push_back(std::move(row));
  }
  ordered_json j;
  j["per_label"] = std::move(per_label);
  j["weighted_precision"] = m.weighted_precision;
  j["weighted_recall"] = m.weighted_recall;
  j["weighted_f1"] = m.weighted_f1;
  j["support"] = m.total_support;
  return j;
}

inline ordered_json hyperparameters_to_json(const ExperimentConfig& cfg,
                                            const Hyperparameters& h) {
  ordered_json j;
  if (cfg.model == ModelKind::LogisticRegression) {
    j["C"] = h.C;
  } else {
    j["n_estimators"] = h.n_estimators;
    j["min_samples_split"] = h.min_samples_split;
  }
  if (cfg.uses_textual()) {
    j["ngram_lo"] = h.ngram_lo;
    j["ngram_hi"] = h.ngram_hi;
  }
  return j;
}

inline ordered_json experiment_to_json(const ExperimentResult& r) {
  ordered_json j;
  j["config"] = r.config.id;
  j["model"] = to_string(r.config.model);
  j["feature_set"] = to_string(r.config.feature_set);
  j["balancing"] = to_string(r.config.balancing);
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  ordered_json folds = ordered_json::array();
  for (const FoldResult& fr : r.folds) {
    ordered_json jf;
    jf["fold"] = fr.fold_index;
    jf["test_size"] = fr.test_size;
    jf["hyperparameters"] = hyperparameters_to_json(r.config, fr.hyper);
    jf["metrics"] = metrics_to_json(fr.metrics);
    folds.push_back(std::move(jf));
  }
  j["folds"] = std::move(folds);
  ordered_json agg;
  agg["weighted_f1"] = r.weighted_f1;
  agg["weighted_f1_uniform_folds"] = r.weighted_f1_uniform;
  agg["pooled"] = metrics_to_json(r.pooled);
  j["aggregate"] = std::move(agg);
  return j;
}

// Aligned text table in the shape of the per-label result tables: Label,
// Precision, Recall, F1-Score, Support, with a Weighted average/Total row.
inline std::string experiment_to_table(const ExperimentResult& r) {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof(buf), "Configuration %s (%s, %s features, %s), scenario %d\n",
                r.config.id.c_str(), to_string(r.config.model).c_str(),
                to_string(r.config.feature_set).c_str(), to_string(r.config.balancing).c_str(),
                r.scenario);
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-34s %9s %9s %9s %9s\n", "Label", "Precision", "Recall",
                "F1-Score", "Support");
  out += buf;
  for (const LabelMetrics& m : r.pooled.per_label) {
    std::snprintf(buf, sizeof(buf), "%-34s %9.2f %9.2f %9.2f %9zu\n",
                  display_name(m.label).c_str(), m.precision, m.recall, m.f1, m.support);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "%-34s %9.2f %9.2f %9.2f %9zu\n", "Weighted average/Total",
                r.pooled.weighted_precision, r.pooled.weighted_recall, r.pooled.weighted_f1,
                r.pooled.total_support);
  out += buf;
  std::snprintf(buf, sizeof(buf), "Fold-weighted mean F1 over %zu folds: %.4f\n", r.folds.size(),
                r.weighted_f1);
  out += buf;
  return out;
}

}  // namespace issuetypes
