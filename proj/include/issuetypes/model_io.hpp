#pragma once

// Model persistence. A bundle is everything prediction needs: the classifier
// parameters, the fitted vectorizer/scaler, label ordering and the feature
// configuration, in one versioned JSON file (extension .itm.json).

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "issuetypes/config.hpp"
#include "issuetypes/errors.hpp"
#include "issuetypes/features.hpp"
#include "issuetypes/forest.hpp"
#include "issuetypes/logreg.hpp"

namespace issuetypes {

inline constexpr int kModelFormatVersion = 1;

struct ModelBundle {
  std::string config_id;  // Table-style id when trained through the pipeline
  ModelKind kind = ModelKind::LogisticRegression;
  FeatureSet feature_set = FeatureSet::Textual;
  Balancing balancing = Balancing::ClassWeight;
  Hyperparameters hyper;
  std::optional<TextualVectorizer> vectorizer;
  std::optional<StandardScaler> scaler;
  std::optional<LogisticRegressionModel> logreg;
  std::optional<RandomForestModel> forest;

  const std::vector<InfoType>& labels() const {
    return kind == ModelKind::LogisticRegression ? logreg->labels : forest->labels;
  }

  std::uint32_t feature_width() const {
    return kind == ModelKind::LogisticRegression ? logreg->feature_width
                                                 : forest->feature_width;
  }

  Prediction predict(const SparseVector& x) const {
    return kind == ModelKind::LogisticRegression ? predict_logreg(*logreg, x)
                                                 : predict_forest(*forest, x);
  }
};

namespace detail {

inline ordered_json vectorizer_to_json(const TextualVectorizer& v) {
  ordered_json j;
  j["ngram_lo"] = v.ngram_lo;
  j["ngram_hi"] = v.ngram_hi;
  j["fitted_on"] = v.fitted_on;
  // Terms in column order; the map is recoverable because columns are dense.
  std::vector<std::string> terms(v.vocabulary.size());
  for (const auto& [gram, column] : v.vocabulary) terms[column] = gram;
  j["vocabulary"] = terms;
  j["idf"] = v.idf;
  return j;
}

inline TextualVectorizer vectorizer_from_json(const ordered_json& j) {
  TextualVectorizer v;
  v.ngram_lo = j.at("ngram_lo").get<int>();
  v.ngram_hi = j.at("ngram_hi").get<int>();
  v.fitted_on = j.at("fitted_on").get<std::size_t>();
  const auto terms = j.at("vocabulary").get<std::vector<std::string>>();
  for (std::uint32_t c = 0; c < terms.size(); ++c) v.vocabulary.emplace(terms[c], c);
  v.idf = j.at("idf").get<std::vector<double>>();
  if (v.idf.size() != v.vocabulary.size()) {
    throw ValidationError("model bundle: vocabulary/idf size mismatch");
  }
  return v;
}

inline ordered_json labels_to_json(const std::vector<InfoType>& labels) {
  ordered_json out = ordered_json::array();
  for (InfoType l : labels) out.push_back(to_string(l));
  return out;
}

inline std::vector<InfoType> labels_from_json(const ordered_json& j) {
  std::vector<InfoType> out;
  for (const auto& name : j) {
    const auto label = info_type_from_string(name.get<std::string>());
    if (!label) throw ValidationError("model bundle: unknown label '" + name.get<std::string>() + "'");
    out.push_back(*label);
  }
  return out;
}

}  // namespace detail

inline ordered_json bundle_to_json(const ModelBundle& bundle) {
  ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = to_string(bundle.kind);
  j["config_id"] = bundle.config_id;
  j["feature_set"] = std::string(1, to_char(bundle.feature_set));
  j["balancing"] = to_string(bundle.balancing);
  {
    ordered_json h;
    if (bundle.kind == ModelKind::LogisticRegression) {
      h["C"] = bundle.hyper.C;
    } else {
      h["n_estimators"] = bundle.hyper.n_estimators;
      h["min_samples_split"] = bundle.hyper.min_samples_split;
    }
    if (bundle.feature_set != FeatureSet::Conversational) {
      h["ngram_lo"] = bundle.hyper.ngram_lo;
      h["ngram_hi"] = bundle.hyper.ngram_hi;
    }
    j["hyperparameters"] = std::move(h);
  }
  j["vectorizer"] = bundle.vectorizer ? detail::vectorizer_to_json(*bundle.vectorizer)
                                      : ordered_json(nullptr);
  if (bundle.scaler) {
    ordered_json s;
    s["mean"] = bundle.scaler->mean;
    s["stddev"] = bundle.scaler->stddev;
    j["scaler"] = std::move(s);
  } else {
    j["scaler"] = nullptr;
  }

  ordered_json m;
  if (bundle.kind == ModelKind::LogisticRegression) {
    const auto& lr = *bundle.logreg;
    m["labels"] = detail::labels_to_json(lr.labels);
    m["C"] = lr.C;
    m["feature_width"] = lr.feature_width;
    ordered_json classifiers = ordered_json::array();
    for (const auto& bin : lr.per_label) {
      ordered_json c;
      c["weights"] = bin.weights;
      c["bias"] = bin.bias;
      c["iterations"] = bin.iterations;
      c["converged"] = bin.converged;
      classifiers.push_back(std::move(c));
    }
    m["classifiers"] = std::move(classifiers);
  } else {
    const auto& rf = *bundle.forest;
    m["labels"] = detail::labels_to_json(rf.labels);
    m["n_estimators"] = rf.n_estimators;
    m["min_samples_split"] = rf.min_samples_split;
    m["bootstrap"] = rf.bootstrap;
    m["seed"] = rf.seed;
    m["feature_width"] = rf.feature_width;
    ordered_json trees = ordered_json::array();
    for (const auto& tree : rf.trees) {
      ordered_json t;
      ordered_json feature = ordered_json::array();
      ordered_json threshold = ordered_json::array();
      ordered_json left = ordered_json::array();
      ordered_json right = ordered_json::array();
      ordered_json histogram = ordered_json::array();
      for (const auto& node : tree.nodes) {
        feature.push_back(node.feature);
        threshold.push_back(node.threshold);
        left.push_back(node.left);
        right.push_back(node.right);
        histogram.push_back(node.histogram);
      }
      t["feature"] = std::move(feature);
      t["threshold"] = std::move(threshold);
      t["left"] = std::move(left);
      t["right"] = std::move(right);
      t["histogram"] = std::move(histogram);
      trees.push_back(std::move(t));
    }
    m["trees"] = std::move(trees);
  }
  j["model"] = std::move(m);
  return j;
}

inline ModelBundle bundle_from_json(const ordered_json& j) {
  const int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw FormatVersionError("unsupported model format_version " + std::to_string(version) +
                             " (this build reads version " +
                             std::to_string(kModelFormatVersion) + ")");
  }
  ModelBundle bundle;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "LogisticRegression") {
    bundle.kind = ModelKind::LogisticRegression;
  } else if (kind == "RandomForest") {
    bundle.kind = ModelKind::RandomForest;
  } else {
    throw ValidationError("model bundle: unknown kind '" + kind + "'");
  }
  bundle.config_id = j.value("config_id", std::string());
  const std::string fs = j.at("feature_set").get<std::string>();
  if (fs == "T") bundle.feature_set = FeatureSet::Textual;
  else if (fs == "C") bundle.feature_set = FeatureSet::Conversational;
  else if (fs == "B") bundle.feature_set = FeatureSet::Both;
  else throw ValidationError("model bundle: unknown feature_set '" + fs + "'");
  bundle.balancing = j.at("balancing").get<std::string>() == "smote" ? Balancing::Smote
                                                                     : Balancing::ClassWeight;
  {
    const auto& h = j.at("hyperparameters");
    if (h.contains("C")) bundle.hyper.C = h["C"].get<double>();
    if (h.contains("n_estimators")) bundle.hyper.n_estimators = h["n_estimators"].get<int>();
    if (h.contains("min_samples_split")) {
      bundle.hyper.min_samples_split = h["min_samples_split"].get<int>();
    }
    if (h.contains("ngram_lo")) bundle.hyper.ngram_lo = h["ngram_lo"].get<int>();
    if (h.contains("ngram_hi")) bundle.hyper.ngram_hi = h["ngram_hi"].get<int>();
  }
  if (!j.at("vectorizer").is_null()) {
    bundle.vectorizer = detail::vectorizer_from_json(j["vectorizer"]);
  }
  if (!j.at("scaler").is_null()) {
    StandardScaler s;
    s.mean = j["scaler"].at("mean").get<std::vector<double>>();
    s.stddev = j["scaler"].at("stddev").get<std::vector<double>>();
    bundle.scaler = std::move(s);
  }

  const auto& m = j.at("model");
  if (bundle.kind == ModelKind::LogisticRegression) {
    LogisticRegressionModel lr;
    lr.labels = detail::labels_from_json(m.at("labels"));
    lr.C = m.at("C").get<double>();
    lr.feature_width = m.at("feature_width").get<std::uint32_t>();
    for (const auto& c : m.at("classifiers")) {
      BinaryLogisticModel bin;
      bin.weights = c.at("weights").get<std::vector<double>>();
      bin.bias = c.at("bias").get<double>();
      bin.iterations = c.at("iterations").get<int>();
      bin.converged = c.at("converged").get<bool>();
      lr.per_label.push_back(std::move(bin));
    }
    if (lr.per_label.size() != lr.labels.size()) {
      throw ValidationError("model bundle: classifier/label count mismatch");
    }
    bundle.logreg = std::move(lr);
  } else {
    RandomForestModel rf;
    rf.labels = detail::labels_from_json(m.at("labels"));
    rf.n_estimators = m.at("n_estimators").get<int>();
    rf.min_samples_split = m.at("min_samples_split").get<int>();
    rf.bootstrap = m.at("bootstrap").get<bool>();
    rf.seed = m.at("seed").get<std::uint64_t>();
    rf.feature_width = m.at("feature_width").get<std::uint32_t>();
    for (const auto& t : m.at("trees")) {
      DecisionTree tree;
      const auto feature = t.at("feature").get<std::vector<std::int32_t>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<std::int32_t>>();
      const auto right = t.at("right").get<std::vector<std::int32_t>>();
      const auto& histogram = t.at("histogram");
      for (std::size_t i = 0; i < feature.size(); ++i) {
        TreeNode node;
        node.feature = feature[i];
        node.threshold = threshold[i];
        node.left = left[i];
        node.right = right[i];
        node.histogram = histogram[i].get<std::vector<double>>();
        tree.nodes.push_back(std::move(node));
      }
      rf.trees.push_back(std::move(tree));
    }
    bundle.forest = std::move(rf);
  }
  return bundle;
}

inline void save_model(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << bundle_to_json(bundle).dump() << "\n";
}

inline ModelBundle load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("model file not found: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());  // message carries the byte offset
  }
  try {
    return bundle_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace issuetypes
