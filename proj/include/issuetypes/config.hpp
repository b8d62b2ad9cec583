#pragma once

// The 12 experiment configurations (model x feature set x balancing) and the
// hyperparameter grid searched for each of them.

#include <string>
#include <vector>

#include "issuetypes/errors.hpp"
#include "issuetypes/features.hpp"

namespace issuetypes {

enum class ModelKind { LogisticRegression, RandomForest };

inline std::string to_string(ModelKind m) {
  return m == ModelKind::LogisticRegression ? "LogisticRegression" : "RandomForest";
}

enum class Balancing { ClassWeight, Smote };

inline std::string to_string(Balancing b) {
  return b == Balancing::ClassWeight ? "class-weight" : "smote";
}

struct ExperimentConfig {
  std::string id;  // e.g. "RCC"
  ModelKind model = ModelKind::LogisticRegression;
  FeatureSet feature_set = FeatureSet::Textual;
  Balancing balancing = Balancing::ClassWeight;

  bool uses_textual() const { return feature_set != FeatureSet::Conversational; }
  bool uses_conversational() const { return feature_set != FeatureSet::Textual; }
};

// Ids decode positionally: {L,R}{T,C,B}{C,S}.
inline ExperimentConfig parse_config_id(const std::string& id) {
  if (id.size() != 3) throw ValidationError("unknown configuration id: '" + id + "'");
  ExperimentConfig cfg;
  cfg.id = id;
  switch (id[0]) {
    case 'L': cfg.model = ModelKind::LogisticRegression; break;
    case 'R': cfg.model = ModelKind::RandomForest; break;
    default: throw ValidationError("unknown configuration id: '" + id + "'");
  }
  switch (id[1]) {
    case 'T': cfg.feature_set = FeatureSet::Textual; break;
    case 'C': cfg.feature_set = FeatureSet::Conversational; break;
    case 'B': cfg.feature_set = FeatureSet::Both; break;
    default: throw ValidationError("unknown configuration id: '" + id + "'");
  }
  switch (id[2]) {
    case 'C': cfg.balancing = Balancing::ClassWeight; break;
    case 'S': cfg.balancing = Balancing::Smote; break;
    default: throw ValidationError("unknown configuration id: '" + id + "'");
  }
  return cfg;
}

inline std::vector<ExperimentConfig> all_experiment_configs() {
  std::vector<ExperimentConfig> configs;
  for (const char* id : {"LTC", "LTS", "LCC", "LCS", "LBC", "LBS", "RTC", "RTS", "RCC", "RCS",
                         "RBC", "RBS"}) {
    configs.push_back(parse_config_id(id));
  }
  return configs;
}

struct Hyperparameters {
  double C = 1.0;             // logistic regression
  int n_estimators = 100;     // random forest
  int min_samples_split = 2;  // random forest
  int ngram_lo = 1;           // textual feature sets only
  int ngram_hi = 1;
};

// Grid points in tie-break preference order (smaller C, fewer trees, smaller
// min_samples_split, narrower ngram range first); grid search keeps the
// earliest point among equal scores.
inline std::vector<Hyperparameters> hyperparameter_grid(const ExperimentConfig& cfg) {
  const std::vector<int> ngram_his = cfg.uses_textual() ? std::vector<int>{1, 2}
                                                        : std::vector<int>{1};
  std::vector<Hyperparameters> grid;
  if (cfg.model == ModelKind::LogisticRegression) {
    for (double c : {0.01, 0.1, 1.0, 10.0}) {
      for (int hi : ngram_his) {
        Hyperparameters h;
        h.C = c;
        h.ngram_hi = hi;
        grid.push_back(h);
      }
    }
  } else {
    for (int trees : {10, 50, 100}) {
      for (int split : {2, 5, 10}) {
        for (int hi : ngram_his) {
          Hyperparameters h;
          h.n_estimators = trees;
          h.min_samples_split = split;
          h.ngram_hi = hi;
          grid.push_back(h);
        }
      }
    }
  }
  return grid;
}

}  // namespace issuetypes
