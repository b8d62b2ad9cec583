#pragma once

// Per-label precision/recall/F1 with support-weighted averages. Support is
// the label's frequency in the gold sequence; labels absent from gold get
// zero weight in the averages.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "issuetypes/errors.hpp"
#include "issuetypes/info_type.hpp"

namespace issuetypes {

struct LabelMetrics {
  InfoType label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  std::vector<LabelMetrics> per_label;  // ordinal order, labels seen in gold or predicted
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::size_t total_support = 0;
};

// Confusion counts per label, reusable for pooling across folds.
struct ConfusionCounts {
  std::map<InfoType, std::size_t> tp, fp, fn;

  void add(InfoType gold, InfoType predicted) {
    if (gold == predicted) {
      ++tp[gold];
    } else {
      ++fn[gold];
      ++fp[predicted];
    }
  }

  void merge(const ConfusionCounts& other) {
    for (const auto& [l, c] : other.tp) tp[l] += c;
    for (const auto& [l, c] : other.fp) fp[l] += c;
    for (const auto& [l, c] : other.fn) fn[l] += c;
  }

  MetricsReport report() const {
    MetricsReport r;
    std::set<InfoType> labels;
    for (const auto& entry : tp) labels.insert(entry.first);
    for (const auto& entry : fp) labels.insert(entry.first);
    for (const auto& entry : fn) labels.insert(entry.first);
    double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
    for (InfoType label : labels) {
      LabelMetrics m;
      m.label = label;
      const double tp_c = static_cast<double>(tp.count(label) ? tp.at(label) : 0);
      const double fp_c = static_cast<double>(fp.count(label) ? fp.at(label) : 0);
      const double fn_c = static_cast<double>(fn.count(label) ? fn.at(label) : 0);
      m.support = static_cast<std::size_t>(tp_c + fn_c);
      m.precision = tp_c + fp_c > 0.0 ? tp_c / (tp_c + fp_c) : 0.0;
      m.recall = tp_c + fn_c > 0.0 ? tp_c / (tp_c + fn_c) : 0.0;
      m.f1 = m.precision + m.recall > 0.0
                 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                 : 0.0;
      sum_p += static_cast<double>(m.support) * m.precision;
      sum_r += static_cast<double>(m.support) * m.recall;
      sum_f += static_cast<double>(m.support) * m.f1;
      r.total_support += m.support;
      r.per_label.push_back(m);
    }
    if (r.total_support > 0) {
      const double n = static_cast<double>(r.total_support);
      r.weighted_precision = sum_p / n;
      r.weighted_recall = sum_r / n;
      r.weighted_f1 = sum_f / n;
    }
    return r;
  }
};

inline MetricsReport score_predictions(const std::vector<InfoType>& gold,
                                       const std::vector<InfoType>& predicted) {
  if (gold.empty() || gold.size() != predicted.size()) {
    throw ValidationError("score_predictions: gold and predicted must have equal non-zero length");
  }
  ConfusionCounts counts;
  for (std::size_t i = 0; i < gold.size(); ++i) counts.add(gold[i], predicted[i]);
  return counts.report();
}

}  // namespace issuetypes
