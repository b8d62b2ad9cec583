#pragma once

// Imbalance handling: balanced class weights and SMOTE over-sampling.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "issuetypes/errors.hpp"
#include "issuetypes/features.hpp"
#include "issuetypes/info_type.hpp"
#include "issuetypes/sparse.hpp"

namespace issuetypes {

struct ClassWeights {
  std::map<InfoType, double> weight;

  double at(InfoType label) const {
    auto it = weight.find(label);
    return it == weight.end() ? 1.0 : it->second;
  }

  std::vector<double> per_sample(const std::vector<InfoType>& labels) const {
    std::vector<double> out;
    out.reserve(labels.size());
    for (InfoType l : labels) out.push_back(at(l));
    return out;
  }
};

// Balanced weighting: weight(c) = N / (K * n_c). Minority classes get
// proportionally larger loss contributions.
inline ClassWeights compute_class_weights(const std::vector<InfoType>& labels) {
  if (labels.empty()) throw ValidationError("compute_class_weights: empty label list");
  std::map<InfoType, std::size_t> counts;
  for (InfoType l : labels) ++counts[l];
  ClassWeights cw;
  const double n = static_cast<double>(labels.size());
  const double k = static_cast<double>(counts.size());
  for (const auto& [label, count] : counts) {
    cw.weight[label] = n / (k * static_cast<double>(count));
  }
  return cw;
}

struct SyntheticSample {
  std::size_t parent_a;  // indices into the original X
  std::size_t parent_b;
  double lambda;
};

struct SmoteResult {
  std::vector<SparseVector> X;
  std::vector<InfoType> y;
  std::vector<SyntheticSample> synthetic;  // provenance, one per appended row
};

// SMOTE: every non-majority label is over-sampled to the majority count by
// interpolating between a random member and one of its k nearest same-label
// neighbors (Euclidean over the assembled vector). Binary columns described
// by `snaps` are re-snapped to their {0,1} images after interpolation.
// Original samples are kept unchanged; output is deterministic given seed.
inline SmoteResult smote_resample(const std::vector<SparseVector>& X,
                                  const std::vector<InfoType>& y, int k = 5,
                                  std::uint64_t seed = 0,
                                  const std::vector<BinarySnap>& snaps = {}) {
  if (X.size() != y.size() || X.empty()) {
    throw ValidationError("smote_resample: X and y must be equal-length and non-empty");
  }
  SmoteResult result;
  result.X = X;
  result.y = y;

  std::map<InfoType, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < y.size(); ++i) by_label[y[i]].push_back(i);
  std::size_t majority = 0;
  for (const auto& [label, members] : by_label) majority = std::max(majority, members.size());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (const auto& [label, members] : by_label) {
    const std::size_t need = majority - members.size();
    if (need == 0) continue;
    if (members.size() < 2) {
      throw ValidationError("smote_resample: label " + to_string(label) +
                            " has a single sample; duplicate it or exclude the label");
    }
    const int k_eff = std::min<int>(k, static_cast<int>(members.size()) - 1);

    // k nearest same-label neighbors per member, ties broken by index order.
    std::vector<std::vector<std::size_t>> neighbors(members.size());
    std::vector<std::pair<double, std::size_t>> dists;
    for (std::size_t a = 0; a < members.size(); ++a) {
      dists.clear();
      for (std::size_t b = 0; b < members.size(); ++b) {
        if (b == a) continue;
        dists.emplace_back(squared_distance(X[members[a]], X[members[b]]), b);
      }
      std::stable_sort(dists.begin(), dists.end(),
                       [](const auto& l, const auto& r) { return l.first < r.first; });
      neighbors[a].reserve(static_cast<std::size_t>(k_eff));
      for (int t = 0; t < k_eff; ++t) neighbors[a].push_back(dists[static_cast<std::size_t>(t)].second);
    }

    std::uniform_int_distribution<std::size_t> pick_member(0, members.size() - 1);
    std::uniform_int_distribution<int> pick_neighbor(0, k_eff - 1);
    for (std::size_t s = 0; s < need; ++s) {
      const std::size_t a = pick_member(rng);
      const std::size_t b = neighbors[a][static_cast<std::size_t>(pick_neighbor(rng))];
      const double lambda = unit(rng);
      SparseVector synth = interpolate(X[members[a]], X[members[b]], lambda);
      for (const BinarySnap& snap : snaps) {
        const double v = synth.value_at(snap.column);
        const double snapped = v >= snap.mid ? snap.hi : snap.lo;
        if (v != snapped) set_coordinate(synth, snap.column, snapped);
      }
      result.X.push_back(std::move(synth));
      result.y.push_back(label);
      result.synthetic.push_back({members[a], members[b], lambda});
    }
  }
  return result;
}

// Optional majority under-sampling: keeps a random subset of the majority
// label capped at ratio * (its original count). ratio 1 is a no-op.
inline void undersample_majority(std::vector<SparseVector>& X, std::vector<InfoType>& y,
                                 double ratio, std::uint64_t seed) {
  if (ratio >= 1.0) return;
  if (ratio <= 0.0) throw ValidationError("undersample ratio must be in (0, 1]");
  std::map<InfoType, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < y.size(); ++i) by_label[y[i]].push_back(i);
  InfoType majority_label = y.front();
  std::size_t majority_count = 0;
  for (const auto& [label, members] : by_label) {
    if (members.size() > majority_count) {
      majority_count = members.size();
      majority_label = label;
    }
  }
  const auto cap = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(majority_count)));
  if (cap >= majority_count) return;

  std::vector<std::size_t> keep = by_label[majority_label];
  std::mt19937_64 rng(seed);
  std::shuffle(keep.begin(), keep.end(), rng);
  keep.resize(cap);
  std::vector<bool> kept(y.size(), true);
  for (std::size_t i : by_label[majority_label]) kept[i] = false;
  for (std::size_t i : keep) kept[i] = true;

  std::vector<SparseVector> new_x;
  std::vector<InfoType> new_y;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!kept[i]) continue;
    new_x.push_back(std::move(X[i]));
    new_y.push_back(y[i]);
  }
  X = std::move(new_x);
  y = std::move(new_y);
}

}  // namespace issuetypes
