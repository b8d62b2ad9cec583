#pragma once

// Cohen's kappa for two annotators over the same item sequence.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "issuetypes/errors.hpp"

namespace issuetypes {

// kappa = (p_o - p_e) / (1 - p_e) with p_o the observed agreement fraction
// and p_e the chance agreement from the two annotators' marginals. Perfect
// agreement returns exactly 1.0 (the defined limit also when p_e = 1).
template <typename Label>
double cohen_kappa(const std::vector<Label>& labels_a, const std::vector<Label>& labels_b) {
  if (labels_a.empty() || labels_a.size() != labels_b.size()) {
    throw ValidationError("cohen_kappa: label sequences must have equal non-zero length");
  }
  const double n = static_cast<double>(labels_a.size());
  std::size_t agree = 0;
  std::map<Label, std::size_t> count_a, count_b;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    if (labels_a[i] == labels_b[i]) ++agree;
    ++count_a[labels_a[i]];
    ++count_b[labels_b[i]];
  }
  if (agree == labels_a.size()) return 1.0;

  double p_e = 0.0;
  for (const auto& [label, ca] : count_a) {
    auto it = count_b.find(label);
    if (it == count_b.end()) continue;
    p_e += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
  }
  const double p_o = static_cast<double>(agree) / n;
  if (p_e >= 1.0) {
    throw ValidationError("cohen_kappa: undefined (chance agreement 1 with observed < 1)");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

}  // namespace issuetypes
