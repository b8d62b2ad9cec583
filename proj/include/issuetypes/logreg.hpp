#pragma once

// One-vs-rest logistic regression trained by full-batch gradient descent with
// backtracking line search. The per-label binary objective is
//
//   L(w, b) = 1/(2C) * ||w||^2 + sum_i s_i * log(1 + exp(-z_i (w.x_i + b)))
//
// with z_i = +1 for the target label, -1 otherwise, and s_i the per-sample
// weight. The bias is unregularized and weights start at zero, which makes
// training deterministic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "issuetypes/errors.hpp"
#include "issuetypes/info_type.hpp"
#include "issuetypes/parallel.hpp"
#include "issuetypes/sparse.hpp"

namespace issuetypes {

struct BinaryLogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loss_trace;  // loss after each accepted step
};

struct LogisticRegressionModel {
  std::vector<InfoType> labels;  // ordinal-sorted training labels
  std::vector<BinaryLogisticModel> per_label;
  double C = 1.0;
  std::uint32_t feature_width = 0;
};

struct LogRegOptions {
  int max_iters = 1000;
  double tol = 1e-4;  // gradient infinity-norm
  unsigned threads = 1;
};

namespace detail {

inline double log1pexp(double x) {
  // log(1 + e^x) without overflow.
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct BinaryProblem {
  const std::vector<SparseVector>* X;
  std::vector<double> sign;    // z_i = +1 target label, -1 otherwise
  std::vector<double> weight;  // s_i
  double inv_c;

  double loss(const std::vector<double>& w, double b) const {
    double total = 0.0;
    for (std::size_t i = 0; i < X->size(); ++i) {
      const double margin = sign[i] * (dot((*X)[i], w) + b);
      total += weight[i] * log1pexp(-margin);
    }
    double reg = 0.0;
    for (double v : w) reg += v * v;
    return total + 0.5 * inv_c * reg;
  }

  // Gradient of the loss wrt (w, b).
  void gradient(const std::vector<double>& w, double b, std::vector<double>& gw,
                double& gb) const {
    std::fill(gw.begin(), gw.end(), 0.0);
    gb = 0.0;
    for (std::size_t i = 0; i < X->size(); ++i) {
      const double margin = sign[i] * (dot((*X)[i], w) + b);
      const double coef = -weight[i] * sign[i] * sigmoid(-margin);
      add_scaled(gw, (*X)[i], coef);
      gb += coef;
    }
    for (std::size_t j = 0; j < w.size(); ++j) gw[j] += inv_c * w[j];
  }
};

inline BinaryLogisticModel train_binary(const BinaryProblem& problem, std::uint32_t width,
                                        const LogRegOptions& opts) {
  BinaryLogisticModel model;
  model.weights.assign(width, 0.0);
  double& b = model.bias;
  std::vector<double> grad_w(width, 0.0);
  double grad_b = 0.0;
  std::vector<double> trial_w(width, 0.0);

  double loss = problem.loss(model.weights, b);
  model.loss_trace.push_back(loss);
  double step = 1.0;
  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.5;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    problem.gradient(model.weights, b, grad_w, grad_b);
    double grad_inf = std::abs(grad_b);
    double grad_sq = grad_b * grad_b;
    for (double g : grad_w) {
      grad_inf = std::max(grad_inf, std::abs(g));
      grad_sq += g * g;
    }
    if (grad_inf < opts.tol) {
      model.converged = true;
      model.iterations = iter;
      return model;
    }
    // Backtracking line search along -grad; grows the initial step again
    // after each success so progress does not stall at a tiny step.
    step = std::min(step * 2.0, 1e6);
    bool accepted = false;
    while (step > 1e-20) {
      for (std::size_t j = 0; j < trial_w.size(); ++j) {
        trial_w[j] = model.weights[j] - step * grad_w[j];
      }
      const double trial_b = b - step * grad_b;
      const double trial_loss = problem.loss(trial_w, trial_b);
      if (trial_loss <= loss - kArmijo * step * grad_sq) {
        model.weights.swap(trial_w);
        b = trial_b;
        loss = trial_loss;
        accepted = true;
        break;
      }
      step *= kShrink;
    }
    model.iterations = iter + 1;
    if (!accepted) break;  // numerically stuck, cannot guarantee descent
    model.loss_trace.push_back(loss);
  }
  return model;
}

}  // namespace detail

// `seed` is accepted for interface symmetry with the forest trainer; the
// optimizer itself is deterministic.
inline LogisticRegressionModel train_logreg(const std::vector<SparseVector>& X,
                                            const std::vector<InfoType>& y, double C,
                                            const std::vector<double>& sample_weights,
                                            std::uint64_t seed = 0,
                                            const LogRegOptions& opts = {}) {
  (void)seed;
  if (X.size() != y.size() || X.size() < 2) {
    throw ValidationError("train_logreg: need at least two samples with matching labels");
  }
  if (!sample_weights.empty() && sample_weights.size() != X.size()) {
    throw ValidationError("train_logreg: sample_weights length mismatch");
  }
  if (C <= 0.0) throw std::invalid_argument("train_logreg: C must be positive");
  for (const SparseVector& x : X) {
    for (double v : x.values) {
      if (!std::isfinite(v)) throw ValidationError("train_logreg: non-finite feature value");
    }
  }
  std::set<InfoType> distinct(y.begin(), y.end());
  if (distinct.size() < 2) {
    throw ValidationError("train_logreg: training data has a single label");
  }

  LogisticRegressionModel model;
  model.C = C;
  model.feature_width = X.front().dim;
  model.labels.assign(distinct.begin(), distinct.end());
  model.per_label.resize(model.labels.size());

  parallel_for(model.labels.size(), opts.threads, [&](std::size_t li) {
    const InfoType target = model.labels[li];
    detail::BinaryProblem problem;
    problem.X = &X;
    problem.inv_c = 1.0 / C;
    problem.sign.resize(X.size());
    problem.weight.resize(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
      problem.weight[i] = sample_weights.empty() ? 1.0 : sample_weights[i];
      problem.sign[i] = y[i] == target ? 1.0 : -1.0;
    }
    model.per_label[li] = detail::train_binary(problem, model.feature_width, opts);
  });
  return model;
}

struct Prediction {
  InfoType label;
  std::vector<double> scores;  // aligned with the model's label ordering
};

inline Prediction predict_logreg(const LogisticRegressionModel& model, const SparseVector& x) {
  if (x.dim != model.feature_width) {
    throw ValidationError("predict_logreg: feature width mismatch (" + std::to_string(x.dim) +
                          " vs " + std::to_string(model.feature_width) + ")");
  }
  Prediction p;
  p.scores.resize(model.labels.size());
  std::size_t best = 0;
  for (std::size_t li = 0; li < model.labels.size(); ++li) {
    const auto& m = model.per_label[li];
    p.scores[li] = detail::sigmoid(dot(x, m.weights) + m.bias);
    if (p.scores[li] > p.scores[best]) best = li;  // ties keep the lower ordinal
  }
  p.label = model.labels[best];
  return p;
}

}  // namespace issuetypes
