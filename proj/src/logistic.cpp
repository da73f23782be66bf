#include "threadloom/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "threadloom/error.hpp"

namespace threadloom {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw usage_error("learning rate must be positive");
  }
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw usage_error("l2 must be nonnegative");
  if (epochs < 1) throw usage_error("epochs must be positive");
  if (!(convergence_tol > 0.0)) throw usage_error("convergence tolerance must be positive");
}

void LogisticProblem::validate() const {
  if (rows.empty()) throw data_error("training set is empty");
  if (rows.size() != targets.size()) {
    throw data_error("training rows and targets differ in length");
  }
  const std::size_t d = rows.front().size();
  if (d == 0) throw data_error("training rows have no features");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      throw data_error("feature dimension mismatch at row " + std::to_string(i) +
                       ": expected " + std::to_string(d) + ", got " +
                       std::to_string(rows[i].size()));
    }
    for (double x : rows[i]) {
      if (!std::isfinite(x)) throw data_error("non-finite feature at row " + std::to_string(i));
    }
    if (targets[i] != 0.0 && targets[i] != 1.0) {
      throw data_error("target at row " + std::to_string(i) + " is not 0 or 1");
    }
  }
  if (unpenalized && *unpenalized >= d) {
    throw usage_error("unpenalized column out of range");
  }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double penalty(const LogisticProblem& problem, std::span<const double> w, double l2) {
  double sq = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (problem.unpenalized && j == *problem.unpenalized) continue;
    sq += w[j] * w[j];
  }
  return 0.5 * l2 * sq;
}

}  // namespace

double logistic_loss(const LogisticProblem& problem, std::span<const double> w,
                     double l2) {
  double total = 0.0;
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    const double z = dot(problem.rows[i], w);
    // -y log s(z) - (1-y) log(1 - s(z)) = softplus(z) - y z
    total += softplus(z) - problem.targets[i] * z;
  }
  return total / static_cast<double>(problem.rows.size()) + penalty(problem, w, l2);
}

std::vector<double> logistic_gradient(const LogisticProblem& problem,
                                      std::span<const double> w, double l2) {
  std::vector<double> grad(w.size(), 0.0);
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    const auto& x = problem.rows[i];
    const double residual = sigmoid(dot(x, w)) - problem.targets[i];
    for (std::size_t j = 0; j < w.size(); ++j) grad[j] += residual * x[j];
  }
  const double inv_n = 1.0 / static_cast<double>(problem.rows.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    grad[j] *= inv_n;
    if (!(problem.unpenalized && j == *problem.unpenalized)) grad[j] += l2 * w[j];
  }
  return grad;
}

TrainResult fit_logistic(const LogisticProblem& problem, const TrainConfig& config) {
  config.validate();
  problem.validate();

  TrainResult result;
  result.weights.assign(problem.dimension(), 0.0);
  double loss = logistic_loss(problem, result.weights, config.l2);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto grad = logistic_gradient(problem, result.weights, config.l2);
    for (std::size_t j = 0; j < grad.size(); ++j) {
      result.weights[j] -= config.learning_rate * grad[j];
    }
    const double next = logistic_loss(problem, result.weights, config.l2);
    result.epochs_run = epoch + 1;
    const double delta = std::abs(loss - next);
    loss = next;
    if (delta < config.convergence_tol) break;
  }
  result.final_loss = loss;
  return result;
}

}  // namespace threadloom
