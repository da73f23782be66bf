#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace threadloom {

double sigmoid(double z);

// log(1 + e^z) without overflow.
double softplus(double z);

struct TrainConfig {
  double learning_rate = 0.5;
  double l2 = 1e-4;
  int epochs = 2000;
  std::uint64_t seed = 0;
  double convergence_tol = 1e-7;

  void validate() const;
};

// Binary logistic regression data: dense rows of equal width, targets in
// {0, 1}. The unpenalized column, if any, is the intercept.
struct LogisticProblem {
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  std::optional<std::size_t> unpenalized;

  std::size_t dimension() const { return rows.empty() ? 0 : rows.front().size(); }
  void validate() const;
};

// mean log-loss + l2/2 * ||w||^2 over the penalized coordinates.
double logistic_loss(const LogisticProblem& problem, std::span<const double> w,
                     double l2);
std::vector<double> logistic_gradient(const LogisticProblem& problem,
                                      std::span<const double> w, double l2);

struct TrainResult {
  std::vector<double> weights;
  int epochs_run = 0;
  double final_loss = 0.0;
};

// Full-batch gradient descent from zero weights. Stops after config.epochs
// steps or once the loss changes by less than convergence_tol. Serial and
// deterministic.
TrainResult fit_logistic(const LogisticProblem& problem, const TrainConfig& config);

}  // namespace threadloom
