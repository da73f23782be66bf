#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "threadloom/error.hpp"
#include "threadloom/logistic.hpp"

using namespace threadloom;

TEST_CASE("sigmoid reference points") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(std::abs(sigmoid(40.0) - 1.0) <= 1e-12);
  CHECK(sigmoid(-40.0) >= 0.0);
  CHECK(sigmoid(-40.0) <= 1e-12);
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(std::isfinite(softplus(800.0)));
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus(800.0) == doctest::Approx(800.0));
}

TEST_CASE("sigmoid symmetry and monotonicity") {
  Rng rng(3);
  double prev = sigmoid(-50.0);
  for (int i = 0; i < 1000; ++i) {
    const double z = 100.0 * uniform_unit(rng) - 50.0;
    CHECK(std::abs(sigmoid(z) + sigmoid(-z) - 1.0) <= 1e-12);
  }
  for (double z = -50.0; z <= 50.0; z += 0.25) {
    CHECK(sigmoid(z) >= prev);
    prev = sigmoid(z);
  }
}

TEST_CASE("loss matches a naive evaluation") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto c = oracle::random_gradient_case(rng);
    CHECK(logistic_loss(c.problem, c.weights, c.l2) ==
          doctest::Approx(oracle::naive_loss(c.problem, c.weights, c.l2)).epsilon(1e-10));
  }
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto c = oracle::random_gradient_case(rng);
    const auto g = logistic_gradient(c.problem, c.weights, c.l2);
    const auto fd = oracle::central_difference(c.problem, c.weights, c.l2);
    CHECK(oracle::relative_error(g, fd) <= 1e-4);
  }
}

TEST_CASE("separable data is fit perfectly") {
  LogisticProblem p;
  for (int i = -10; i <= 10; ++i) {
    if (i == 0) continue;
    p.rows.push_back({i / 10.0, 1.0});
    p.targets.push_back(i > 0 ? 1.0 : 0.0);
  }
  p.unpenalized = 1;
  const auto r = fit_logistic(p, TrainConfig{});
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const double z = r.weights[0] * p.rows[i][0] + r.weights[1];
    CHECK((sigmoid(z) >= 0.5) == (p.targets[i] == 1.0));
  }
  CHECK(r.final_loss < logistic_loss(p, std::vector<double>{0.0, 0.0}, 1e-4));
}

TEST_CASE("all-positive labels push every score above one half") {
  LogisticProblem p;
  Rng rng(8);
  for (int i = 0; i < 40; ++i) {
    p.rows.push_back({uniform_unit(rng), uniform_unit(rng), 1.0});
    p.targets.push_back(1.0);
  }
  p.unpenalized = 2;
  const auto r = fit_logistic(p, TrainConfig{});
  for (const auto& row : p.rows) {
    double z = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) z += row[j] * r.weights[j];
    CHECK(sigmoid(z) > 0.5);
  }
}

TEST_CASE("training is deterministic and stops early on convergence") {
  Rng rng(4);
  const auto c = oracle::random_gradient_case(rng);
  TrainConfig cfg;
  cfg.epochs = 300;
  const auto a = fit_logistic(c.problem, cfg);
  const auto b = fit_logistic(c.problem, cfg);
  CHECK(a.weights == b.weights);
  CHECK(a.epochs_run == b.epochs_run);
  CHECK(a.epochs_run <= 300);
  cfg.convergence_tol = 1.0;
  CHECK(fit_logistic(c.problem, cfg).epochs_run == 1);
}

TEST_CASE("invalid training input is reported") {
  LogisticProblem empty;
  try {
    fit_logistic(empty, TrainConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("training set is empty") != std::string::npos);
  }

  LogisticProblem ragged;
  ragged.rows = {{1.0, 2.0}, {1.0}};
  ragged.targets = {0.0, 1.0};
  try {
    fit_logistic(ragged, TrainConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("feature dimension mismatch at row 1") != std::string::npos);
  }

  LogisticProblem ok;
  ok.rows = {{1.0}};
  ok.targets = {1.0};
  TrainConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(fit_logistic(ok, bad), Error);
  bad = TrainConfig{};
  bad.epochs = 0;
  CHECK_THROWS_AS(fit_logistic(ok, bad), Error);
  ok.targets = {0.5};
  CHECK_THROWS_AS(fit_logistic(ok, TrainConfig{}), Error);
  ok.targets = {1.0};
  ok.rows = {{std::numeric_limits<double>::quiet_NaN()}};
  CHECK_THROWS_AS(fit_logistic(ok, TrainConfig{}), Error);
}
