// Copyright 2026 The seqtrans Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <map>

#include "doctest.h"
#include "oracles.hpp"

using namespace seqtrans;

namespace {

double nll(const EstimatorParams& p, const BinaryVector& v) { return -nade_log_likelihood(p, v); }

}  // namespace

TEST_SUITE("rbm") {
  TEST_CASE("free energy of the zero model is -H log 2") {
    const auto p = EstimatorParams::zeros(2, 3);
    for (const auto& v : oracle::all_configs(2))
      CHECK(rbm_free_energy(p, v) == doctest::Approx(-3.0 * std::log(2.0)).epsilon(1e-14));
  }

  TEST_CASE("free energy with decoupled biases") {
    auto p = EstimatorParams::zeros(2, 2);
    p.visible_bias << 1.0, -1.0;
    CHECK(rbm_free_energy(p, {1, 0}) == doctest::Approx(-1.0 - 2.0 * std::log(2.0)));
    CHECK(rbm_free_energy(p, {1, 0}) == doctest::Approx(-2.38629436).epsilon(1e-8));
  }

  TEST_CASE("exp(-F)/Z matches the brute-force joint marginal") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      const auto p = oracle::random_estimator(4, 3, rng);
      for (const auto& v : oracle::all_configs(4)) {
        const double expected = static_cast<double>(oracle::rbm_log_prob(p, v));
        CHECK(rbm_exact_log_likelihood(p, v) == doctest::Approx(expected).epsilon(1e-10));
        // exp(-F(v)) itself is the unnormalized marginal
        CHECK(std::exp(-rbm_free_energy(p, v)) ==
              doctest::Approx(static_cast<double>(oracle::rbm_unnormalized_marginal(p, v)))
                  .epsilon(1e-10));
      }
    }
  }

  TEST_CASE("exact likelihood: uniform, normalized, factorized") {
    const auto zero = EstimatorParams::zeros(3, 2);
    for (const auto& v : oracle::all_configs(3))
      CHECK(rbm_exact_log_likelihood(zero, v) == doctest::Approx(std::log(1.0 / 8.0)));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      const long n = 1 + trial % 6, h = 1 + (trial * 5) % 6;
      const auto p = oracle::random_estimator(n, h, rng);
      double total = 0.0;
      for (const auto& v : oracle::all_configs(static_cast<std::size_t>(n)))
        total += std::exp(rbm_exact_log_likelihood(p, v));
      CHECK(std::abs(total - 1.0) < 1e-10);
    }

    auto fact = oracle::random_estimator(4, 3, rng);
    fact.weights.setZero();
    for (const auto& v : oracle::all_configs(4)) {
      double expected = 0.0;
      for (long j = 0; j < 4; ++j) {
        const double pj = sigmoid(fact.visible_bias[j]);
        expected += std::log(v[static_cast<std::size_t>(j)] ? pj : 1.0 - pj);
      }
      CHECK(rbm_exact_log_likelihood(fact, v) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  TEST_CASE("exact likelihood refuses large N") {
    const auto p = EstimatorParams::zeros(21, 2);
    CHECK_THROWS_AS(rbm_exact_log_likelihood(p, BinaryVector(21, 0)), IntractableError);
    CHECK_THROWS_AS(rbm_exact_log_likelihood(EstimatorParams::zeros(5, 2), BinaryVector(5, 0), 4),
                    IntractableError);
  }

  TEST_CASE("dimension and domain errors") {
    const auto p = EstimatorParams::zeros(3, 2);
    CHECK_THROWS_AS(rbm_free_energy(p, {1, 0}), DimensionError);
    CHECK_THROWS_AS(rbm_free_energy(p, {1, 0, 2}), DomainError);
    EstimatorParams bad{Vector::Zero(3), Vector::Zero(2), Matrix::Zero(3, 3)};
    CHECK_THROWS_AS(rbm_free_energy(bad, {1, 0, 1}), DimensionError);
    Rng rng(0);
    CHECK_THROWS_AS(rbm_cd1_gradient(p, {1, 1}, rng), DimensionError);
  }

  TEST_CASE("CD-1 replays the seeded Gibbs step") {
    const auto p = EstimatorParams::zeros(2, 2);
    const BinaryVector v{1, 1};
    for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 12345ULL}) {
      Rng rng(seed);
      const auto g = rbm_cd1_gradient(p, v, rng);

      // Hand trace: two hidden draws at p = 1/2, then two visible draws at
      // p = sigma(0) = 1/2 (zero weights ignore h).
      Rng replay(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      unit(replay);
      unit(replay);
      BinaryVector recon{static_cast<std::uint8_t>(unit(replay) < 0.5),
                         static_cast<std::uint8_t>(unit(replay) < 0.5)};
      for (long j = 0; j < 2; ++j) {
        const double vj = v[static_cast<std::size_t>(j)], rj = recon[static_cast<std::size_t>(j)];
        CHECK(g.visible_bias[j] == -vj + rj);
        for (long i = 0; i < 2; ++i) CHECK(g.weights(i, j) == doctest::Approx(-0.5 * vj + 0.5 * rj));
      }
      CHECK(g.hidden_bias.isZero(0.0));
    }
  }

  TEST_CASE("CD-1 is exactly zero when the reconstruction equals the data") {
    // Saturated visible biases force v* = v.
    auto p = EstimatorParams::zeros(3, 2);
    p.visible_bias << 50.0, -50.0, 50.0;
    p.weights << 0.3, -0.2, 0.1, 0.4, 0.0, -0.5;
    Rng rng(3);
    const auto g = rbm_cd1_gradient(p, {1, 0, 1}, rng);
    CHECK(g.visible_bias.isZero(0.0));
    CHECK(g.hidden_bias.isZero(0.0));
    CHECK(g.weights.isZero(0.0));
  }

  TEST_CASE("200 CD-1 updates raise the likelihood of the training vector") {
    Rng init(2024);
    auto p = EstimatorParams::random_init(3, 4, init);
    const BinaryVector v{1, 0, 1};
    const double before = rbm_exact_log_likelihood(p, v);
    Rng rng(99);
    for (int step = 0; step < 200; ++step) {
      const auto g = rbm_cd1_gradient(p, v, rng);
      p.visible_bias -= 0.1 * g.visible_bias;
      p.hidden_bias -= 0.1 * g.hidden_bias;
      p.weights -= 0.1 * g.weights;
    }
    CHECK(rbm_exact_log_likelihood(p, v) > before);
  }
}

TEST_SUITE("nade") {
  TEST_CASE("conditionals without weights") {
    auto p = EstimatorParams::zeros(4, 3);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 5; ++k) {
      const auto v = oracle::random_binary(4, rng);
      CHECK(nade_conditionals(p, v).isApprox(Vector::Constant(4, 0.5)));
    }
    p.visible_bias << 1.0, -2.0, 0.5, 3.0;
    const auto c = nade_conditionals(p, {1, 0, 1, 1});
    for (long j = 0; j < 4; ++j) CHECK(c[j] == doctest::Approx(sigmoid(p.visible_bias[j])));
  }

  TEST_CASE("first conditional uses the empty prefix") {
    std::mt19937_64 rng(8);
    const auto p = oracle::random_estimator(3, 4, rng);
    const double expected = sigmoid(p.weights.col(0).dot(sigmoid(p.hidden_bias)) + p.visible_bias[0]);
    CHECK(nade_conditionals(p, {0, 1, 1})[0] == doctest::Approx(expected).epsilon(1e-15));
    CHECK(nade_conditionals(p, {1, 0, 0})[0] == doctest::Approx(expected).epsilon(1e-15));
  }

  TEST_CASE("conditionals match marginals of the enumerated joint") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
      const auto p = oracle::random_estimator(5, 3, rng);
      const auto v = oracle::random_binary(5, rng);
      const auto c = nade_conditionals(p, v);
      for (std::size_t j = 0; j < 5; ++j) {
        const double expected = static_cast<double>(oracle::nade_conditional_by_marginal(p, v, j));
        CHECK(c[static_cast<long>(j)] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(c[static_cast<long>(j)] > 0.0);
        CHECK(c[static_cast<long>(j)] < 1.0);
      }
    }
  }

  TEST_CASE("log-likelihood: uniform, normalized, chain-rule oracle") {
    const auto zero = EstimatorParams::zeros(4, 2);
    for (const auto& v : oracle::all_configs(4))
      CHECK(nade_log_likelihood(zero, v) == doctest::Approx(-4.0 * std::log(2.0)));

    std::mt19937_64 rng(31);
    for (long n = 1; n <= 10; ++n) {
      const auto p = oracle::random_estimator(n, 1 + n % 5, rng);
      std::vector<double> lls;
      for (const auto& v : oracle::all_configs(static_cast<std::size_t>(n)))
        lls.push_back(nade_log_likelihood(p, v));
      CHECK(std::abs(std::exp(log_sum_exp(lls)) - 1.0) < 1e-8);
    }

    for (int trial = 0; trial < 5; ++trial) {
      const auto p = oracle::random_estimator(6, 4, rng);
      const auto v = oracle::random_binary(6, rng);
      CHECK(std::abs(nade_log_likelihood(p, v) - static_cast<double>(oracle::nade_log_prob(p, v))) <
            1e-10);
    }
  }

  TEST_CASE("factorized case equals independent Bernoulli log-likelihood") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
      auto p = oracle::random_estimator(7, 3, rng, 3.0);
      p.weights.setZero();
      const auto v = oracle::random_binary(7, rng);
      double expected = 0.0;
      for (long j = 0; j < 7; ++j) {
        const double z = p.visible_bias[j];
        expected += v[static_cast<std::size_t>(j)] ? log_sigmoid(z) : log_sigmoid(-z);
      }
      CHECK(std::abs(nade_log_likelihood(p, v) - expected) < 1e-12);
    }
  }

  TEST_CASE("gradient closed form at the zero model") {
    const auto p = EstimatorParams::zeros(4, 3);
    const auto g = nade_gradient(p, {1, 1, 1, 1});
    CHECK(g.visible_bias.isApprox(Vector::Constant(4, -0.5)));
    CHECK(g.hidden_bias.isZero(0.0));
  }

  TEST_CASE("gradient matches central finite differences") {
    std::mt19937_64 rng(51);
    const double h = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const long n = 2 + trial % 5, hid = 1 + trial % 4;
      const auto p = oracle::random_estimator(n, hid, rng);
      const auto v = oracle::random_binary(static_cast<std::size_t>(n), rng);
      const auto g = nade_gradient(p, v);
      auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
      };
      auto probe = p;
      for (long j = 0; j < n; ++j) {
        probe.visible_bias[j] += h;
        const double up = nll(probe, v);
        probe.visible_bias[j] -= 2 * h;
        const double down = nll(probe, v);
        probe.visible_bias[j] += h;
        worst = std::max(worst, rel(g.visible_bias[j], (up - down) / (2 * h)));
      }
      for (long i = 0; i < hid; ++i) {
        probe.hidden_bias[i] += h;
        const double up = nll(probe, v);
        probe.hidden_bias[i] -= 2 * h;
        const double down = nll(probe, v);
        probe.hidden_bias[i] += h;
        worst = std::max(worst, rel(g.hidden_bias[i], (up - down) / (2 * h)));
        for (long j = 0; j < n; ++j) {
          probe.weights(i, j) += h;
          const double wu = nll(probe, v);
          probe.weights(i, j) -= 2 * h;
          const double wd = nll(probe, v);
          probe.weights(i, j) += h;
          worst = std::max(worst, rel(g.weights(i, j), (wu - wd) / (2 * h)));
        }
      }
    }
    CHECK(worst < 1e-4);
  }

  TEST_CASE("expected score under the model is zero") {
    std::mt19937_64 rng(61);
    for (long n = 1; n <= 6; ++n) {
      const auto p = oracle::random_estimator(n, 3, rng);
      auto mean = EstimatorGradient::zeros_like(p);
      for (const auto& v : oracle::all_configs(static_cast<std::size_t>(n))) {
        const double w = std::exp(nade_log_likelihood(p, v));
        const auto g = nade_gradient(p, v);
        mean.visible_bias += w * g.visible_bias;
        mean.hidden_bias += w * g.hidden_bias;
        mean.weights += w * g.weights;
      }
      CHECK(mean.visible_bias.cwiseAbs().maxCoeff() < 1e-8);
      CHECK(mean.hidden_bias.cwiseAbs().maxCoeff() < 1e-8);
      CHECK(mean.weights.cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("gradient cost output equals the negative log-likelihood") {
    std::mt19937_64 rng(71);
    const auto p = oracle::random_estimator(6, 4, rng);
    const auto v = oracle::random_binary(6, rng);
    double cost = 0.0;
    nade_gradient(p, v, &cost);
    CHECK(cost == doctest::Approx(-nade_log_likelihood(p, v)).epsilon(1e-14));
  }

  TEST_CASE("sampling") {
    auto p = EstimatorParams::zeros(2, 2);
    p.visible_bias << 20.0, -20.0;
    Rng rng(1);
    for (int k = 0; k < 1000; ++k) CHECK(nade_sample(p, rng) == BinaryVector{1, 0});

    const auto fair = EstimatorParams::zeros(1, 1);
    Rng rng2(2);
    int ones = 0;
    for (int k = 0; k < 100000; ++k) ones += nade_sample(fair, rng2)[0];
    CHECK(ones >= 49400);
    CHECK(ones <= 50600);

    Rng a(9), b(9);
    std::mt19937_64 r(3);
    const auto q = oracle::random_estimator(5, 3, r);
    for (int k = 0; k < 50; ++k) CHECK(nade_sample(q, a) == nade_sample(q, b));
  }

  TEST_CASE("empirical sample distribution matches the enumerated joint") {
    std::mt19937_64 r(81);
    const auto p = oracle::random_estimator(4, 3, r);
    Rng rng(123);
    std::map<BinaryVector, int> counts;
    const int draws = 1000000;
    for (int k = 0; k < draws; ++k) ++counts[nade_sample(p, rng)];
    double tv = 0.0;
    for (const auto& v : oracle::all_configs(4)) {
      const double expected = std::exp(static_cast<double>(oracle::nade_log_prob(p, v)));
      tv += std::abs(expected - static_cast<double>(counts[v]) / draws);
    }
    CHECK(0.5 * tv < 0.01);
  }
}
