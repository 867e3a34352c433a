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

#include <set>

#include "doctest.h"
#include "oracles.hpp"

using namespace seqtrans;

namespace {

Vector random_probs(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.02, 0.98);
  Vector p(static_cast<long>(n));
  for (auto& e : p) e = u(rng);
  return p;
}

std::vector<double> as_std(const Vector& p) { return {p.data(), p.data() + p.size()}; }

// Compares a stream against the brute-force sort, treating runs of equal
// logp as sets.
void check_matches_sorted(const std::vector<RankedConfig>& got,
                          const std::vector<RankedConfig>& want, double tol) {
  REQUIRE(got.size() <= want.size());
  std::size_t i = 0;
  while (i < got.size()) {
    std::size_t j = i + 1;
    while (j < want.size() && std::abs(want[j].logp - want[i].logp) <= tol) ++j;
    const std::size_t end = std::min(j, got.size());
    std::set<BinaryVector> expected_class;
    for (std::size_t k = i; k < j; ++k) expected_class.insert(want[k].v);
    for (std::size_t k = i; k < end; ++k) {
      CHECK(std::abs(got[k].logp - want[k].logp) <= tol);
      CHECK(expected_class.count(got[k].v) == 1);
    }
    i = end;
  }
}

}  // namespace

TEST_SUITE("enumeration") {
  TEST_CASE("two-bit example order") {
    Vector p(2);
    p << 0.9, 0.2;
    const auto out = enumerate_independent(p, std::nullopt);
    REQUIRE(out.size() == 4);
    const std::vector<BinaryVector> order{{1, 0}, {1, 1}, {0, 0}, {0, 1}};
    const std::vector<double> prob{0.72, 0.18, 0.08, 0.02};
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(out[i].v == order[i]);
      CHECK(std::exp(out[i].logp) == doctest::Approx(prob[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("uniform probabilities: ones first, all logps equal") {
    const std::size_t n = 8;
    const Vector p = Vector::Constant(n, 0.5);
    const auto out = enumerate_independent(p, std::nullopt);
    REQUIRE(out.size() == 256);
    CHECK(out.front().v == BinaryVector(n, 1));
    for (const auto& r : out) CHECK(std::abs(r.logp - n * std::log(0.5)) < 1e-9);
  }

  TEST_CASE("first K of N=12 is a prefix of the brute-force sort") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector p = random_probs(12, rng);
      check_matches_sorted(enumerate_independent(p, 50), oracle::sorted_independent(as_std(p)),
                           1e-9);
    }
  }

  TEST_CASE("full run is a complete, duplicate-free, non-increasing stream") {
    std::mt19937_64 rng(5);
    for (std::size_t n : {1U, 3U, 7U, 12U}) {
      const Vector p = random_probs(n, rng);
      const auto out = enumerate_independent(p, std::nullopt);
      CHECK(out.size() == (std::size_t{1} << n));
      std::set<BinaryVector> seen;
      for (std::size_t i = 0; i < out.size(); ++i) {
        seen.insert(out[i].v);
        if (i > 0) CHECK(out[i].logp <= out[i - 1].logp + 1e-12);
        long double direct = 0.0L;
        for (std::size_t j = 0; j < n; ++j)
          direct += std::log(out[i].v[j] ? p[static_cast<long>(j)] : 1.0 - p[static_cast<long>(j)]);
        CHECK(std::abs(out[i].logp - static_cast<double>(direct)) < 1e-9);
      }
      CHECK(seen.size() == out.size());
      check_matches_sorted(out, oracle::sorted_independent(as_std(p)), 1e-9);
    }
  }

  TEST_CASE("insertions are at most 2K and the queue grows linearly") {
    std::mt19937_64 rng(9);
    const Vector p = random_probs(16, rng);
    auto e = IndependentEnumerator::from_probabilities(p);
    for (std::size_t k = 1; k <= 2000; ++k) {
      REQUIRE(e.next().has_value());
      CHECK(e.insertions() <= 2 * k);
      CHECK(e.peak_queue_size() <= k + 1);
    }
  }

  TEST_CASE("logits and probabilities give the same stream") {
    std::mt19937_64 rng(13);
    const Vector p = random_probs(6, rng);
    const Vector z = p.unaryExpr([](double q) { return std::log(q / (1.0 - q)); });
    auto a = IndependentEnumerator::from_probabilities(p);
    auto b = IndependentEnumerator::from_logits(z);
    for (int i = 0; i < 64; ++i) {
      const auto x = a.next();
      const auto y = b.next();
      REQUIRE(x.has_value());
      REQUIRE(y.has_value());
      CHECK(x->v == y->v);
      CHECK(x->logp == doctest::Approx(y->logp).epsilon(1e-12));
    }
    CHECK_FALSE(a.next().has_value());
  }

  TEST_CASE("boundary probabilities are clamped with a warning") {
    Vector p(3);
    p << 0.0, 1.0, 0.3;
    auto e = IndependentEnumerator::from_probabilities(p);
    CHECK(e.warnings().size() == 2);
    const auto first = e.next();
    REQUIRE(first.has_value());
    CHECK(first->v == BinaryVector{0, 1, 0});
    CHECK(std::isfinite(first->logp));
    std::size_t count = 1;
    while (e.next()) ++count;
    CHECK(count == 8);
  }

  TEST_CASE("invalid requests") {
    CHECK_THROWS_AS(enumerate_independent(Vector(0), 3), DomainError);
    Vector bad(2);
    bad << 0.5, 1.5;
    CHECK_THROWS_AS(enumerate_independent(bad, 3), DomainError);
    Vector p(2);
    p << 0.4, 0.7;
    CHECK(enumerate_independent(p, 0).empty());
    CHECK(enumerate_independent(p, 10).size() == 4);
  }
}
