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

#include <numeric>

#include "doctest.h"
#include "oracles.hpp"

using namespace seqtrans;

namespace {

CorpusSpec small_spec(std::uint64_t seed) {
  CorpusSpec s;
  s.num_pitches = 12;
  s.feature_dim = 16;
  s.num_sequences = 4;
  s.seq_len = 30;
  s.dictionary = harmonic_dictionary(16, 12);
  s.seed = seed;
  return s;
}

std::vector<Vector> random_features(std::size_t steps, long dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vector> x;
  for (std::size_t t = 0; t < steps; ++t) {
    Vector f(dim);
    for (auto& e : f) e = g(rng);
    x.push_back(f);
  }
  return x;
}

double total_energy(const std::vector<Vector>& x) {
  double e = 0.0;
  for (const auto& f : x) e += f.squaredNorm();
  return e;
}

bool same(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t t = 0; t < a.size(); ++t)
    if (a[t].size() != b[t].size() || a[t] != b[t]) return false;
  return true;
}

PianoRoll roll_of(std::vector<BinaryVector> frames) { return to_piano_roll(frames); }

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("identity dictionary renders one-hot frames exactly") {
    CorpusSpec s;
    s.num_pitches = 6;
    s.feature_dim = 6;
    s.dictionary = identity_dictionary(6);
    s.polyphony = 1;
    s.num_sequences = 3;
    s.seq_len = 40;
    const auto corpus = generate_corpus(s);
    REQUIRE(corpus.size() == 3);
    for (const auto& pair : corpus) {
      REQUIRE(pair.x.size() == 40);
      for (std::size_t t = 0; t < pair.x.size(); ++t) {
        CHECK(std::accumulate(pair.v[t].begin(), pair.v[t].end(), 0) <= 1);
        for (std::size_t p = 0; p < 6; ++p) CHECK(pair.x[t][static_cast<long>(p)] == pair.v[t][p]);
      }
    }
  }

  TEST_CASE("generation is deterministic under seed") {
    const auto a = generate_corpus(small_spec(5));
    const auto b = generate_corpus(small_spec(5));
    const auto c = generate_corpus(small_spec(6));
    REQUIRE(a.size() == b.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].v == b[i].v);
      CHECK(same(a[i].x, b[i].x));
      differs = differs || a[i].v != c[i].v;
    }
    CHECK(differs);
  }

  TEST_CASE("polyphony cap and background noise") {
    auto s = small_spec(8);
    s.polyphony = 2;
    s.onset_rate = 0.9;
    s.background_noise = 0.1;
    std::size_t busiest = 0;
    for (const auto& pair : generate_corpus(s)) {
      for (std::size_t t = 0; t < pair.v.size(); ++t) {
        const auto active = static_cast<std::size_t>(std::accumulate(pair.v[t].begin(), pair.v[t].end(), 0));
        CHECK(active <= 2);
        busiest = std::max(busiest, active);
        const Vector clean = s.dictionary * to_vector(pair.v[t]);
        CHECK((pair.x[t] - clean).norm() > 0.0);
        CHECK((pair.x[t] - clean).norm() < 1.5);
      }
    }
    CHECK(busiest == 2);
  }

  TEST_CASE("mean held-note run length follows note_hold") {
    auto s = small_spec(10);
    s.num_sequences = 1;
    s.seq_len = 10000;
    s.note_hold = 4.0;
    const auto pair = generate_corpus(s).front();
    std::vector<std::size_t> runs;
    for (std::size_t p = 0; p < s.num_pitches; ++p) {
      std::size_t len = 0;
      for (std::size_t t = 0; t < pair.v.size(); ++t) {
        if (pair.v[t][p]) {
          ++len;
        } else if (len > 0) {
          runs.push_back(len);
          len = 0;
        }
      }
      // the run cut off by the end of the sequence is censored; drop it
    }
    REQUIRE(runs.size() > 500);
    const double mean = static_cast<double>(std::accumulate(runs.begin(), runs.end(), std::size_t{0})) /
                        static_cast<double>(runs.size());
    CHECK(mean == doctest::Approx(4.0).epsilon(0.10));
  }

  TEST_CASE("invalid specs are rejected") {
    auto s = small_spec(1);
    s.polyphony = 13;
    CHECK_THROWS_AS(generate_corpus(s), DomainError);
    s = small_spec(1);
    s.dictionary = Matrix::Ones(16, 12);
    CHECK_THROWS_AS(generate_corpus(s), DomainError);
    s = small_spec(1);
    s.dictionary = harmonic_dictionary(15, 12);
    CHECK_THROWS_AS(generate_corpus(s), DimensionError);
  }
}

TEST_SUITE("noise") {
  TEST_CASE("white noise at huge SNR is the identity") {
    const auto x = random_features(40, 8, 1);
    const auto y = apply_noise(x, {NoiseKind::white, 300.0, 0.0, 4});
    for (std::size_t t = 0; t < x.size(); ++t) CHECK((x[t] - y[t]).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("white and pink noise hit the requested SNR") {
    const auto x = random_features(64, 16, 2);
    for (auto kind : {NoiseKind::white, NoiseKind::pink}) {
      for (double snr : {0.0, 6.0, 20.0}) {
        const auto y = apply_noise(x, {kind, snr, 0.0, 7});
        std::vector<Vector> noise;
        for (std::size_t t = 0; t < x.size(); ++t) noise.push_back(y[t] - x[t]);
        const double measured = 10.0 * std::log10(total_energy(x) / total_energy(noise));
        CHECK(std::abs(measured - snr) < 0.5);
      }
    }
  }

  TEST_CASE("pink noise concentrates power at low frequencies") {
    const auto x = random_features(256, 1, 3);
    const auto y = apply_noise(x, {NoiseKind::pink, 0.0, 0.0, 11});
    // lag-1 autocorrelation of the added noise is clearly positive for 1/f
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t + 1 < x.size(); ++t) {
      const double a = y[t][0] - x[t][0];
      const double b = y[t + 1][0] - x[t + 1][0];
      num += a * b;
      den += a * a;
    }
    CHECK(num / den > 0.3);
  }

  TEST_CASE("long masks leave a single zeroed block, reproducibly") {
    const std::size_t steps = 50;
    const auto x = random_features(steps, 4, 4);
    std::size_t masked = 0, single_block = 0, suffix = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const NoiseSpec spec{NoiseKind::masking, 10.0 * steps, steps / 2.0, seed};
      const auto y = apply_noise(x, spec);
      CHECK(same(y, apply_noise(x, spec)));
      std::size_t blocks = 0;
      for (std::size_t t = 0; t < steps; ++t) {
        const bool zero = y[t].isZero(0.0);
        if (!zero) CHECK(y[t] == x[t]);
        if (zero && (t == 0 || !y[t - 1].isZero(0.0))) ++blocks;
      }
      if (blocks == 0) continue;
      ++masked;
      single_block += blocks == 1;
      suffix += blocks == 1 && y.back().isZero(0.0);
    }
    // masks average ten sequence lengths, so almost every mask runs to the end
    CHECK(masked > 50);
    CHECK(single_block >= masked * 9 / 10);
    CHECK(suffix >= masked * 9 / 10);
  }

  TEST_CASE("masking at mean 4 destroys about a third of the frames") {
    const auto x = random_features(20000, 2, 5);
    const auto y = apply_noise(x, {NoiseKind::masking, 4.0, 0.0, 3});
    std::size_t zeros = 0;
    for (const auto& f : y) zeros += f.isZero(0.0);
    const double fraction = static_cast<double>(zeros) / static_cast<double>(y.size());
    CHECK(fraction > 0.25);
    CHECK(fraction < 0.42);
  }

  TEST_CASE("pitch shift with zero sigma is the identity, otherwise a row rotation") {
    const auto x = random_features(30, 12, 6);
    CHECK(same(apply_noise(x, {NoiseKind::pitch_shift, 0.0, 0.0, 1}), x));
    const auto y = apply_noise(x, {NoiseKind::pitch_shift, 2.0, 0.0, 1});
    bool moved = false;
    for (std::size_t t = 0; t < x.size(); ++t) {
      bool found = false;
      for (long off = 0; off < 12 && !found; ++off) {
        bool match = true;
        for (long r = 0; r < 12 && match; ++r) match = y[t][(r + off) % 12] == x[t][r];
        found = match;
        moved = moved || (match && off != 0);
      }
      CHECK(found);
    }
    CHECK(moved);
  }

  TEST_CASE("every kind preserves shape and is seeded") {
    const auto x = random_features(25, 5, 7);
    for (const char* name : {"white", "pink", "masking", "pitch_shift"}) {
      const NoiseSpec spec{parse_noise_kind(name), 3.0, 0.0, 42};
      CHECK(to_string(spec.kind) == name);
      const auto y = apply_noise(x, spec);
      REQUIRE(y.size() == x.size());
      for (std::size_t t = 0; t < x.size(); ++t) CHECK(y[t].size() == x[t].size());
      CHECK(same(y, apply_noise(x, spec)));
    }
    CHECK_THROWS_AS(parse_noise_kind("brown"), DomainError);
    CHECK_THROWS_AS(apply_noise(x, {NoiseKind::masking, 0.0, 0.0, 1}), DomainError);
  }
}

TEST_SUITE("frame accuracy") {
  TEST_CASE("perfect and empty predictions") {
    const auto truth = roll_of({{1, 0, 1}, {0, 1, 0}});
    CHECK(frame_accuracy(truth, truth) == 1.0);
    CHECK(frame_accuracy(roll_of({{0, 0, 0}, {0, 0, 0}}), truth) == 0.0);
    CHECK(frame_accuracy(roll_of({{0, 0, 0}}), roll_of({{0, 0, 0}})) == 1.0);
  }

  TEST_CASE("direct formula") {
    // 8 hits, 2 false alarms, 2 misses over 4 frames of 4 pitches
    const auto truth = roll_of({{1, 1, 1, 0}, {1, 1, 0, 0}, {1, 1, 0, 1}, {1, 1, 0, 0}});
    const auto pred = roll_of({{1, 1, 0, 0}, {1, 1, 1, 0}, {1, 1, 1, 0}, {1, 1, 0, 0}});
    const auto c = frame_counts(pred, truth);
    CHECK(c.true_positives == 8);
    CHECK(c.false_positives == 2);
    CHECK(c.false_negatives == 2);
    CHECK(frame_accuracy(pred, truth) == doctest::Approx(8.0 / 12.0));
  }

  TEST_CASE("symmetric, bounded, and 1 only on identical rolls") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<BinaryVector> a, b;
      for (int t = 0; t < 3; ++t) {
        a.push_back(oracle::random_binary(3, rng));
        b.push_back(oracle::random_binary(3, rng));
      }
      const auto ra = roll_of(a), rb = roll_of(b);
      const double acc = frame_accuracy(ra, rb);
      CHECK(acc == frame_accuracy(rb, ra));
      CHECK(acc >= 0.0);
      CHECK(acc <= 1.0);
      CHECK((acc == 1.0) == (a == b));
    }
  }

  TEST_CASE("shape mismatch is rejected") {
    CHECK_THROWS_AS(frame_accuracy(roll_of({{1, 0}}), roll_of({{1, 0}, {0, 1}})), DimensionError);
    CHECK_THROWS_AS(frame_accuracy(roll_of({{1, 0}}), roll_of({{1, 0, 0}})), DimensionError);
  }
}
