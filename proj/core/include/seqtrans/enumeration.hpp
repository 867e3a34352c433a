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

#ifndef SEQTRANS_ENUMERATION_HPP
#define SEQTRANS_ENUMERATION_HPP

#include <cstddef>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "seqtrans/common.hpp"

namespace seqtrans {

struct RankedConfig {
  double logp = 0.0;
  BinaryVector v;
};

/// Lazily enumerates the configurations of N independent Bernoulli variables
/// in non-increasing order of probability.
///
/// The mode v0 sets every unit with p_i >= 1/2. Every other configuration is
/// v0 with a set of units flipped; flipping unit i costs L_i = |logit p_i|.
/// Flip sets are indexed by position in the ascending sort of L and grown
/// from their largest position m in one of two ways: add m+1, or move m to
/// m+1. Each subset is reached exactly once and children never cost less
/// than their parent, so a min-queue on total cost yields configurations in
/// order. The queue gains at most two entries per item produced.
///
/// Flip sets are stored as parent links into an arena, so producing an item
/// costs O(log queue + N) and the first K items cost O(N log N + K (N + log K)).
class IndependentEnumerator {
 public:
  /// Probabilities outside (eps, 1 - eps) are clamped with a warning.
  static constexpr double kClampEpsilon = 1e-12;

  static IndependentEnumerator from_probabilities(const Vector& p);

  /// Same distribution given as logits, p_i = sigma(z_i). Exact for any
  /// finite z; no clamping needed.
  static IndependentEnumerator from_logits(const Vector& z);

  /// Next configuration, or nullopt when all 2^N have been produced.
  std::optional<RankedConfig> next();

  std::size_t num_visible() const { return static_cast<std::size_t>(mode_.size()); }
  std::size_t produced() const { return produced_; }
  /// Queue insertions made so far, excluding the initial sort.
  std::size_t insertions() const { return insertions_; }
  std::size_t peak_queue_size() const { return peak_queue_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  struct Node {
    int last;    // largest sorted position in the flip set
    int parent;  // arena index of the set without `last`, or -1
  };
  struct Entry {
    double cost;
    std::size_t order;  // insertion counter, breaks cost ties
    int node;
  };
  struct EntryGreater {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.cost != b.cost) return a.cost > b.cost;
      return a.order > b.order;
    }
  };

  IndependentEnumerator(const Vector& log_on, const Vector& log_off);
  void push(double cost, int last, int parent);

  BinaryVector mode_;
  double mode_logp_ = 0.0;
  std::vector<double> sorted_cost_;  // L in ascending order
  std::vector<int> rank_;            // sorted position -> original index
  std::vector<Node> arena_;
  std::priority_queue<Entry, std::vector<Entry>, EntryGreater> queue_;
  std::size_t produced_ = 0;
  std::size_t insertions_ = 0;
  std::size_t peak_queue_ = 0;
  std::vector<std::string> warnings_;
};

/// The first K items of IndependentEnumerator (all 2^N when K is nullopt).
std::vector<RankedConfig> enumerate_independent(const Vector& p, std::optional<std::size_t> k);

}  // namespace seqtrans

#endif  // SEQTRANS_ENUMERATION_HPP
