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

// Global-mode search over output sequences.
//
// beam_search keeps the w best partial sequences by cumulative log-likelihood.
// Each node is expanded into at most K children for the next frame: the exact
// K best configurations when the model's frame distribution factorizes
// (NADE weights W = 0), otherwise the K best unique configurations among S
// NADE samples.

#ifndef SEQTRANS_INFERENCE_HPP
#define SEQTRANS_INFERENCE_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "seqtrans/enumeration.hpp"
#include "seqtrans/estimators.hpp"
#include "seqtrans/transducer.hpp"

namespace seqtrans {

struct BeamConfig {
  std::size_t width = 1;      // w
  std::size_t branching = 1;  // K
  std::size_t samples = 0;    // S; 0 means 10 * K
  std::optional<std::size_t> restart_period;  // M: commit to the best path every M frames
  std::optional<std::size_t> prefix_lag;      // tau: merge paths with identical last tau frames
  std::uint64_t seed = 0;

  std::size_t effective_samples() const { return samples ? samples : 10 * branching; }
  void validate() const;
};

struct Decoding {
  std::vector<BinaryVector> frames;
  double logp = 0.0;
};

/// Fixed-capacity container keeping the `capacity` best items under `better`
/// (a strict weak order, true when the first argument ranks higher). Backed
/// by a heap whose top is the worst retained item.
template <typename T, typename Better>
class BoundedBest {
 public:
  BoundedBest(std::size_t capacity, Better better) : capacity_(capacity), better_(better) {}

  /// Returns false when the item was rejected.
  bool insert(T item) {
    if (capacity_ == 0) return false;
    if (heap_.size() < capacity_) {
      heap_.push_back(std::move(item));
      std::push_heap(heap_.begin(), heap_.end(), better_);
      return true;
    }
    if (!better_(item, heap_.front())) return false;
    std::pop_heap(heap_.begin(), heap_.end(), better_);
    heap_.back() = std::move(item);
    std::push_heap(heap_.begin(), heap_.end(), better_);
    return true;
  }

  std::size_t size() const { return heap_.size(); }

  /// Drains the container, best first.
  std::vector<T> take_sorted() {
    std::sort(heap_.begin(), heap_.end(), better_);
    return std::move(heap_);
  }

 private:
  std::size_t capacity_;
  Better better_;
  std::vector<T> heap_;
};

/// Draws S samples, keeps the K unique ones with the highest NADE
/// log-likelihood, best first (ties: lexicographically smallest first).
std::vector<RankedConfig> find_most_probable_stochastic(EstimatorRef estimator, std::size_t k,
                                                        std::size_t samples, Rng& rng);

/// The random stream used to expand one beam node: a function of the seed,
/// the frame index and the node's output prefix only.
Rng expansion_stream(std::uint64_t seed, std::size_t t, const std::vector<BinaryVector>& prefix);

Decoding beam_search(const TransducerParams& params, const std::vector<Vector>& x,
                     const BeamConfig& cfg);

/// Chronological decoding: each frame takes the single most probable
/// candidate: the exact argmax for independent outputs, otherwise the best of
/// S samples (S = cfg.samples, or 10 when unset). Width and branching in cfg
/// are ignored, so this matches beam_search with w = K = 1.
Decoding greedy_decode(const TransducerParams& params, const std::vector<Vector>& x,
                       const BeamConfig& cfg = {});

}  // namespace seqtrans

#endif  // SEQTRANS_INFERENCE_HPP
