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

#include "seqtrans/enumeration.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace seqtrans {

IndependentEnumerator::IndependentEnumerator(const Vector& log_on, const Vector& log_off) {
  const auto n = log_on.size();
  if (n == 0) throw DomainError("enumerate_independent: empty probability vector");
  mode_.resize(static_cast<std::size_t>(n));
  std::vector<double> cost(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    // p >= 1/2 <=> log p >= log(1 - p); ties choose 1.
    mode_[k] = log_on[i] >= log_off[i] ? 1 : 0;
    mode_logp_ += std::max(log_on[i], log_off[i]);
    cost[k] = std::abs(log_on[i] - log_off[i]);
  }
  rank_.resize(cost.size());
  std::iota(rank_.begin(), rank_.end(), 0);
  std::stable_sort(rank_.begin(), rank_.end(),
                   [&](int a, int b) { return cost[static_cast<std::size_t>(a)] <
                                              cost[static_cast<std::size_t>(b)]; });
  sorted_cost_.resize(cost.size());
  for (std::size_t s = 0; s < cost.size(); ++s)
    sorted_cost_[s] = cost[static_cast<std::size_t>(rank_[s])];
}

IndependentEnumerator IndependentEnumerator::from_logits(const Vector& z) {
  const Vector on = z.unaryExpr([](double a) { return log_sigmoid(a); });
  const Vector off = z.unaryExpr([](double a) { return log_sigmoid(-a); });
  return IndependentEnumerator(on, off);
}

IndependentEnumerator IndependentEnumerator::from_probabilities(const Vector& p) {
  Vector on(p.size()), off(p.size());
  std::vector<std::string> warnings;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    double q = p[i];
    if (!std::isfinite(q) || q < 0.0 || q > 1.0) {
      std::ostringstream msg;
      msg << "enumerate_independent: p[" << i << "] = " << q << " is not a probability";
      throw DomainError(msg.str());
    }
    if (q < kClampEpsilon || q > 1.0 - kClampEpsilon) {
      const double clamped = std::clamp(q, kClampEpsilon, 1.0 - kClampEpsilon);
      std::ostringstream msg;
      msg << "p[" << i << "] = " << q << " clamped to " << clamped;
      warnings.push_back(msg.str());
      q = clamped;
    }
    on[i] = std::log(q);
    off[i] = std::log1p(-q);
  }
  IndependentEnumerator e(on, off);
  e.warnings_ = std::move(warnings);
  return e;
}

void IndependentEnumerator::push(double cost, int last, int parent) {
  arena_.push_back({last, parent});
  queue_.push({cost, insertions_, static_cast<int>(arena_.size()) - 1});
  ++insertions_;
  peak_queue_ = std::max(peak_queue_, queue_.size());
}

std::optional<RankedConfig> IndependentEnumerator::next() {
  if (produced_ == 0) {
    ++produced_;
    if (!sorted_cost_.empty()) push(sorted_cost_[0], 0, -1);
    return RankedConfig{mode_logp_, mode_};
  }
  if (queue_.empty()) return std::nullopt;

  const Entry top = queue_.top();
  queue_.pop();
  ++produced_;

  RankedConfig out{mode_logp_ - top.cost, mode_};
  for (int node = top.node; node >= 0; node = arena_[static_cast<std::size_t>(node)].parent) {
    const int pos = arena_[static_cast<std::size_t>(node)].last;
    out.v[static_cast<std::size_t>(rank_[static_cast<std::size_t>(pos)])] ^= 1;
  }

  const Node n = arena_[static_cast<std::size_t>(top.node)];
  const auto next_pos = static_cast<std::size_t>(n.last) + 1;
  if (next_pos < sorted_cost_.size()) {
    const double add = sorted_cost_[next_pos];
    const int last = static_cast<int>(next_pos);
    push(top.cost + add, last, top.node);
    push(top.cost + add - sorted_cost_[static_cast<std::size_t>(n.last)], last, n.parent);
  }
  return out;
}

std::vector<RankedConfig> enumerate_independent(const Vector& p, std::optional<std::size_t> k) {
  auto e = IndependentEnumerator::from_probabilities(p);
  std::vector<RankedConfig> out;
  while (!k || out.size() < *k) {
    auto item = e.next();
    if (!item) break;
    out.push_back(std::move(*item));
  }
  return out;
}

}  // namespace seqtrans
