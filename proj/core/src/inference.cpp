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

#include "seqtrans/inference.hpp"

#include <map>
#include <string>

namespace seqtrans {

void BeamConfig::validate() const {
  if (width == 0) throw DomainError("beam width must be >= 1");
  if (branching == 0) throw DomainError("branching factor must be >= 1");
  if (samples != 0 && samples < branching)
    throw DomainError("sample count S must be >= branching factor K");
  if (restart_period && *restart_period == 0) throw DomainError("restart_period must be >= 1");
  if (prefix_lag && *prefix_lag == 0) throw DomainError("prefix_lag must be >= 1");
}

namespace {

bool ranks_higher(const RankedConfig& a, const RankedConfig& b) {
  if (a.logp != b.logp) return a.logp > b.logp;
  return a.v < b.v;
}

void validate_inputs(const TransducerParams& params, const std::vector<Vector>& x) {
  params.validate();
  if (x.empty()) throw DomainError("input sequence is empty");
  const auto d = params.dims();
  for (std::size_t t = 0; t < x.size(); ++t) {
    require_dims(x[t].size() == d.input, "input frame " + std::to_string(t) + " has length " +
                                             std::to_string(x[t].size()) + ", expected " +
                                             std::to_string(d.input));
  }
}

}  // namespace

std::vector<RankedConfig> find_most_probable_stochastic(EstimatorRef estimator, std::size_t k,
                                                        std::size_t samples, Rng& rng) {
  estimator.validate();
  std::vector<BinaryVector> pool;
  pool.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) pool.push_back(nade_sample(estimator, rng));
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  std::vector<RankedConfig> scored;
  scored.reserve(pool.size());
  for (auto& v : pool) {
    const double ll = nade_log_likelihood(estimator, v);
    scored.push_back({ll, std::move(v)});
  }
  std::sort(scored.begin(), scored.end(), ranks_higher);
  if (scored.size() > k) scored.resize(k);
  return scored;
}

Rng expansion_stream(std::uint64_t seed, std::size_t t, const std::vector<BinaryVector>& prefix) {
  // FNV-1a over the frames, with a separator between frames.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  for (const auto& frame : prefix) {
    for (auto b : frame) mix(b);
    mix(0xFF);
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(h),
                    static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

namespace {

struct BeamNode {
  double logp = 0.0;
  RecurrentState state;
  std::vector<BinaryVector> prefix;
};

struct Candidate {
  double logp;
  std::size_t parent;
  BinaryVector v;
};

std::vector<RankedConfig> expand(const TransducerParams& params, const BeamNode& node,
                                 const Vector& x_t, const BeamConfig& cfg, std::size_t t) {
  const auto b = conditional_biases(params, node.state, x_t);
  if (params.independent_outputs()) {
    auto e = IndependentEnumerator::from_logits(b.visible);
    std::vector<RankedConfig> out;
    while (out.size() < cfg.branching) {
      auto item = e.next();
      if (!item) break;
      out.push_back(std::move(*item));
    }
    return out;
  }
  Rng rng = expansion_stream(cfg.seed, t, node.prefix);
  return find_most_probable_stochastic(EstimatorRef{b.visible, b.hidden, params.estimator.weights},
                                       cfg.branching, cfg.effective_samples(), rng);
}

}  // namespace

Decoding beam_search(const TransducerParams& params, const std::vector<Vector>& x,
                     const BeamConfig& cfg) {
  cfg.validate();
  validate_inputs(params, x);

  std::vector<BeamNode> beam;
  beam.push_back({0.0, RecurrentState::initial(params.dims().recurrent), {}});

  for (std::size_t t = 0; t < x.size(); ++t) {
    // Higher logp first; at equal logp the lexicographically smaller full
    // prefix (parent prefix, then new frame) wins.
    auto better = [&beam](const Candidate& a, const Candidate& b) {
      if (a.logp != b.logp) return a.logp > b.logp;
      const auto& pa = beam[a.parent].prefix;
      const auto& pb = beam[b.parent].prefix;
      if (a.parent != b.parent && pa != pb) return pa < pb;
      return a.v < b.v;
    };

    std::vector<Candidate> pool;
    for (std::size_t i = 0; i < beam.size(); ++i) {
      for (auto& child : expand(params, beam[i], x[t], cfg, t))
        pool.push_back({beam[i].logp + child.logp, i, std::move(child.v)});
    }

    if (cfg.prefix_lag) {
      // Keep only the best path for each distinct suffix of length tau.
      const std::size_t lag = *cfg.prefix_lag;
      std::map<std::vector<BinaryVector>, Candidate> best_by_suffix;
      for (auto& c : pool) {
        const auto& prefix = beam[c.parent].prefix;
        const std::size_t keep = std::min(lag - 1, prefix.size());
        std::vector<BinaryVector> key(prefix.end() - static_cast<std::ptrdiff_t>(keep),
                                      prefix.end());
        key.push_back(c.v);
        auto it = best_by_suffix.find(key);
        if (it == best_by_suffix.end()) {
          best_by_suffix.emplace(std::move(key), std::move(c));
        } else if (better(c, it->second)) {
          it->second = std::move(c);
        }
      }
      pool.clear();
      for (auto& [key, c] : best_by_suffix) pool.push_back(std::move(c));
    }

    BoundedBest<Candidate, decltype(better)> queue(cfg.width, better);
    for (auto& c : pool) queue.insert(std::move(c));
    auto survivors = queue.take_sorted();

    if (cfg.restart_period && (t + 1) % *cfg.restart_period == 0 && survivors.size() > 1)
      survivors.resize(1);

    std::vector<BeamNode> next;
    next.reserve(survivors.size());
    for (auto& c : survivors) {
      const auto& parent = beam[c.parent];
      BeamNode node{c.logp, rnn_step(params, parent.state, x[t], c.v), parent.prefix};
      node.prefix.push_back(std::move(c.v));
      next.push_back(std::move(node));
    }
    beam = std::move(next);
  }

  return {std::move(beam.front().prefix), beam.front().logp};
}

Decoding greedy_decode(const TransducerParams& params, const std::vector<Vector>& x,
                       const BeamConfig& cfg) {
  validate_inputs(params, x);
  const std::size_t samples = cfg.samples ? cfg.samples : 10;
  auto state = RecurrentState::initial(params.dims().recurrent);
  Decoding out;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const auto b = conditional_biases(params, state, x[t]);
    BinaryVector v(static_cast<std::size_t>(b.visible.size()));
    double step_logp = 0.0;
    if (params.independent_outputs()) {
      for (Eigen::Index j = 0; j < b.visible.size(); ++j) {
        const double on = log_sigmoid(b.visible[j]);
        const double off = log_sigmoid(-b.visible[j]);
        v[static_cast<std::size_t>(j)] = on >= off ? 1 : 0;
        step_logp += std::max(on, off);
      }
    } else {
      Rng rng = expansion_stream(cfg.seed, t, out.frames);
      auto best = find_most_probable_stochastic(
          EstimatorRef{b.visible, b.hidden, params.estimator.weights}, 1, samples, rng);
      v = std::move(best.front().v);
      step_logp = best.front().logp;
    }
    out.logp += step_logp;
    state = rnn_step(params, state, x[t], v);
    out.frames.push_back(std::move(v));
  }
  return out;
}

}  // namespace seqtrans
