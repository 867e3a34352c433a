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

// Single-frame distribution estimators over binary vectors: the RBM (free
// energy, exact brute-force likelihood, CD-1) and NADE (conditionals, exact
// likelihood and gradient, ancestral sampling).
//
// Both models share one parameterization: a visible bias of length N, a hidden
// bias of length H and an H x N weight matrix. The RBM joint is
//
//   P(v, h) = exp(b_v.v + b_h.h + h'Wv) / Z
//
// which marginalizes to exp(-F(v)) / Z with
//
//   F(v) = -b_v.v - sum_i softplus((b_h + Wv)_i).
//
// NADE factors P(v) = prod_j P(v_j | v_<j) with
//
//   h_j = sigma(b_h + W[:, <j] v_<j),   P(v_j = 1 | v_<j) = sigma(W[:, j].h_j + b_v[j]).

#ifndef SEQTRANS_ESTIMATORS_HPP
#define SEQTRANS_ESTIMATORS_HPP

#include "seqtrans/common.hpp"

namespace seqtrans {

/// Borrowed view of (b_v, b_h, W). Lets per-time-step biases be paired with a
/// shared weight matrix without copying it.
struct EstimatorRef {
  const Vector& visible_bias;  // length N
  const Vector& hidden_bias;   // length H
  const Matrix& weights;       // H x N

  Eigen::Index num_visible() const { return visible_bias.size(); }
  Eigen::Index num_hidden() const { return hidden_bias.size(); }

  /// Throws DimensionError unless N, H >= 1 and the shapes agree.
  void validate() const;
};

struct EstimatorParams {
  Vector visible_bias;
  Vector hidden_bias;
  Matrix weights;

  EstimatorParams() = default;
  EstimatorParams(Vector bv, Vector bh, Matrix w)
      : visible_bias(std::move(bv)), hidden_bias(std::move(bh)), weights(std::move(w)) {}

  /// All-zero parameters with N visible and H hidden units.
  static EstimatorParams zeros(Eigen::Index num_visible, Eigen::Index num_hidden);

  /// Weights uniform in +-1/sqrt(max(N, H)), biases zero.
  static EstimatorParams random_init(Eigen::Index num_visible, Eigen::Index num_hidden, Rng& rng);

  Eigen::Index num_visible() const { return visible_bias.size(); }
  Eigen::Index num_hidden() const { return hidden_bias.size(); }

  EstimatorRef ref() const { return {visible_bias, hidden_bias, weights}; }
  operator EstimatorRef() const { return ref(); }  // NOLINT(google-explicit-constructor)
};

/// Gradient with respect to (b_v, b_h, W); same shapes as the parameters.
struct EstimatorGradient {
  Vector visible_bias;
  Vector hidden_bias;
  Matrix weights;

  static EstimatorGradient zeros_like(EstimatorRef params);
};

// ---------------------------------------------------------------------------
// RBM

/// Default cap on N for exact partition-function enumeration.
inline constexpr int kMaxExactVisible = 20;

double rbm_free_energy(EstimatorRef params, const BinaryVector& v);

/// log P(v) with Z summed over all 2^N visible configurations. Throws
/// IntractableError when N exceeds max_visible.
double rbm_exact_log_likelihood(EstimatorRef params, const BinaryVector& v,
                                int max_visible = kMaxExactVisible);

/// dF(v)/dTheta.
EstimatorGradient rbm_free_energy_gradient(EstimatorRef params, const BinaryVector& v);

/// One sampled Gibbs step v -> h -> v*. Hidden units are drawn first in index
/// order, then visible units, each with one uniform draw (1 iff u < p).
BinaryVector rbm_gibbs_step(EstimatorRef params, const BinaryVector& v, Rng& rng);

/// CD-1 estimate of d(-log P(v))/dTheta = dF(v)/dTheta - dF(v*)/dTheta.
EstimatorGradient rbm_cd1_gradient(EstimatorRef params, const BinaryVector& v, Rng& rng);

// ---------------------------------------------------------------------------
// NADE

/// P(v_j = 1 | v_<j) for every j.
Vector nade_conditionals(EstimatorRef params, const BinaryVector& v);

/// The pre-sigmoid values z_j with P(v_j = 1 | v_<j) = sigma(z_j).
Vector nade_logits(EstimatorRef params, const BinaryVector& v);

double nade_log_likelihood(EstimatorRef params, const BinaryVector& v);

/// Exact gradient of C = -log P(v). Runs one forward pass and one backward
/// sweep over the visible units, O(NH).
EstimatorGradient nade_gradient(EstimatorRef params, const BinaryVector& v);

/// Same as nade_gradient but also returns C through *cost.
EstimatorGradient nade_gradient(EstimatorRef params, const BinaryVector& v, double* cost);

/// Ancestral sample v_1, ..., v_N, one uniform draw per unit.
BinaryVector nade_sample(EstimatorRef params, Rng& rng);

}  // namespace seqtrans

#endif  // SEQTRANS_ESTIMATORS_HPP
