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

// The input/output RNN-NADE sequence model.
//
// At each step t a NADE over the output frame v(t) gets time-dependent biases
//
//   b_h(t) = b_h + W_sh s(t-1) + W_xh x(t)
//   b_v(t) = b_v + W_sv s(t-1) + W_xv x(t)
//
// from a single-layer recurrent state
//
//   s(t) = sigma(W_vs v(t) + W_ss s(t-1) + W_xs x(t) + b_s),   s(0) = 0.
//
// With the NADE weight matrix W = 0 each step factorizes into independent
// Bernoulli outputs p(t) = sigma(b_v(t)) and the model is a plain RNN trained
// with cross-entropy. With W_vs = 0 there is no temporal smoothing.

#ifndef SEQTRANS_TRANSDUCER_HPP
#define SEQTRANS_TRANSDUCER_HPP

#include <optional>
#include <string_view>
#include <vector>

#include "seqtrans/common.hpp"
#include "seqtrans/estimators.hpp"

namespace seqtrans {

struct TransducerDims {
  Eigen::Index output = 0;     // N, output frame width
  Eigen::Index hidden = 0;     // H, NADE hidden units
  Eigen::Index recurrent = 0;  // R, recurrent state width
  Eigen::Index input = 0;      // D, input feature width

  bool operator==(const TransducerDims&) const = default;
};

/// All parameters of the sequence model. Also used as the gradient type: a
/// gradient has exactly the same blocks and shapes.
struct TransducerParams {
  EstimatorParams estimator;  // base b_v, b_h and the NADE weights W
  Matrix state_to_hidden;     // H x R
  Matrix input_to_hidden;     // H x D
  Matrix state_to_visible;    // N x R
  Matrix input_to_visible;    // N x D
  Matrix visible_to_state;    // R x N, temporal smoothing
  Matrix state_to_state;      // R x R
  Matrix input_to_state;      // R x D
  Vector state_bias;          // R

  static TransducerParams zeros(const TransducerDims& dims);

  /// Each weight block uniform in +-1/sqrt(max(rows, cols)), biases zero.
  /// `independent_outputs` zeroes the NADE weights; `smoothing = false`
  /// zeroes visible_to_state.
  static TransducerParams random_init(const TransducerDims& dims, Rng& rng,
                                      bool independent_outputs = false, bool smoothing = true);

  TransducerDims dims() const;

  /// Throws DimensionError naming the first inconsistent block.
  void validate() const;

  bool independent_outputs() const { return estimator.weights.isZero(0.0); }
  bool has_smoothing() const { return !visible_to_state.isZero(0.0); }

  /// Visits every block as (name, Eigen::Map of its storage) in a fixed order.
  /// Vectors are presented as single-column matrices.
  template <typename F>
  void for_each_block(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each_block(F&& f) const {
    visit(*this, f);
  }

  std::size_t num_parameters() const;

  /// this += scale * other.
  void add_scaled(const TransducerParams& other, double scale);
  double squared_norm() const;
  bool all_finite() const;

 private:
  template <typename Self, typename F>
  static void visit(Self& self, F& f) {
    f(std::string_view("visible_bias"), self.estimator.visible_bias);
    f(std::string_view("hidden_bias"), self.estimator.hidden_bias);
    f(std::string_view("weights"), self.estimator.weights);
    f(std::string_view("state_to_hidden"), self.state_to_hidden);
    f(std::string_view("input_to_hidden"), self.input_to_hidden);
    f(std::string_view("state_to_visible"), self.state_to_visible);
    f(std::string_view("input_to_visible"), self.input_to_visible);
    f(std::string_view("visible_to_state"), self.visible_to_state);
    f(std::string_view("state_to_state"), self.state_to_state);
    f(std::string_view("input_to_state"), self.input_to_state);
    f(std::string_view("state_bias"), self.state_bias);
  }
};

using TransducerGradient = TransducerParams;

/// Aligned input features and (optionally) binary targets.
struct SequencePair {
  std::vector<Vector> x;
  std::vector<BinaryVector> v;  // empty for inference-only use

  std::size_t length() const { return x.size(); }
  bool has_targets() const { return !v.empty(); }
};

struct RecurrentState {
  Vector h;       // R entries in (0, 1) after any update
  std::size_t t = 0;

  static RecurrentState initial(Eigen::Index recurrent) { return {Vector::Zero(recurrent), 0}; }
};

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 10;
  double alpha = 0.0;          // penalty on input_to_visible, input_to_hidden
  double beta = 0.0;           // penalty on state_to_visible, state_to_hidden
  double teacher_noise = 0.0;  // flip probability of past outputs fed to the recurrence
  std::uint64_t seed = 0;
  std::optional<double> gradient_clip;

  /// Throws DomainError on out-of-range fields.
  void validate() const;
};

struct ConditionalBiases {
  Vector visible;  // b_v(t), length N
  Vector hidden;   // b_h(t), length H
};

ConditionalBiases conditional_biases(const TransducerParams& params, const RecurrentState& state,
                                     const Vector& x_t);

RecurrentState rnn_step(const TransducerParams& params, const RecurrentState& state,
                        const Vector& x_t, const BinaryVector& v_t);

/// Checks that the pair matches the model dimensions. Targets are required
/// when `need_targets` is set.
void validate_pair(const TransducerParams& params, const SequencePair& pair, bool need_targets);

/// Teacher-forced sum over t of log P(v(t) | history).
double sequence_log_likelihood(const TransducerParams& params, const SequencePair& pair);

/// alpha (|W_xv|^2 + |W_xh|^2) + beta (|W_sv|^2 + |W_sh|^2), squared Frobenius norms.
double penalty(const TransducerParams& params, double alpha, double beta);

/// -sequence_log_likelihood / T + penalty. This is what sequence_gradient
/// differentiates and what train() minimizes.
double sequence_objective(const TransducerParams& params, const SequencePair& pair,
                          const TrainConfig& cfg);

struct GradientResult {
  TransducerGradient gradient;
  double objective = 0.0;  // evaluated on the (possibly noised) recurrence inputs
};

/// Gradient of sequence_objective by backpropagation through time. When
/// cfg.teacher_noise > 0, past outputs fed to the recurrence are flipped
/// independently using `rng` (or a stream seeded from cfg.seed when null);
/// the NADE targets are never noised.
GradientResult sequence_gradient(const TransducerParams& params, const SequencePair& pair,
                                 const TrainConfig& cfg, Rng* rng = nullptr);

/// Mean over t of the summed binary cross-entropy of p(t) = sigma(b_v(t)).
/// Only defined for independent-output models (estimator weights exactly 0).
double cross_entropy_loss(const TransducerParams& params, const SequencePair& pair);

struct TrainResult {
  TransducerParams params;
  /// Mean objective over the corpus, entry 0 before training and entry e after epoch e.
  std::vector<double> history;
};

/// Per-sequence SGD with optional gradient-norm clipping. Sequence order is
/// reshuffled each epoch from cfg.seed.
TrainResult train(TransducerParams params, const std::vector<SequencePair>& corpus,
                  const TrainConfig& cfg);

double corpus_objective(const TransducerParams& params, const std::vector<SequencePair>& corpus,
                        const TrainConfig& cfg);

/// Worst |a - b| / max(|a|, |b|, 1e-8) between sequence_gradient and central
/// differences (step 1e-5) of sequence_objective, over every parameter.
double grad_check(const TransducerParams& params, const SequencePair& pair,
                  const TrainConfig& cfg = {}, double step = 1e-5);

}  // namespace seqtrans

#endif  // SEQTRANS_TRANSDUCER_HPP
