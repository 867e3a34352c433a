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

#include "seqtrans/transducer.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>

namespace seqtrans {

namespace {

std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void check_block(std::string_view name, const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(name) + " is " + shape(m.rows(), m.cols()) + ", expected " +
                         shape(rows, cols));
  }
}

void fill_uniform(Matrix& m, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(m.rows(), m.cols())));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = dist(rng);
}

}  // namespace

TransducerParams TransducerParams::zeros(const TransducerDims& d) {
  require_dims(d.output >= 1 && d.hidden >= 1 && d.recurrent >= 1 && d.input >= 1,
               "transducer dimensions must all be >= 1");
  TransducerParams p;
  p.estimator = EstimatorParams::zeros(d.output, d.hidden);
  p.state_to_hidden = Matrix::Zero(d.hidden, d.recurrent);
  p.input_to_hidden = Matrix::Zero(d.hidden, d.input);
  p.state_to_visible = Matrix::Zero(d.output, d.recurrent);
  p.input_to_visible = Matrix::Zero(d.output, d.input);
  p.visible_to_state = Matrix::Zero(d.recurrent, d.output);
  p.state_to_state = Matrix::Zero(d.recurrent, d.recurrent);
  p.input_to_state = Matrix::Zero(d.recurrent, d.input);
  p.state_bias = Vector::Zero(d.recurrent);
  return p;
}

TransducerParams TransducerParams::random_init(const TransducerDims& dims, Rng& rng,
                                               bool independent_outputs, bool smoothing) {
  auto p = zeros(dims);
  if (!independent_outputs) fill_uniform(p.estimator.weights, rng);
  fill_uniform(p.state_to_hidden, rng);
  fill_uniform(p.input_to_hidden, rng);
  fill_uniform(p.state_to_visible, rng);
  fill_uniform(p.input_to_visible, rng);
  if (smoothing) fill_uniform(p.visible_to_state, rng);
  fill_uniform(p.state_to_state, rng);
  fill_uniform(p.input_to_state, rng);
  return p;
}

TransducerDims TransducerParams::dims() const {
  return {estimator.visible_bias.size(), estimator.hidden_bias.size(), state_bias.size(),
          input_to_state.cols()};
}

void TransducerParams::validate() const {
  const auto d = dims();
  require_dims(d.output >= 1 && d.hidden >= 1 && d.recurrent >= 1 && d.input >= 1,
               "transducer dimensions must all be >= 1");
  check_block("weights", estimator.weights, d.hidden, d.output);
  check_block("state_to_hidden", state_to_hidden, d.hidden, d.recurrent);
  check_block("input_to_hidden", input_to_hidden, d.hidden, d.input);
  check_block("state_to_visible", state_to_visible, d.output, d.recurrent);
  check_block("input_to_visible", input_to_visible, d.output, d.input);
  check_block("visible_to_state", visible_to_state, d.recurrent, d.output);
  check_block("state_to_state", state_to_state, d.recurrent, d.recurrent);
  check_block("input_to_state", input_to_state, d.recurrent, d.input);
}

std::size_t TransducerParams::num_parameters() const {
  std::size_t n = 0;
  for_each_block([&](std::string_view, const auto& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

void TransducerParams::add_scaled(const TransducerParams& other, double scale) {
  std::vector<const double*> src;
  other.for_each_block([&](std::string_view, const auto& m) { src.push_back(m.data()); });
  std::size_t k = 0;
  for_each_block([&](std::string_view, auto& m) {
    const double* s = src[k++];
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] += scale * s[i];
  });
}

double TransducerParams::squared_norm() const {
  double s = 0.0;
  for_each_block([&](std::string_view, const auto& m) { s += m.squaredNorm(); });
  return s;
}

bool TransducerParams::all_finite() const {
  bool ok = true;
  for_each_block([&](std::string_view, const auto& m) { ok = ok && m.allFinite(); });
  return ok;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw DomainError("learning_rate must be a finite nonnegative number");
  if (epochs < 0) throw DomainError("epochs must be >= 0");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw DomainError("alpha and beta must be >= 0");
  if (!(teacher_noise >= 0.0 && teacher_noise <= 0.5))
    throw DomainError("teacher_noise must lie in [0, 0.5]");
  if (gradient_clip && !(*gradient_clip > 0.0)) throw DomainError("gradient_clip must be > 0");
}

ConditionalBiases conditional_biases(const TransducerParams& params, const RecurrentState& state,
                                     const Vector& x_t) {
  const auto d = params.dims();
  require_dims(state.h.size() == d.recurrent, "recurrent state has wrong length");
  require_dims(x_t.size() == d.input, "input frame has length " + std::to_string(x_t.size()) +
                                          ", expected " + std::to_string(d.input));
  return {params.estimator.visible_bias + params.state_to_visible * state.h +
              params.input_to_visible * x_t,
          params.estimator.hidden_bias + params.state_to_hidden * state.h +
              params.input_to_hidden * x_t};
}

RecurrentState rnn_step(const TransducerParams& params, const RecurrentState& state,
                        const Vector& x_t, const BinaryVector& v_t) {
  const auto d = params.dims();
  require_dims(state.h.size() == d.recurrent, "recurrent state has wrong length");
  require_dims(x_t.size() == d.input, "input frame has wrong length");
  require_dims(static_cast<Eigen::Index>(v_t.size()) == d.output, "output frame has wrong length");
  require_binary(v_t, "output frame");
  const Vector pre = params.visible_to_state * to_vector(v_t) + params.state_to_state * state.h +
                     params.input_to_state * x_t + params.state_bias;
  return {sigmoid(pre), state.t + 1};
}

void validate_pair(const TransducerParams& params, const SequencePair& pair, bool need_targets) {
  const auto d = params.dims();
  if (pair.x.empty()) throw DomainError("sequence is empty");
  if (need_targets && !pair.has_targets()) throw DomainError("sequence has no targets");
  if (pair.has_targets()) {
    require_dims(pair.v.size() == pair.x.size(),
                 "inputs and targets differ in length (" + std::to_string(pair.x.size()) + " vs " +
                     std::to_string(pair.v.size()) + ")");
  }
  for (std::size_t t = 0; t < pair.x.size(); ++t) {
    require_dims(pair.x[t].size() == d.input, "input frame " + std::to_string(t) + " has length " +
                                                  std::to_string(pair.x[t].size()) +
                                                  ", expected " + std::to_string(d.input));
    if (pair.has_targets()) {
      require_dims(static_cast<Eigen::Index>(pair.v[t].size()) == d.output,
                   "target frame " + std::to_string(t) + " has wrong length");
      require_binary(pair.v[t], "target frame");
    }
  }
}

double sequence_log_likelihood(const TransducerParams& params, const SequencePair& pair) {
  params.validate();
  validate_pair(params, pair, true);
  auto state = RecurrentState::initial(params.dims().recurrent);
  double ll = 0.0;
  for (std::size_t t = 0; t < pair.length(); ++t) {
    const auto b = conditional_biases(params, state, pair.x[t]);
    ll += nade_log_likelihood(EstimatorRef{b.visible, b.hidden, params.estimator.weights},
                              pair.v[t]);
    state = rnn_step(params, state, pair.x[t], pair.v[t]);
  }
  return ll;
}

double penalty(const TransducerParams& params, double alpha, double beta) {
  return alpha * (params.input_to_visible.squaredNorm() + params.input_to_hidden.squaredNorm()) +
         beta * (params.state_to_visible.squaredNorm() + params.state_to_hidden.squaredNorm());
}

double sequence_objective(const TransducerParams& params, const SequencePair& pair,
                          const TrainConfig& cfg) {
  const double t = static_cast<double>(pair.length());
  return -sequence_log_likelihood(params, pair) / t + penalty(params, cfg.alpha, cfg.beta);
}

GradientResult sequence_gradient(const TransducerParams& params, const SequencePair& pair,
                                 const TrainConfig& cfg, Rng* rng) {
  params.validate();
  validate_pair(params, pair, true);
  const auto d = params.dims();
  const std::size_t steps = pair.length();
  const double scale = 1.0 / static_cast<double>(steps);

  Rng local_rng(cfg.seed);
  if (!rng) rng = &local_rng;

  // 1. Forward: states[t] is the state entering step t (states[0] = 0).
  std::vector<Vector> states(steps + 1);
  std::vector<Vector> fed(steps);  // recurrence inputs, possibly noised
  states[0] = Vector::Zero(d.recurrent);
  double nll = 0.0;
  std::vector<EstimatorGradient> step_grads;
  step_grads.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const RecurrentState in{states[t], t};
    const auto b = conditional_biases(params, in, pair.x[t]);
    // 2. Per-step NADE gradient with respect to W, b_v(t), b_h(t).
    double cost = 0.0;
    step_grads.push_back(
        nade_gradient(EstimatorRef{b.visible, b.hidden, params.estimator.weights}, pair.v[t], &cost));
    nll += cost;

    BinaryVector v_in = pair.v[t];
    if (cfg.teacher_noise > 0.0) {
      for (auto& bit : v_in) bit ^= bernoulli(cfg.teacher_noise, *rng);
    }
    fed[t] = to_vector(v_in);
    states[t + 1] = sigmoid(Vector(params.visible_to_state * fed[t] +
                                   params.state_to_state * states[t] +
                                   params.input_to_state * pair.x[t] + params.state_bias));
  }

  // 3. Backward through time.
  GradientResult out{TransducerParams::zeros(d), nll * scale + penalty(params, cfg.alpha, cfg.beta)};
  auto& g = out.gradient;
  Vector d_state = Vector::Zero(d.recurrent);  // dJ/d states[t+1], from later steps
  for (std::size_t t = steps; t-- > 0;) {
    const auto& prev = states[t];
    const auto& x = pair.x[t];

    // Recurrence: states[t+1] = sigma(pre).
    const Vector& s = states[t + 1];
    const Vector d_pre = d_state.cwiseProduct(s.cwiseProduct(Vector::Ones(s.size()) - s));
    g.visible_to_state.noalias() += d_pre * fed[t].transpose();
    g.state_to_state.noalias() += d_pre * prev.transpose();
    g.input_to_state.noalias() += d_pre * x.transpose();
    g.state_bias += d_pre;
    Vector d_prev = params.state_to_state.transpose() * d_pre;

    // Conditional biases.
    const auto& sg = step_grads[t];
    const Vector gv = scale * sg.visible_bias;
    const Vector gh = scale * sg.hidden_bias;
    g.estimator.weights += scale * sg.weights;
    g.estimator.visible_bias += gv;
    g.estimator.hidden_bias += gh;
    g.state_to_visible.noalias() += gv * prev.transpose();
    g.input_to_visible.noalias() += gv * x.transpose();
    g.state_to_hidden.noalias() += gh * prev.transpose();
    g.input_to_hidden.noalias() += gh * x.transpose();
    d_prev.noalias() += params.state_to_visible.transpose() * gv;
    d_prev.noalias() += params.state_to_hidden.transpose() * gh;

    d_state = std::move(d_prev);
  }

  g.input_to_visible += 2.0 * cfg.alpha * params.input_to_visible;
  g.input_to_hidden += 2.0 * cfg.alpha * params.input_to_hidden;
  g.state_to_visible += 2.0 * cfg.beta * params.state_to_visible;
  g.state_to_hidden += 2.0 * cfg.beta * params.state_to_hidden;
  return out;
}

double cross_entropy_loss(const TransducerParams& params, const SequencePair& pair) {
  params.validate();
  if (!params.independent_outputs())
    throw DomainError("cross_entropy_loss requires estimator weights W = 0");
  validate_pair(params, pair, true);
  auto state = RecurrentState::initial(params.dims().recurrent);
  double total = 0.0;
  for (std::size_t t = 0; t < pair.length(); ++t) {
    const auto b = conditional_biases(params, state, pair.x[t]);
    for (Eigen::Index j = 0; j < b.visible.size(); ++j) {
      const double z = b.visible[j];
      total -= pair.v[t][static_cast<std::size_t>(j)] ? log_sigmoid(z) : log_sigmoid(-z);
    }
    state = rnn_step(params, state, pair.x[t], pair.v[t]);
  }
  return total / static_cast<double>(pair.length());
}

double corpus_objective(const TransducerParams& params, const std::vector<SequencePair>& corpus,
                        const TrainConfig& cfg) {
  if (corpus.empty()) throw DomainError("corpus is empty");
  double s = 0.0;
  for (const auto& pair : corpus) s += sequence_objective(params, pair, cfg);
  return s / static_cast<double>(corpus.size());
}

TrainResult train(TransducerParams params, const std::vector<SequencePair>& corpus,
                  const TrainConfig& cfg) {
  cfg.validate();
  params.validate();
  if (corpus.empty()) throw DomainError("train: corpus is empty");
  for (const auto& pair : corpus) validate_pair(params, pair, true);

  Rng rng(cfg.seed);
  TrainResult result{std::move(params), {}};
  auto& p = result.params;
  result.history.push_back(corpus_objective(p, corpus, cfg));

  std::vector<std::size_t> order(corpus.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (const auto idx : order) {
      auto step = sequence_gradient(p, corpus[idx], cfg, &rng);
      if (!std::isfinite(step.objective) || !step.gradient.all_finite()) {
        std::ostringstream msg;
        msg << "training diverged in epoch " << epoch << " on sequence " << idx
            << " (objective " << step.objective << "); lower learning_rate or set gradient_clip";
        throw DivergenceError(msg.str());
      }
      double factor = cfg.learning_rate;
      if (cfg.gradient_clip) {
        const double norm = std::sqrt(step.gradient.squared_norm());
        if (norm > *cfg.gradient_clip) factor *= *cfg.gradient_clip / norm;
      }
      if (factor != 0.0) p.add_scaled(step.gradient, -factor);
    }
    const double obj = corpus_objective(p, corpus, cfg);
    if (!std::isfinite(obj)) {
      throw DivergenceError("training diverged: objective is " + std::to_string(obj) +
                            " after epoch " + std::to_string(epoch));
    }
    result.history.push_back(obj);
  }
  return result;
}

namespace {

template <typename S>
using MatrixOf = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

// Indices into the block list, in for_each_block order.
enum Block : std::size_t {
  kVisibleBias, kHiddenBias, kWeights, kStateToHidden, kInputToHidden, kStateToVisible,
  kInputToVisible, kVisibleToState, kStateToState, kInputToState, kStateBias
};

template <typename S>
std::vector<MatrixOf<S>> blocks_as(const TransducerParams& params) {
  std::vector<MatrixOf<S>> out;
  params.for_each_block([&](std::string_view, const auto& m) {
    out.push_back(Matrix(m).template cast<S>());
  });
  return out;
}

// sequence_objective evaluated from scratch in scalar type S.
template <typename S>
S objective_in(const std::vector<MatrixOf<S>>& b, const SequencePair& pair, double alpha,
               double beta) {
  using std::exp;
  using std::log1p;
  const auto sig = [](S a) { return a >= 0 ? S(1) / (S(1) + exp(-a)) : exp(a) / (S(1) + exp(a)); };
  const auto log_sig = [](S a) { return a > 0 ? -log1p(exp(-a)) : a - log1p(exp(a)); };

  const auto& w = b[kWeights];
  MatrixOf<S> state = MatrixOf<S>::Zero(b[kStateBias].rows(), 1);
  S ll = 0;
  for (std::size_t t = 0; t < pair.length(); ++t) {
    const MatrixOf<S> x = Matrix(pair.x[t]).cast<S>();
    const MatrixOf<S> v = Matrix(to_vector(pair.v[t])).cast<S>();
    const MatrixOf<S> bv = b[kVisibleBias] + b[kStateToVisible] * state + b[kInputToVisible] * x;
    MatrixOf<S> act = b[kHiddenBias] + b[kStateToHidden] * state + b[kInputToHidden] * x;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      const MatrixOf<S> h = act.unaryExpr(sig);
      const S z = (w.col(j).transpose() * h)(0, 0) + bv(j, 0);
      ll += pair.v[t][static_cast<std::size_t>(j)] ? log_sig(z) : log_sig(-z);
      if (pair.v[t][static_cast<std::size_t>(j)]) act += w.col(j);
    }
    state = (b[kVisibleToState] * v + b[kStateToState] * state + b[kInputToState] * x +
             b[kStateBias]).unaryExpr(sig);
  }
  const S pen = S(alpha) * (b[kInputToVisible].squaredNorm() + b[kInputToHidden].squaredNorm()) +
                S(beta) * (b[kStateToVisible].squaredNorm() + b[kStateToHidden].squaredNorm());
  return -ll / S(pair.length()) + pen;
}

}  // namespace

double grad_check(const TransducerParams& params, const SequencePair& pair, const TrainConfig& cfg,
                  double step) {
  TrainConfig clean = cfg;
  clean.teacher_noise = 0.0;
  const auto analytic = sequence_gradient(params, pair, clean).gradient;

  std::vector<double> flat;
  analytic.for_each_block([&](std::string_view, const auto& m) {
    flat.insert(flat.end(), m.data(), m.data() + m.size());
  });

  // Differences are taken in extended precision: in double, rounding noise
  // of order eps * |objective| / step swamps gradients near 1e-8, which
  // saturated units produce.
  using Ext = long double;
  auto probe = blocks_as<Ext>(params);
  const Ext h = step;
  double worst = 0.0;
  std::size_t k = 0;
  for (auto& m : probe) {
    for (Eigen::Index i = 0; i < m.size(); ++i, ++k) {
      const Ext saved = m.data()[i];
      m.data()[i] = saved + h;
      const Ext up = objective_in(probe, pair, clean.alpha, clean.beta);
      m.data()[i] = saved - h;
      const Ext down = objective_in(probe, pair, clean.alpha, clean.beta);
      m.data()[i] = saved;
      const auto numeric = static_cast<double>((up - down) / (2 * h));
      const double a = flat[k];
      const double err =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace seqtrans
