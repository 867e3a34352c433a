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

#include "seqtrans/estimators.hpp"

#include <string>

namespace seqtrans {

void EstimatorRef::validate() const {
  require_dims(visible_bias.size() >= 1, "estimator: visible size must be >= 1");
  require_dims(hidden_bias.size() >= 1, "estimator: hidden size must be >= 1");
  require_dims(weights.rows() == hidden_bias.size() && weights.cols() == visible_bias.size(),
               "estimator: weights are " + std::to_string(weights.rows()) + "x" +
                   std::to_string(weights.cols()) + ", expected " +
                   std::to_string(hidden_bias.size()) + "x" + std::to_string(visible_bias.size()));
}

EstimatorParams EstimatorParams::zeros(Eigen::Index num_visible, Eigen::Index num_hidden) {
  return {Vector::Zero(num_visible), Vector::Zero(num_hidden), Matrix::Zero(num_hidden, num_visible)};
}

EstimatorParams EstimatorParams::random_init(Eigen::Index num_visible, Eigen::Index num_hidden,
                                             Rng& rng) {
  auto p = zeros(num_visible, num_hidden);
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(num_visible, num_hidden)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < p.weights.rows(); ++i)
    for (Eigen::Index j = 0; j < p.weights.cols(); ++j) p.weights(i, j) = dist(rng);
  return p;
}

EstimatorGradient EstimatorGradient::zeros_like(EstimatorRef params) {
  return {Vector::Zero(params.num_visible()), Vector::Zero(params.num_hidden()),
          Matrix::Zero(params.num_hidden(), params.num_visible())};
}

namespace {

void check_visible(EstimatorRef params, const BinaryVector& v) {
  params.validate();
  require_dims(static_cast<Eigen::Index>(v.size()) == params.num_visible(),
               "visible vector has length " + std::to_string(v.size()) + ", expected " +
                   std::to_string(params.num_visible()));
  require_binary(v, "visible vector");
}

}  // namespace

// ---------------------------------------------------------------------------
// RBM

double rbm_free_energy(EstimatorRef params, const BinaryVector& v) {
  check_visible(params, v);
  const Vector vv = to_vector(v);
  const Vector act = params.hidden_bias + params.weights * vv;
  double f = -params.visible_bias.dot(vv);
  for (Eigen::Index i = 0; i < act.size(); ++i) f -= softplus(act[i]);
  return f;
}

double rbm_exact_log_likelihood(EstimatorRef params, const BinaryVector& v, int max_visible) {
  check_visible(params, v);
  const auto n = params.num_visible();
  if (n > max_visible) {
    throw IntractableError("rbm_exact_log_likelihood: N = " + std::to_string(n) +
                           " exceeds the exact-enumeration bound " + std::to_string(max_visible) +
                           "; the partition function is intractable");
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> neg_energies;
  neg_energies.reserve(count);
  BinaryVector u(static_cast<std::size_t>(n));
  for (std::uint64_t code = 0; code < count; ++code) {
    for (Eigen::Index j = 0; j < n; ++j) u[static_cast<std::size_t>(j)] = (code >> j) & 1U;
    neg_energies.push_back(-rbm_free_energy(params, u));
  }
  return -rbm_free_energy(params, v) - log_sum_exp(neg_energies);
}

EstimatorGradient rbm_free_energy_gradient(EstimatorRef params, const BinaryVector& v) {
  check_visible(params, v);
  const Vector vv = to_vector(v);
  const Vector hp = sigmoid(Vector(params.hidden_bias + params.weights * vv));
  return {-vv, -hp, -hp * vv.transpose()};
}

BinaryVector rbm_gibbs_step(EstimatorRef params, const BinaryVector& v, Rng& rng) {
  check_visible(params, v);
  const Vector hp = sigmoid(Vector(params.hidden_bias + params.weights * to_vector(v)));
  Vector h(hp.size());
  for (Eigen::Index i = 0; i < hp.size(); ++i) h[i] = bernoulli(hp[i], rng);
  const Vector vp = sigmoid(Vector(params.visible_bias + params.weights.transpose() * h));
  BinaryVector out(v.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = bernoulli(vp[static_cast<Eigen::Index>(j)], rng);
  return out;
}

EstimatorGradient rbm_cd1_gradient(EstimatorRef params, const BinaryVector& v, Rng& rng) {
  const BinaryVector reconstruction = rbm_gibbs_step(params, v, rng);
  auto pos = rbm_free_energy_gradient(params, v);
  const auto neg = rbm_free_energy_gradient(params, reconstruction);
  pos.visible_bias -= neg.visible_bias;
  pos.hidden_bias -= neg.hidden_bias;
  pos.weights -= neg.weights;
  return pos;
}

// ---------------------------------------------------------------------------
// NADE

namespace {

// Forward pass shared by likelihood and gradient: fills the logits z_j and the
// hidden activations h_j (column j of `hidden`).
void nade_forward(EstimatorRef params, const BinaryVector& v, Vector& logits, Matrix* hidden) {
  const auto n = params.num_visible();
  logits.resize(n);
  if (hidden) hidden->resize(params.num_hidden(), n);
  Vector act = params.hidden_bias;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector h = sigmoid(act);
    logits[j] = params.weights.col(j).dot(h) + params.visible_bias[j];
    if (hidden) hidden->col(j) = h;
    if (v[static_cast<std::size_t>(j)]) act += params.weights.col(j);
  }
}

}  // namespace

Vector nade_logits(EstimatorRef params, const BinaryVector& v) {
  check_visible(params, v);
  Vector z;
  nade_forward(params, v, z, nullptr);
  return z;
}

Vector nade_conditionals(EstimatorRef params, const BinaryVector& v) {
  return sigmoid(nade_logits(params, v));
}

double nade_log_likelihood(EstimatorRef params, const BinaryVector& v) {
  const Vector z = nade_logits(params, v);
  double ll = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j)
    ll += v[static_cast<std::size_t>(j)] ? log_sigmoid(z[j]) : log_sigmoid(-z[j]);
  return ll;
}

EstimatorGradient nade_gradient(EstimatorRef params, const BinaryVector& v) {
  return nade_gradient(params, v, nullptr);
}

EstimatorGradient nade_gradient(EstimatorRef params, const BinaryVector& v, double* cost) {
  check_visible(params, v);
  const auto n = params.num_visible();
  Vector z;
  Matrix hidden;
  nade_forward(params, v, z, &hidden);

  auto grad = EstimatorGradient::zeros_like(params);
  double c = 0.0;
  // Running sum over k > j of dC/d(b_v)_k * W[:, k] * h_k (1 - h_k), i.e. the
  // gradient with respect to the hidden pre-activation that unit j feeds.
  Vector upstream = Vector::Zero(params.num_hidden());
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    const bool on = v[static_cast<std::size_t>(j)] != 0;
    c -= on ? log_sigmoid(z[j]) : log_sigmoid(-z[j]);
    const double delta = sigmoid(z[j]) - (on ? 1.0 : 0.0);
    grad.visible_bias[j] = delta;
    const auto h = hidden.col(j);
    grad.weights.col(j) = delta * h;
    if (on) grad.weights.col(j) += upstream;
    const Vector pre = delta * params.weights.col(j).cwiseProduct(h.cwiseProduct(
                                   (Vector::Ones(h.size()) - h)));
    upstream += pre;
  }
  grad.hidden_bias = upstream;
  if (cost) *cost = c;
  return grad;
}

BinaryVector nade_sample(EstimatorRef params, Rng& rng) {
  params.validate();
  const auto n = params.num_visible();
  BinaryVector v(static_cast<std::size_t>(n));
  Vector act = params.hidden_bias;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector h = sigmoid(act);
    const double p = sigmoid(params.weights.col(j).dot(h) + params.visible_bias[j]);
    v[static_cast<std::size_t>(j)] = bernoulli(p, rng);
    if (v[static_cast<std::size_t>(j)]) act += params.weights.col(j);
  }
  return v;
}

}  // namespace seqtrans
