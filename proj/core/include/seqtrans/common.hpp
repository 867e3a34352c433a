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

#ifndef SEQTRANS_COMMON_HPP
#define SEQTRANS_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace seqtrans {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One binary frame (a note set, a visible configuration). Entries are 0 or 1.
using BinaryVector = std::vector<std::uint8_t>;

/// The random stream used by every sampling routine.
using Rng = std::mt19937_64;

// Error hierarchy. Everything thrown by the library derives from Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (non-binary vector, bad config).
class DomainError : public Error {
 public:
  using Error::Error;
};

class IntractableError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

inline void require_binary(const BinaryVector& v, const char* name) {
  for (auto b : v) {
    if (b > 1) throw DomainError(std::string(name) + " must be binary (entries 0 or 1)");
  }
}

inline Vector to_vector(const BinaryVector& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(1 + e^x) without overflow.
inline double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// log sigma(x) = -softplus(-x).
inline double log_sigmoid(double x) { return -softplus(-x); }

inline Vector sigmoid(const Vector& x) { return x.unaryExpr([](double a) { return sigmoid(a); }); }

/// Draws u ~ U[0,1) and returns 1 when u < p.
inline std::uint8_t bernoulli(double p, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return unit(rng) < p ? 1 : 0;
}

/// Numerically stable log(sum(exp(xs))).
inline double log_sum_exp(const std::vector<double>& xs) {
  if (xs.empty()) return -INFINITY;
  double m = -INFINITY;
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace seqtrans

#endif  // SEQTRANS_COMMON_HPP
