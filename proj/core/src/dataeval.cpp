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

#include "seqtrans/dataeval.hpp"

#include <array>
#include <complex>

#include <unsupported/Eigen/FFT>

namespace seqtrans {

void PianoRoll::validate() const {
  if (num_pitches == 0) throw DimensionError("piano-roll: num_pitches must be >= 1");
  if (frames.empty()) throw DimensionError("piano-roll: no frames");
  for (std::size_t t = 0; t < frames.size(); ++t) {
    require_dims(frames[t].size() == num_pitches,
                 "piano-roll: frame " + std::to_string(t) + " has " +
                     std::to_string(frames[t].size()) + " pitches, expected " +
                     std::to_string(num_pitches));
    require_binary(frames[t], "piano-roll frame");
  }
}

PianoRoll to_piano_roll(const std::vector<BinaryVector>& frames) {
  PianoRoll roll{frames.empty() ? 0 : frames.front().size(), frames};
  roll.validate();
  return roll;
}

// ---------------------------------------------------------------------------
// Corpus generation

void CorpusSpec::validate() const {
  if (num_pitches == 0 || feature_dim == 0 || num_sequences == 0 || seq_len == 0)
    throw DimensionError("corpus: num_pitches, feature_dim, num_sequences and seq_len must be >= 1");
  require_dims(dictionary.rows() == static_cast<Eigen::Index>(feature_dim) &&
                   dictionary.cols() == static_cast<Eigen::Index>(num_pitches),
               "corpus: dictionary is " + std::to_string(dictionary.rows()) + "x" +
                   std::to_string(dictionary.cols()) + ", expected " +
                   std::to_string(feature_dim) + "x" + std::to_string(num_pitches));
  for (Eigen::Index j = 0; j < dictionary.cols(); ++j) {
    if (std::abs(dictionary.col(j).norm() - 1.0) > 1e-9)
      throw DomainError("corpus: dictionary column " + std::to_string(j) + " is not unit-norm");
  }
  if (polyphony == 0 || polyphony > num_pitches)
    throw DomainError("corpus: polyphony must lie in [1, num_pitches]");
  if (!(note_hold >= 1.0) || !std::isfinite(note_hold))
    throw DomainError("corpus: note_hold must be a finite number >= 1");
  if (!(onset_rate > 0.0 && onset_rate <= 1.0))
    throw DomainError("corpus: onset_rate must lie in (0, 1]");
  if (!(background_noise >= 0.0) || !std::isfinite(background_noise))
    throw DomainError("corpus: background_noise must be finite and >= 0");
}

Matrix harmonic_dictionary(std::size_t feature_dim, std::size_t num_pitches) {
  const auto d = static_cast<Eigen::Index>(feature_dim);
  const auto n = static_cast<Eigen::Index>(num_pitches);
  require_dims(d >= 1 && n >= 1, "harmonic_dictionary: dimensions must be >= 1");
  constexpr double kWidth = 0.5;
  const double spacing = n > 1 ? static_cast<double>(d - 1) / static_cast<double>(n - 1) : 0.0;
  Matrix dict(d, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double fundamental = spacing * static_cast<double>(j);
    const double overtone = std::fmod(fundamental + 0.4 * static_cast<double>(d), static_cast<double>(d));
    for (Eigen::Index r = 0; r < d; ++r) {
      const double a = (static_cast<double>(r) - fundamental) / kWidth;
      const double b = (static_cast<double>(r) - overtone) / kWidth;
      dict(r, j) = std::exp(-0.5 * a * a) + 0.5 * std::exp(-0.5 * b * b);
    }
    dict.col(j).normalize();
  }
  return dict;
}

Matrix identity_dictionary(std::size_t num_pitches) {
  const auto n = static_cast<Eigen::Index>(num_pitches);
  return Matrix::Identity(n, n);
}

std::vector<SequencePair> generate_corpus(const CorpusSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double keep = 1.0 - 1.0 / spec.note_hold;
  constexpr std::array<int, 8> kIntervals{-7, -5, -4, -3, 3, 4, 5, 7};
  std::uniform_int_distribution<std::size_t> pick_interval(0, kIntervals.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_pitch(0, spec.num_pitches - 1);
  const auto n = static_cast<long>(spec.num_pitches);

  std::vector<SequencePair> corpus;
  corpus.reserve(spec.num_sequences);
  for (std::size_t s = 0; s < spec.num_sequences; ++s) {
    SequencePair pair;
    BinaryVector prev(spec.num_pitches, 0);
    std::size_t anchor = pick_pitch(rng);
    for (std::size_t t = 0; t < spec.seq_len; ++t) {
      BinaryVector frame(spec.num_pitches, 0);
      BinaryVector released(spec.num_pitches, 0);
      std::size_t voices = 0;
      for (std::size_t p = 0; p < spec.num_pitches; ++p) {
        if (!prev[p]) continue;
        if (unit(rng) < keep) {
          frame[p] = 1;
          ++voices;
        } else {
          released[p] = 1;
        }
      }
      // A pitch released this frame cannot restart immediately, so every
      // held note is one contiguous run.
      const std::size_t free_voices = spec.polyphony - voices;
      for (std::size_t k = 0; k < free_voices; ++k) {
        if (unit(rng) >= spec.onset_rate) continue;
        for (int attempt = 0; attempt < 8; ++attempt) {
          const long step = kIntervals[pick_interval(rng)];
          const auto cand = static_cast<std::size_t>(((static_cast<long>(anchor) + step) % n + n) % n);
          if (frame[cand] || released[cand]) continue;
          frame[cand] = 1;
          anchor = cand;
          break;
        }
      }
      Vector x = spec.dictionary * to_vector(frame);
      if (spec.background_noise > 0.0) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += spec.background_noise * gauss(rng);
      }
      pair.x.push_back(std::move(x));
      pair.v.push_back(frame);
      prev = std::move(frame);
    }
    corpus.push_back(std::move(pair));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Noise

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "white") return NoiseKind::white;
  if (name == "pink") return NoiseKind::pink;
  if (name == "masking") return NoiseKind::masking;
  if (name == "pitch_shift") return NoiseKind::pitch_shift;
  throw DomainError("unknown noise kind '" + name + "' (expected white, pink, masking, pitch_shift)");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::white: return "white";
    case NoiseKind::pink: return "pink";
    case NoiseKind::masking: return "masking";
    case NoiseKind::pitch_shift: return "pitch_shift";
  }
  return "unknown";
}

void NoiseSpec::validate() const {
  if (!std::isfinite(level)) throw DomainError("noise level must be finite");
  if (!(segment >= 0.0) || !std::isfinite(segment))
    throw DomainError("noise segment length must be finite and >= 0");
  switch (kind) {
    case NoiseKind::white:
    case NoiseKind::pink:
      break;
    case NoiseKind::masking:
      if (!(level > 0.0)) throw DomainError("masking noise: mean segment length must be > 0");
      break;
    case NoiseKind::pitch_shift:
      if (!(level >= 0.0)) throw DomainError("pitch_shift noise: sigma must be >= 0");
      break;
  }
}

namespace {

double energy(const std::vector<Vector>& x) {
  double e = 0.0;
  for (const auto& f : x) e += f.squaredNorm();
  return e;
}

// x + c * noise with c chosen so that |x|^2 / |c noise|^2 = 10^(snr_db / 10).
std::vector<Vector> add_at_snr(const std::vector<Vector>& x, const std::vector<Vector>& noise,
                               double snr_db) {
  const double es = energy(x);
  const double en = energy(noise);
  if (es == 0.0 || en == 0.0) return x;
  const double c = std::sqrt(es / (en * std::pow(10.0, snr_db / 10.0)));
  std::vector<Vector> out = x;
  for (std::size_t t = 0; t < out.size(); ++t) out[t] += c * noise[t];
  return out;
}

std::vector<Vector> white_series(const std::vector<Vector>& x, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> noise(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    noise[t].resize(x[t].size());
    for (Eigen::Index i = 0; i < x[t].size(); ++i) noise[t][i] = gauss(rng);
  }
  return noise;
}

// Shapes each feature row of white noise to a 1/f power spectrum over time.
std::vector<Vector> pink_series(const std::vector<Vector>& x, Rng& rng) {
  auto noise = white_series(x, rng);
  const std::size_t steps = x.size();
  if (steps < 2) return noise;
  const auto dims = x.front().size();
  Eigen::FFT<double> fft;
  std::vector<double> row(steps);
  std::vector<std::complex<double>> spectrum;
  for (Eigen::Index d = 0; d < dims; ++d) {
    for (std::size_t t = 0; t < steps; ++t) row[t] = noise[t][d];
    fft.fwd(spectrum, row);
    spectrum[0] = 0.0;
    for (std::size_t k = 1; k < spectrum.size(); ++k) {
      const double f = static_cast<double>(std::min(k, steps - k));
      spectrum[k] /= std::sqrt(f);
    }
    fft.inv(row, spectrum);
    for (std::size_t t = 0; t < steps; ++t) noise[t][d] = row[t];
  }
  return noise;
}

std::size_t exponential_frames(double mean, Rng& rng, std::size_t minimum) {
  std::exponential_distribution<double> dist(1.0 / mean);
  const auto len = static_cast<std::size_t>(std::llround(dist(rng)));
  return std::max(len, minimum);
}

}  // namespace

std::vector<Vector> apply_noise(const std::vector<Vector>& x, const NoiseSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  switch (spec.kind) {
    case NoiseKind::white:
      return add_at_snr(x, white_series(x, rng), spec.level);
    case NoiseKind::pink:
      return add_at_snr(x, pink_series(x, rng), spec.level);
    case NoiseKind::masking: {
      // Alternating clean gaps and destroyed segments, both exponential.
      const double gap_mean = spec.segment > 0.0 ? spec.segment : 2.0 * spec.level;
      std::vector<Vector> out = x;
      std::size_t cursor = exponential_frames(gap_mean, rng, 0);
      while (cursor < out.size()) {
        const std::size_t len = exponential_frames(spec.level, rng, 1);
        const std::size_t end = std::min(out.size(), cursor + len);
        for (std::size_t t = cursor; t < end; ++t) out[t].setZero();
        cursor = end + exponential_frames(gap_mean, rng, 0);
      }
      return out;
    }
    case NoiseKind::pitch_shift: {
      const double seg_mean = spec.segment > 0.0 ? spec.segment : 4.0;
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<Vector> out = x;
      std::size_t cursor = 0;
      while (cursor < out.size()) {
        const std::size_t end = std::min(out.size(), cursor + exponential_frames(seg_mean, rng, 1));
        const long offset = std::lround(spec.level * gauss(rng));
        for (std::size_t t = cursor; t < end; ++t) {
          const auto dims = static_cast<long>(x[t].size());
          for (long r = 0; r < dims; ++r) out[t][((r + offset) % dims + dims) % dims] = x[t][r];
        }
        cursor = end;
      }
      return out;
    }
  }
  throw DomainError("unknown noise kind");
}

// ---------------------------------------------------------------------------
// Evaluation

double FrameCounts::accuracy() const {
  const std::size_t total = true_positives + false_positives + false_negatives;
  if (total == 0) return 1.0;
  return static_cast<double>(true_positives) / static_cast<double>(total);
}

FrameCounts frame_counts(const PianoRoll& pred, const PianoRoll& truth) {
  pred.validate();
  truth.validate();
  require_dims(pred.num_pitches == truth.num_pitches && pred.length() == truth.length(),
               "frame_accuracy: rolls differ in shape (" + std::to_string(pred.length()) + "x" +
                   std::to_string(pred.num_pitches) + " vs " + std::to_string(truth.length()) +
                   "x" + std::to_string(truth.num_pitches) + ")");
  FrameCounts c;
  for (std::size_t t = 0; t < pred.length(); ++t) {
    for (std::size_t p = 0; p < pred.num_pitches; ++p) {
      const bool a = pred.frames[t][p] != 0;
      const bool b = truth.frames[t][p] != 0;
      c.true_positives += a && b;
      c.false_positives += a && !b;
      c.false_negatives += !a && b;
    }
  }
  return c;
}

double frame_accuracy(const PianoRoll& pred, const PianoRoll& truth) {
  return frame_counts(pred, truth).accuracy();
}

}  // namespace seqtrans
