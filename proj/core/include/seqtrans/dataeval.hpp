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

// Synthetic transcription data, feature-space noise and frame-level accuracy.

#ifndef SEQTRANS_DATAEVAL_HPP
#define SEQTRANS_DATAEVAL_HPP

#include <string>
#include <vector>

#include "seqtrans/common.hpp"
#include "seqtrans/transducer.hpp"

namespace seqtrans {

/// Binary pitch-by-time matrix.
struct PianoRoll {
  std::size_t num_pitches = 0;
  std::vector<BinaryVector> frames;

  std::size_t length() const { return frames.size(); }
  void validate() const;
};

PianoRoll to_piano_roll(const std::vector<BinaryVector>& frames);

struct CorpusSpec {
  std::size_t num_pitches = 12;
  std::size_t feature_dim = 16;
  std::size_t num_sequences = 10;
  std::size_t seq_len = 50;
  Matrix dictionary;           // feature_dim x num_pitches, unit-norm columns
  std::size_t polyphony = 3;   // max simultaneous notes
  double note_hold = 4.0;      // mean note duration in frames (>= 1)
  double onset_rate = 0.3;     // per free voice, per frame
  double background_noise = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Pitch templates on a feature axis of `feature_dim` bins: a Gaussian bump
/// at the pitch's fundamental bin and a weaker one a fixed interval above,
/// normalized to unit length.
Matrix harmonic_dictionary(std::size_t feature_dim, std::size_t num_pitches);

/// Identity templates (feature_dim == num_pitches).
Matrix identity_dictionary(std::size_t num_pitches);

/// Samples piano-rolls (geometric note durations, capped polyphony, onset
/// pitches drawn by a small interval Markov chain) and renders
/// x(t) = dictionary * v(t) + N(0, background_noise^2).
std::vector<SequencePair> generate_corpus(const CorpusSpec& spec);

enum class NoiseKind { white, pink, masking, pitch_shift };

NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::white;
  /// white, pink: SNR in dB. masking: mean masked-segment length in frames.
  /// pitch_shift: standard deviation of the row offset.
  double level = 0.0;
  /// Mean length (frames) of the unmasked gaps for masking and of the
  /// constant-offset segments for pitch_shift; 0 selects the default
  /// (2 * level for masking, 4 for pitch_shift).
  double segment = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

std::vector<Vector> apply_noise(const std::vector<Vector>& x, const NoiseSpec& spec);

struct FrameCounts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  FrameCounts& operator+=(const FrameCounts& o) {
    true_positives += o.true_positives;
    false_positives += o.false_positives;
    false_negatives += o.false_negatives;
    return *this;
  }
  /// TP / (TP + FP + FN); 1 when there are no events at all.
  double accuracy() const;
};

FrameCounts frame_counts(const PianoRoll& pred, const PianoRoll& truth);

double frame_accuracy(const PianoRoll& pred, const PianoRoll& truth);

}  // namespace seqtrans

#endif  // SEQTRANS_DATAEVAL_HPP
