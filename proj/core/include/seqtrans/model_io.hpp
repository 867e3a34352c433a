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

// JSON persistence for models, piano-rolls, feature sequences and corpora.
//
// Model file (format_version 1):
//
//   {"format_version": 1, "model_kind": "io-rnn-nade" | "io-rnn",
//    "dims": {"N": .., "H": .., "R": .., "D": ..},
//    "params": {"visible_bias": [...], ..., "state_bias": [...]},   // row-major
//    "training": {"seed": .., "epochs": .., "final_loss": ..}}
//
// Reals are written in the shortest decimal form that parses back to the
// same double (at most 17 significant digits), so a save/load round trip is
// bit-exact.
//
// Piano-roll file: {"num_pitches": N, "frames": [[active pitches], ...]}.
// Feature file:    {"dim": D, "frames": [[x_0, ..., x_{D-1}], ...]}.
// Corpus directory: corpus.json manifest plus NNNN.features.json and
// NNNN.roll.json per sequence.

#ifndef SEQTRANS_MODEL_IO_HPP
#define SEQTRANS_MODEL_IO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seqtrans/dataeval.hpp"
#include "seqtrans/transducer.hpp"

namespace seqtrans {

/// Malformed or unreadable artifact.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Missing or unwritable file; the message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kModelFormatVersion = 1;

enum class ModelKind { io_rnn_nade, io_rnn };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct TrainingMetadata {
  std::uint64_t seed = 0;
  int epochs = 0;
  double final_loss = 0.0;
};

struct ModelFile {
  int format_version = kModelFormatVersion;
  ModelKind kind = ModelKind::io_rnn_nade;
  TransducerParams params;
  TrainingMetadata training;
};

std::string model_to_json(const ModelFile& model);
/// Throws ParseError, VersionError or DimensionError (naming the field).
ModelFile model_from_json(const std::string& text);

void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

std::string roll_to_json(const PianoRoll& roll);
PianoRoll roll_from_json(const std::string& text);
void save_roll(const PianoRoll& roll, const std::filesystem::path& path);
PianoRoll load_roll(const std::filesystem::path& path);

std::string features_to_json(const std::vector<Vector>& x);
std::vector<Vector> features_from_json(const std::string& text);
void save_features(const std::vector<Vector>& x, const std::filesystem::path& path);
std::vector<Vector> load_features(const std::filesystem::path& path);

/// Writes corpus.json plus one feature and one roll file per sequence.
void save_corpus(const std::vector<SequencePair>& corpus, const CorpusSpec& spec,
                 const std::filesystem::path& dir);
std::vector<SequencePair> load_corpus(const std::filesystem::path& dir);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace seqtrans

#endif  // SEQTRANS_MODEL_IO_HPP
