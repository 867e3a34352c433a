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

#include "seqtrans/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace seqtrans {

using nlohmann::json;

std::string to_string(ModelKind kind) {
  return kind == ModelKind::io_rnn ? "io-rnn" : "io-rnn-nade";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "io-rnn-nade") return ModelKind::io_rnn_nade;
  if (name == "io-rnn") return ModelKind::io_rnn;
  throw DomainError("unknown model kind '" + name + "' (expected io-rnn-nade or io-rnn)");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string() + ": write failed");
}

namespace {

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": malformed JSON: " + e.what());
  }
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(what + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(what + ": field '" + key + "' has the wrong type: " + e.what());
  }
}

json block_to_json(const Matrix& m) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  return arr;
}

json block_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

// Row-major array into m, whose shape is already set from the dims.
template <typename Block>
void block_from_json(const json& params, std::string_view name, Block& m) {
  const std::string key(name);
  if (!params.contains(key)) throw ParseError("model: missing parameter block '" + key + "'");
  const json& arr = params.at(key);
  if (!arr.is_array()) throw ParseError("model: parameter block '" + key + "' is not an array");
  if (static_cast<Eigen::Index>(arr.size()) != m.size()) {
    throw DimensionError("model: parameter block '" + key + "' has " + std::to_string(arr.size()) +
                         " values, dims require " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " = " + std::to_string(m.size()));
  }
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j, ++k) {
      if (!arr[k].is_number())
        throw ParseError("model: parameter block '" + key + "' holds a non-number");
      m(i, j) = arr[k].get<double>();
    }
  }
}

}  // namespace

std::string model_to_json(const ModelFile& model) {
  model.params.validate();
  const auto d = model.params.dims();
  json j;
  j["format_version"] = model.format_version;
  j["model_kind"] = to_string(model.kind);
  j["dims"] = {{"N", d.output}, {"H", d.hidden}, {"R", d.recurrent}, {"D", d.input}};
  json params = json::object();
  model.params.for_each_block(
      [&](std::string_view name, const auto& m) { params[std::string(name)] = block_to_json(m); });
  j["params"] = std::move(params);
  j["training"] = {{"seed", model.training.seed},
                   {"epochs", model.training.epochs},
                   {"final_loss", model.training.final_loss}};
  return j.dump(1) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  const json j = parse_json(text, "model");
  if (!j.is_object()) throw ParseError("model: top level is not an object");
  const int version = get_field<int>(j, "format_version", "model");
  if (version != kModelFormatVersion) {
    throw VersionError("model: format_version " + std::to_string(version) +
                       " is not supported (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  ModelFile model;
  model.format_version = version;
  try {
    model.kind = parse_model_kind(get_field<std::string>(j, "model_kind", "model"));
  } catch (const DomainError& e) {
    throw ParseError(std::string("model: ") + e.what());
  }

  const json dims = get_field<json>(j, "dims", "model");
  TransducerDims d;
  d.output = get_field<Eigen::Index>(dims, "N", "model dims");
  d.hidden = get_field<Eigen::Index>(dims, "H", "model dims");
  d.recurrent = get_field<Eigen::Index>(dims, "R", "model dims");
  d.input = get_field<Eigen::Index>(dims, "D", "model dims");
  model.params = TransducerParams::zeros(d);

  const json params = get_field<json>(j, "params", "model");
  if (!params.is_object()) throw ParseError("model: 'params' is not an object");
  model.params.for_each_block(
      [&](std::string_view name, auto& m) { block_from_json(params, name, m); });
  if (!model.params.all_finite()) throw ParseError("model: parameters contain non-finite values");

  if (j.contains("training")) {
    const json& tr = j.at("training");
    model.training.seed = get_field<std::uint64_t>(tr, "seed", "model training");
    model.training.epochs = get_field<int>(tr, "epochs", "model training");
    model.training.final_loss = get_field<double>(tr, "final_loss", "model training");
  }
  if (model.kind == ModelKind::io_rnn && !model.params.independent_outputs())
    throw ParseError("model: kind io-rnn requires zero 'weights'");
  return model;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
  write_text(path, model_to_json(model));
}

ModelFile load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_text(path));
  } catch (const VersionError& e) {
    throw VersionError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

std::string roll_to_json(const PianoRoll& roll) {
  roll.validate();
  // One frame per line keeps the files diffable.
  std::ostringstream out;
  out << "{\"num_pitches\": " << roll.num_pitches << ", \"frames\": [";
  for (std::size_t t = 0; t < roll.frames.size(); ++t) {
    out << (t ? ",\n  [" : "\n  [");
    bool first = true;
    for (std::size_t p = 0; p < roll.num_pitches; ++p) {
      if (!roll.frames[t][p]) continue;
      out << (first ? "" : ", ") << p;
      first = false;
    }
    out << "]";
  }
  out << "\n]}\n";
  return out.str();
}

PianoRoll roll_from_json(const std::string& text) {
  const json j = parse_json(text, "piano-roll");
  PianoRoll roll;
  roll.num_pitches = get_field<std::size_t>(j, "num_pitches", "piano-roll");
  const auto frames = get_field<std::vector<std::vector<long long>>>(j, "frames", "piano-roll");
  for (std::size_t t = 0; t < frames.size(); ++t) {
    BinaryVector frame(roll.num_pitches, 0);
    for (const long long p : frames[t]) {
      if (p < 0 || static_cast<std::size_t>(p) >= roll.num_pitches) {
        throw DimensionError("piano-roll: frame " + std::to_string(t) + " has pitch " +
                             std::to_string(p) + " outside [0, " +
                             std::to_string(roll.num_pitches) + ")");
      }
      frame[static_cast<std::size_t>(p)] = 1;
    }
    roll.frames.push_back(std::move(frame));
  }
  roll.validate();
  return roll;
}

void save_roll(const PianoRoll& roll, const std::filesystem::path& path) {
  write_text(path, roll_to_json(roll));
}

PianoRoll load_roll(const std::filesystem::path& path) {
  try {
    return roll_from_json(read_text(path));
  } catch (const FormatError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(path.string() + ": " + e.what());
  }
}

std::string features_to_json(const std::vector<Vector>& x) {
  if (x.empty()) throw DimensionError("features: no frames");
  json j;
  j["dim"] = x.front().size();
  json frames = json::array();
  for (const auto& f : x) {
    require_dims(f.size() == x.front().size(), "features: frames differ in length");
    frames.push_back(block_to_json(f));
  }
  j["frames"] = std::move(frames);
  return j.dump() + "\n";
}

std::vector<Vector> features_from_json(const std::string& text) {
  const json j = parse_json(text, "features");
  const auto dim = get_field<Eigen::Index>(j, "dim", "features");
  const auto frames = get_field<std::vector<std::vector<double>>>(j, "frames", "features");
  if (frames.empty()) throw DimensionError("features: no frames");
  std::vector<Vector> x;
  x.reserve(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    require_dims(static_cast<Eigen::Index>(frames[t].size()) == dim,
                 "features: frame " + std::to_string(t) + " has " +
                     std::to_string(frames[t].size()) + " values, expected dim " +
                     std::to_string(dim));
    x.push_back(Eigen::Map<const Vector>(frames[t].data(), dim));
  }
  return x;
}

void save_features(const std::vector<Vector>& x, const std::filesystem::path& path) {
  write_text(path, features_to_json(x));
}

std::vector<Vector> load_features(const std::filesystem::path& path) {
  try {
    return features_from_json(read_text(path));
  } catch (const FormatError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(path.string() + ": " + e.what());
  }
}

namespace {

std::string sequence_stem(std::size_t i) {
  std::ostringstream s;
  s << std::setw(4) << std::setfill('0') << i;
  return s.str();
}

}  // namespace

void save_corpus(const std::vector<SequencePair>& corpus, const CorpusSpec& spec,
                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create directory: " + ec.message());

  json manifest;
  manifest["num_sequences"] = corpus.size();
  manifest["spec"] = {{"num_pitches", spec.num_pitches},     {"feature_dim", spec.feature_dim},
                      {"seq_len", spec.seq_len},             {"polyphony", spec.polyphony},
                      {"note_hold", spec.note_hold},         {"onset_rate", spec.onset_rate},
                      {"background_noise", spec.background_noise}, {"seed", spec.seed}};
  json files = json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string stem = sequence_stem(i);
    save_features(corpus[i].x, dir / (stem + ".features.json"));
    save_roll(to_piano_roll(corpus[i].v), dir / (stem + ".roll.json"));
    files.push_back({{"features", stem + ".features.json"}, {"roll", stem + ".roll.json"}});
  }
  manifest["sequences"] = std::move(files);
  write_text(dir / "corpus.json", manifest.dump(1) + "\n");
}

std::vector<SequencePair> load_corpus(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "corpus.json";
  const json manifest = parse_json(read_text(manifest_path), manifest_path.string());
  const auto entries = get_field<json>(manifest, "sequences", manifest_path.string());
  if (!entries.is_array()) throw ParseError(manifest_path.string() + ": 'sequences' is not an array");
  std::vector<SequencePair> corpus;
  for (const auto& e : entries) {
    SequencePair pair;
    pair.x = load_features(dir / get_field<std::string>(e, "features", manifest_path.string()));
    const auto roll = load_roll(dir / get_field<std::string>(e, "roll", manifest_path.string()));
    require_dims(roll.length() == pair.x.size(),
                 manifest_path.string() + ": roll and features differ in length");
    pair.v = roll.frames;
    corpus.push_back(std::move(pair));
  }
  return corpus;
}

}  // namespace seqtrans
