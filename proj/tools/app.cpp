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

#include "app.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqtrans/seqtrans.hpp"

namespace seqtrans::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Key {
  std::string name;
  std::string fallback;  // empty means unset
  std::string help;
  bool list = false;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v, int digits = 17) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

/// Resolved option values for one command, with typed accessors.
class Options {
 public:
  explicit Options(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const {
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty() && it->second != "none";
  }

  std::string text(const std::string& key) const {
    if (!has(key)) throw UsageError("missing required option --" + key);
    return values_.at(key);
  }

  double real(const std::string& key) const {
    const std::string s = text(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("--" + key + ": '" + s + "' is not a number");
  }

  std::uint64_t count(const std::string& key) const {
    const std::string s = text(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw UsageError("--" + key + ": '" + s + "' is not a non-negative integer");
    return v;
  }

  std::size_t size(const std::string& key) const { return static_cast<std::size_t>(count(key)); }

  std::optional<std::size_t> optional_size(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return size(key);
  }

  bool flag(const std::string& key) const {
    const std::string s = text(key);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw UsageError("--" + key + ": '" + s + "' is not a boolean");
  }

  std::vector<double> reals(const std::string& key) const {
    std::string s = text(key);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw UsageError("--" + key + ": '" + tok + "' is not a number");
      }
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

using Body = std::function<int(const Options&, std::ostream&, std::ostream&)>;

struct Command {
  std::string name;
  std::string help;
  std::vector<Key> keys;
  Body body;
};

// ---------------------------------------------------------------------------

std::vector<SequencePair> select(std::vector<SequencePair> corpus, const Options& o) {
  const std::size_t first = o.size("first");
  if (first >= corpus.size())
    throw UsageError("--first " + std::to_string(first) + " is past the end of a corpus of " +
                     std::to_string(corpus.size()) + " sequences");
  const std::size_t n = o.has("count") ? std::min(o.size("count"), corpus.size() - first)
                                       : corpus.size() - first;
  if (n == 0) throw UsageError("--count selects no sequences");
  return {corpus.begin() + static_cast<std::ptrdiff_t>(first),
          corpus.begin() + static_cast<std::ptrdiff_t>(first + n)};
}

BeamConfig beam_config(const Options& o) {
  BeamConfig cfg;
  cfg.width = o.size("width");
  cfg.branching = o.size("branching");
  cfg.samples = o.size("samples");
  cfg.restart_period = o.optional_size("restart_period");
  cfg.prefix_lag = o.optional_size("prefix_lag");
  cfg.seed = o.count("seed");
  cfg.validate();
  return cfg;
}

Decoding decode(const TransducerParams& params, const std::vector<Vector>& x, const Options& o) {
  const std::string decoder = o.text("decoder");
  const BeamConfig cfg = beam_config(o);
  if (decoder == "beam") return beam_search(params, x, cfg);
  if (decoder == "greedy") return greedy_decode(params, x, cfg);
  throw UsageError("--decoder: '" + decoder + "' is not one of beam, greedy");
}

const std::vector<Key> kDecodeKeys{
    {"decoder", "beam", "beam or greedy"},
    {"width", "1", "beam width w"},
    {"branching", "1", "branching factor K"},
    {"samples", "0", "stochastic samples S per expansion (0: 10 * K)"},
    {"restart_period", "", "commit to the best path every M frames"},
    {"prefix_lag", "", "merge paths whose last tau frames agree"},
};

std::vector<Key> with(std::vector<Key> a, const std::vector<Key>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

int cmd_gen(const Options& o, std::ostream& out, std::ostream&) {
  CorpusSpec spec;
  spec.num_pitches = o.size("num_pitches");
  spec.feature_dim = o.size("feature_dim");
  spec.num_sequences = o.size("num_sequences");
  spec.seq_len = o.size("seq_len");
  spec.polyphony = o.size("polyphony");
  spec.note_hold = o.real("note_hold");
  spec.onset_rate = o.real("onset_rate");
  spec.background_noise = o.real("background_noise");
  spec.seed = o.count("seed");
  const std::string dict = o.text("dictionary");
  if (dict == "harmonic") {
    spec.dictionary = harmonic_dictionary(spec.feature_dim, spec.num_pitches);
  } else if (dict == "identity") {
    if (spec.feature_dim != spec.num_pitches)
      throw UsageError("--dictionary identity needs feature_dim == num_pitches");
    spec.dictionary = identity_dictionary(spec.num_pitches);
  } else {
    throw UsageError("--dictionary: '" + dict + "' is not one of harmonic, identity");
  }
  const auto corpus = generate_corpus(spec);
  const fs::path dir = o.text("out");
  save_corpus(corpus, spec, dir);
  out << "wrote " << corpus.size() << " sequences of " << spec.seq_len << " frames ("
      << spec.num_pitches << " pitches, " << spec.feature_dim << " features) to " << dir.string()
      << "\n";
  return 0;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream&) {
  const auto corpus = select(load_corpus(o.text("corpus")), o);
  const auto kind = parse_model_kind(o.text("kind"));
  TransducerDims dims;
  dims.output = static_cast<Eigen::Index>(corpus.front().v.front().size());
  dims.input = corpus.front().x.front().size();
  dims.hidden = static_cast<Eigen::Index>(o.size("hidden"));
  dims.recurrent = static_cast<Eigen::Index>(o.size("recurrent"));

  TrainConfig cfg;
  cfg.learning_rate = o.real("learning_rate");
  cfg.epochs = static_cast<int>(o.size("epochs"));
  cfg.alpha = o.real("alpha");
  cfg.beta = o.real("beta");
  cfg.teacher_noise = o.real("teacher_noise");
  cfg.seed = o.count("seed");
  if (o.has("gradient_clip")) cfg.gradient_clip = o.real("gradient_clip");
  cfg.validate();

  Rng rng(cfg.seed);
  auto init = TransducerParams::random_init(dims, rng, kind == ModelKind::io_rnn, o.flag("smoothing"));
  const auto result = train(std::move(init), corpus, cfg);

  ModelFile model;
  model.kind = kind;
  model.params = result.params;
  model.training = {cfg.seed, cfg.epochs, result.history.back()};
  const fs::path model_path = o.text("out");
  save_model(model, model_path);

  const fs::path csv_path = o.has("loss_csv") ? fs::path(o.text("loss_csv"))
                                              : fs::path(model_path.string() + ".loss.csv");
  std::ostringstream csv;
  csv << "epoch,objective\n";
  for (std::size_t e = 0; e < result.history.size(); ++e) csv << e << "," << fmt(result.history[e]) << "\n";
  write_text(csv_path, csv.str());

  out << "trained " << to_string(kind) << " on " << corpus.size() << " sequences for "
      << cfg.epochs << " epochs: objective " << fmt(result.history.front(), 6) << " -> "
      << fmt(result.history.back(), 6) << "\n"
      << "model: " << model_path.string() << "\n"
      << "loss history: " << csv_path.string() << "\n";
  return 0;
}

int cmd_transcribe(const Options& o, std::ostream& out, std::ostream& err) {
  const auto model = load_model(o.text("model"));
  const auto x = load_features(o.text("input"));
  const auto result = decode(model.params, x, o);
  const std::string roll = roll_to_json(to_piano_roll(result.frames));
  const std::string target = o.text("out");
  if (target == "-") {
    out << roll;
    err << "logp " << fmt(result.logp) << "\n";
  } else {
    write_text(target, roll);
    out << "transcribed " << x.size() << " frames to " << target << "\n"
        << "logp " << fmt(result.logp) << "\n";
  }
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream&) {
  json report;
  FrameCounts counts;
  if (o.has("pred") || o.has("truth")) {
    if (o.has("model") || o.has("corpus"))
      throw UsageError("give either --pred/--truth or --model/--corpus, not both");
    counts = frame_counts(load_roll(o.text("pred")), load_roll(o.text("truth")));
    report["mode"] = "rolls";
  } else {
    const auto model = load_model(o.text("model"));
    const auto corpus = select(load_corpus(o.text("corpus")), o);
    std::optional<NoiseSpec> noise;
    if (o.has("noise")) {
      noise = NoiseSpec{parse_noise_kind(o.text("noise")), o.real("noise_level"),
                        o.real("noise_segment"), 0};
      noise->validate();
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto x = corpus[i].x;
      if (noise) {
        noise->seed = o.count("seed") + i;
        x = apply_noise(x, *noise);
      }
      const auto result = decode(model.params, x, o);
      counts += frame_counts(to_piano_roll(result.frames), to_piano_roll(corpus[i].v));
    }
    report["mode"] = "transcribe";
    report["sequences"] = corpus.size();
    report["decoder"] = o.text("decoder");
    report["noise"] = noise ? to_string(noise->kind) : "none";
    if (noise) report["noise_level"] = noise->level;
  }
  report["true_positives"] = counts.true_positives;
  report["false_positives"] = counts.false_positives;
  report["false_negatives"] = counts.false_negatives;
  report["accuracy"] = counts.accuracy();
  const std::string text = report.dump(1) + "\n";
  if (o.has("out")) write_text(o.text("out"), text);
  out << text;
  return 0;
}

int cmd_enumerate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto p = o.reals("p");
  if (p.empty()) throw UsageError("--p needs at least one probability");
  std::optional<std::size_t> k;
  if (o.text("k") != "all") k = o.size("k");
  auto e = IndependentEnumerator::from_probabilities(Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())));
  for (const auto& w : e.warnings()) err << "warning: " << w << "\n";
  out << "rank\tlogp\tprob\tconfig\n";
  for (std::size_t rank = 1; !k || rank <= *k; ++rank) {
    const auto item = e.next();
    if (!item) break;
    std::string bits;
    for (auto b : item->v) bits += b ? '1' : '0';
    out << rank << "\t" << fmt(item->logp, 12) << "\t" << fmt(std::exp(item->logp), 12) << "\t"
        << bits << "\n";
  }
  return 0;
}

int cmd_gradcheck(const Options& o, std::ostream& out, std::ostream& err) {
  Rng rng(o.count("seed"));
  TransducerParams params;
  if (o.has("model")) {
    params = load_model(o.text("model")).params;
  } else {
    const TransducerDims d{static_cast<Eigen::Index>(o.size("N")), static_cast<Eigen::Index>(o.size("H")),
                           static_cast<Eigen::Index>(o.size("R")), static_cast<Eigen::Index>(o.size("D"))};
    params = TransducerParams::zeros(d);
    std::normal_distribution<double> g(0.0, o.real("scale"));
    const bool smoothing = o.flag("smoothing");
    params.for_each_block([&](std::string_view name, auto& blk) {
      if (!smoothing && name == "visible_to_state") return;
      for (Eigen::Index i = 0; i < blk.size(); ++i) blk.data()[i] = g(rng);
    });
  }
  const auto d = params.dims();
  const std::size_t steps = o.size("T");
  if (steps == 0) throw UsageError("--T must be >= 1");
  std::normal_distribution<double> g(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  SequencePair pair;
  for (std::size_t t = 0; t < steps; ++t) {
    Vector x(d.input);
    for (auto& e : x) e = g(rng);
    BinaryVector v(static_cast<std::size_t>(d.output));
    for (auto& b : v) b = coin(rng) ? 1 : 0;
    pair.x.push_back(std::move(x));
    pair.v.push_back(std::move(v));
  }
  TrainConfig cfg;
  cfg.alpha = o.real("alpha");
  cfg.beta = o.real("beta");
  const double worst = grad_check(params, pair, cfg);
  const double tol = o.real("tolerance");
  out << "parameters " << params.num_parameters() << "\n"
      << "max_relative_error " << fmt(worst, 6) << "\n";
  if (!(worst < tol)) {
    err << "error: gradient check exceeded tolerance " << fmt(tol, 6) << "\n";
    return 1;
  }
  return 0;
}

std::vector<Command> commands() {
  const Key seed{"seed", "0", "random seed"};
  const Key first{"first", "0", "index of the first corpus sequence to use"};
  const Key count{"count", "", "number of corpus sequences to use (default: all)"};
  return {
      {"gen", "generate a synthetic corpus directory",
       {{"out", "", "output directory"},
        {"num_pitches", "12", "pitches N"},
        {"feature_dim", "16", "feature dimension D"},
        {"num_sequences", "10", "sequences to generate"},
        {"seq_len", "50", "frames per sequence T"},
        {"polyphony", "3", "maximum simultaneous notes"},
        {"note_hold", "4", "mean note length in frames"},
        {"onset_rate", "0.3", "onset probability per free voice and frame"},
        {"background_noise", "0", "feature-space Gaussian noise scale"},
        {"dictionary", "harmonic", "harmonic or identity"},
        seed},
       cmd_gen},
      {"train", "train a model on a corpus directory",
       {{"corpus", "", "corpus directory"},
        {"out", "", "model file to write"},
        {"loss_csv", "", "loss history CSV (default: <out>.loss.csv)"},
        {"kind", "io-rnn-nade", "io-rnn-nade or io-rnn"},
        {"hidden", "16", "estimator hidden units H"},
        {"recurrent", "32", "recurrent units R"},
        {"smoothing", "true", "train the output-to-state connections"},
        {"learning_rate", "0.05", "SGD step size"},
        {"epochs", "10", "passes over the corpus"},
        {"alpha", "0", "penalty on input weights"},
        {"beta", "0", "penalty on recurrent weights"},
        {"teacher_noise", "0", "flip probability for fed-back outputs"},
        {"gradient_clip", "", "gradient norm threshold"},
        first, count, seed},
       cmd_train},
      {"transcribe", "decode a feature file into a piano-roll",
       with({{"model", "", "model file"},
             {"input", "", "feature file"},
             {"out", "-", "piano-roll file to write ('-' for stdout)"},
             seed},
            kDecodeKeys),
       cmd_transcribe},
      {"evaluate", "frame accuracy of rolls, or of a model on a corpus",
       with({{"pred", "", "predicted piano-roll file"},
             {"truth", "", "reference piano-roll file"},
             {"model", "", "model file"},
             {"corpus", "", "corpus directory"},
             {"noise", "none", "none, white, pink, masking or pitch_shift"},
             {"noise_level", "0", "SNR in dB, mean masked length, or shift sigma"},
             {"noise_segment", "0", "mean gap/segment length (0: default)"},
             {"out", "", "also write the report here"},
             first, count, seed},
            kDecodeKeys),
       cmd_evaluate},
      {"enumerate", "rank configurations of independent bits by probability",
       {{"p", "", "probabilities, space or comma separated", true},
        {"k", "all", "number of configurations"},
        seed},
       cmd_enumerate},
      {"gradcheck", "compare BPTT gradients with finite differences",
       {{"model", "", "model file (default: random instance)"},
        {"N", "3", "outputs"},
        {"H", "2", "estimator hidden units"},
        {"R", "2", "recurrent units"},
        {"D", "2", "input features"},
        {"T", "3", "frames"},
        {"scale", "0.7", "standard deviation of random parameters"},
        {"smoothing", "true", "random output-to-state weights"},
        {"alpha", "0", "penalty on input weights"},
        {"beta", "0", "penalty on recurrent weights"},
        {"tolerance", "1e-4", "exit nonzero above this error"},
        seed},
       cmd_gradcheck},
  };
}

}  // namespace

std::map<std::string, std::string> parse_config(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw UsageError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw UsageError(origin + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(s.substr(eq + 1));
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto cmds = commands();
  CLI::App app{"seqtrans: sequence transduction with I/O-RNN-NADE models"};
  app.require_subcommand(1);

  struct Slot {
    const Command* cmd;
    CLI::App* sub;
    std::string config;
    std::map<std::string, std::string> scalars;
    std::map<std::string, std::vector<std::string>> lists;
  };
  std::vector<Slot> slots(cmds.size());
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    auto& slot = slots[i];
    slot.cmd = &cmds[i];
    slot.sub = app.add_subcommand(cmds[i].name, cmds[i].help);
    slot.sub->add_option("--config", slot.config, "flat key = value file; flags override it");
    for (const auto& key : cmds[i].keys) {
      std::string help = key.help;
      if (!key.fallback.empty()) help += " [" + key.fallback + "]";
      if (key.list)
        slot.sub->add_option("--" + key.name, slot.lists[key.name], help)->expected(1, -1);
      else
        slot.sub->add_option("--" + key.name, slot.scalars[key.name], help);
    }
  }

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  for (auto& slot : slots) {
    if (!slot.sub->parsed()) continue;
    try {
      std::map<std::string, std::string> values;
      for (const auto& key : slot.cmd->keys) values[key.name] = key.fallback;
      if (!slot.config.empty()) {
        const auto file = parse_config(read_text(slot.config), slot.config);
        std::vector<std::string> unknown;
        for (const auto& [k, v] : file) {
          if (values.count(k)) {
            values[k] = v;
          } else {
            unknown.push_back(k);
          }
        }
        if (!unknown.empty()) {
          std::string msg = slot.config + ": unknown key(s) for '" + slot.cmd->name + "':";
          for (const auto& k : unknown) msg += " " + k;
          throw UsageError(msg);
        }
      }
      for (const auto& key : slot.cmd->keys) {
        if (slot.sub->get_option("--" + key.name)->count() == 0) continue;
        if (key.list) {
          std::string joined;
          for (const auto& part : slot.lists[key.name]) joined += (joined.empty() ? "" : " ") + part;
          values[key.name] = joined;
        } else {
          values[key.name] = slot.scalars[key.name];
        }
      }
      return slot.cmd->body(Options(std::move(values)), out, err);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}

}  // namespace seqtrans::cli
