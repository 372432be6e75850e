// textvec — command-line front end for the training / inference / evaluation
// pipeline. Subcommands are pure functions of their inputs and flags; every
// artifact-producing run writes a `<out>.run.json` manifest with the fully
// resolved configuration (no timestamps, so reruns are byte-identical).
//
// Flag precedence: built-in defaults < --preset < --config JSON < flags.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "presets.hpp"

#include "textvec/binarize/binarize.hpp"
#include "textvec/binarize/binary_code.hpp"
#include "textvec/corpus/examples.hpp"
#include "textvec/corpus/labels.hpp"
#include "textvec/corpus/preprocess.hpp"
#include "textvec/corpus/store.hpp"
#include "textvec/corpus/vocabulary.hpp"
#include "textvec/dsg/model.hpp"
#include "textvec/dsg/model_io.hpp"
#include "textvec/dsg/queries.hpp"
#include "textvec/dsg/train.hpp"
#include "textvec/evalir/evaluate.hpp"
#include "textvec/evalir/ranking.hpp"
#include "textvec/evalir/simhash.hpp"
#include "textvec/evalwsi/wsi.hpp"
#include "textvec/gradcheck_suite.hpp"
#include "textvec/nncore/sampler.hpp"
#include "textvec/pvmodels/model.hpp"
#include "textvec/pvmodels/train.hpp"

static_assert(std::endian::native == std::endian::little,
              "on-disk formats assume a little-endian host");

namespace textvec::cli {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// Semantic flag misuse detected after parsing (exit 1, like parse errors).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Flag overlay: preset / config-file values fill options the user did not pass.

class Overlay {
 public:
  template <typename T>
  CLI::Option* bind(CLI::App* sub, const std::string& flag, T& var, const std::string& desc) {
    CLI::Option* opt = sub->add_option(flag, var, desc);
    note(opt, key_of(flag), var);
    return opt;
  }

  CLI::Option* bind_flag(CLI::App* sub, const std::string& flag, bool& var,
                         const std::string& desc) {
    CLI::Option* opt = sub->add_flag(flag, var, desc);
    note(opt, key_of(flag), var);
    return opt;
  }

  void apply(const json& preset, const json& config) {
    for (auto& e : entries_) {
      if (e.opt->count() > 0) continue;
      if (config.contains(e.key))
        e.set(config.at(e.key));
      else if (preset.contains(e.key))
        e.set(preset.at(e.key));
    }
  }

  // The fully resolved configuration, for the run manifest.
  json resolved() const {
    json j = json::object();
    for (const auto& e : entries_) j[e.key] = e.get();
    return j;
  }

 private:
  struct Entry {
    CLI::Option* opt;
    std::string key;
    std::function<void(const json&)> set;
    std::function<json()> get;
  };

  static std::string key_of(const std::string& flag) {
    size_t i = flag.find_first_not_of('-');
    return flag.substr(i == std::string::npos ? flag.size() : i);
  }

  template <typename T>
  void note(CLI::Option* opt, const std::string& key, T& var) {
    entries_.push_back({opt, key, [&var](const json& v) { var = v.get<T>(); },
                        [&var]() { return json(var); }});
  }

  std::vector<Entry> entries_;
};

struct Command {
  CLI::App* sub = nullptr;
  Overlay overlay;
  std::string preset;
  std::string config_path;
  bool deterministic = false;
  std::function<int()> run;

  void add_common(CLI::App* s) {
    sub = s;
    s->add_option("--preset", preset, "named hyperparameter bundle");
    s->add_option("--config", config_path, "JSON file with flag values");
    s->add_flag("--deterministic", deterministic,
                "single worker, fully seeded execution");
  }

  int dispatch() {
    json preset_values = json::object();
    if (!preset.empty()) {
      const json& table = preset_table();
      if (!table.contains(preset)) {
        std::string known;
        for (auto& [name, _] : table.items()) known += "\n  " + name;
        throw UsageError("unknown preset '" + preset + "'; available:" + known);
      }
      preset_values = table.at(preset);
    }
    json config_values = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot read config file: " + config_path);
      config_values = json::parse(in);
      if (!config_values.is_object())
        throw std::runtime_error("config file must hold a JSON object: " + config_path);
    }
    overlay.apply(preset_values, config_values);
    return run();
  }
};

// ---------------------------------------------------------------------------
// Shared helpers.

void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const Command& cmd) {
  json j;
  j["subcommand"] = subcommand;
  j["version"] = kVersion;
  json cfg = cmd.overlay.resolved();
  cfg["preset"] = cmd.preset;
  cfg["config"] = cmd.config_path;
  cfg["deterministic"] = cmd.deterministic;
  j["config"] = cfg;
  std::string path = out_path + ".run.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  return out;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(std::move(tok));
  return out;
}

// Corpus input: a file with one document per line (id = line number) or a
// directory whose files, in byte-order of their names, are the documents.
void for_each_document(const std::string& input,
                       const std::function<void(uint32_t, const std::string&)>& fn) {
  namespace fs = std::filesystem;
  if (fs::is_directory(input)) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(input))
      if (e.is_regular_file()) names.push_back(e.path().string());
    std::sort(names.begin(), names.end());
    for (uint32_t id = 0; id < names.size(); ++id) {
      std::ifstream in(names[id], std::ios::binary);
      if (!in) throw std::runtime_error("cannot read: " + names[id]);
      std::ostringstream body;
      body << in.rdbuf();
      fn(id, body.str());
    }
    return;
  }
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot read: " + input);
  std::string line;
  uint32_t id = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(id++, line);
  }
}

uint64_t count_documents(const std::string& input) {
  uint64_t n = 0;
  for_each_document(input, [&](uint32_t, const std::string&) { ++n; });
  return n;
}

binarize::BinarizationStrategy parse_binarizer(const std::string& kind, double noise_std,
                                               bool anneal, double increment) {
  binarize::BinarizationStrategy s;
  if (kind == "none")
    s.kind = binarize::BinarizerKind::none;
  else if (kind == "krizhevsky")
    s.kind = binarize::BinarizerKind::krizhevsky;
  else if (kind == "gaussian")
    s.kind = binarize::BinarizerKind::gaussian;
  else if (kind == "bsn-identity")
    s.kind = binarize::BinarizerKind::bsn_identity;
  else if (kind == "bsn-sigmoid")
    s.kind = binarize::BinarizerKind::bsn_sigmoid;
  else
    throw UsageError("unknown binarizer '" + kind +
                     "' (none|krizhevsky|gaussian|bsn-identity|bsn-sigmoid)");
  s.noise_std = noise_std;
  s.anneal = anneal;
  s.anneal_increment = increment;
  return s;
}

corpus::PreprocessConfig make_preprocess_config(const std::string& stopwords_path,
                                                size_t min_len, size_t max_len,
                                                bool collapse_numbers) {
  corpus::PreprocessConfig cfg;
  if (!stopwords_path.empty()) cfg.stopwords = corpus::load_stopwords(stopwords_path);
  cfg.min_token_len = min_len;
  cfg.max_token_len = max_len;
  cfg.collapse_numbers = collapse_numbers;
  return cfg;
}

// Documents that generated no records still own an id; sizing by the highest
// id seen covers every id the records can touch.
int64_t docs_in_store(const corpus::ExampleStore& store) {
  if (store.variant() == corpus::StoreVariant::sg)
    throw std::logic_error("SG stores carry no document ids");
  auto r = store.reader();
  std::vector<uint32_t> buf(store.width() / 4);
  uint32_t max_doc = 0;
  bool any = false;
  while (r.next(buf.data())) {
    max_doc = std::max(max_doc, buf[0]);
    any = true;
  }
  if (!any) throw std::runtime_error("example store is empty: " + store.path());
  return static_cast<int64_t>(max_doc) + 1;
}

void check_vocab_hash(uint64_t model_hash, const corpus::Vocabulary& vocab,
                      const std::string& what) {
  if (model_hash != vocab.content_hash())
    throw std::runtime_error(what + " was trained with a different vocabulary");
}

std::string fmt_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Codes TSV: optional "#width<TAB>n" header, then "doc_id<TAB>hex" rows
// covering ids 0..n-1 in any order.
void write_codes_tsv(const std::string& path,
                     const std::vector<binarize::BinaryCode>& codes, uint32_t width) {
  auto out = open_out(path);
  out << "#width\t" << width << "\n";
  for (size_t i = 0; i < codes.size(); ++i) out << i << "\t" << codes[i].to_hex() << "\n";
}

std::vector<binarize::BinaryCode> load_codes_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read: " + path);
  std::string line;
  uint32_t width = 0;
  std::vector<std::pair<uint32_t, std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      size_t tab = line.find('\t');
      if (line.rfind("#width", 0) == 0 && tab != std::string::npos)
        width = static_cast<uint32_t>(std::stoul(line.substr(tab + 1)));
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string::npos) throw std::runtime_error("malformed codes row: " + line);
    rows.emplace_back(static_cast<uint32_t>(std::stoul(line.substr(0, tab))),
                      line.substr(tab + 1));
  }
  if (rows.empty()) throw std::runtime_error("no codes in: " + path);
  if (width == 0) width = static_cast<uint32_t>(rows.front().second.size() * 4);
  std::vector<binarize::BinaryCode> codes(rows.size());
  std::vector<uint8_t> seen(rows.size(), 0);
  for (const auto& [id, hex] : rows) {
    if (id >= codes.size() || seen[id])
      throw std::runtime_error("codes file must cover each doc id 0..n-1 exactly once");
    codes[id] = binarize::BinaryCode::from_hex(hex, width);
    seen[id] = 1;
  }
  return codes;
}

// Vectors TSV: "doc_id<TAB>v0 v1 v2 ..." rows covering ids 0..n-1.
void write_vectors_tsv(const std::string& path, const nncore::Matrix<float>& m) {
  auto out = open_out(path);
  for (int64_t r = 0; r < m.rows; ++r) {
    out << r << "\t";
    auto row = m.row(r);
    for (int64_t c = 0; c < m.cols; ++c) {
      if (c) out << ' ';
      out << fmt_float(row[c]);
    }
    out << "\n";
  }
}

nncore::Matrix<float> load_vectors_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read: " + path);
  std::string line;
  std::vector<std::pair<uint32_t, std::vector<float>>> rows;
  size_t dim = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) throw std::runtime_error("malformed vectors row: " + line);
    uint32_t id = static_cast<uint32_t>(std::stoul(line.substr(0, tab)));
    std::istringstream ss(line.substr(tab + 1));
    std::vector<float> v;
    float x;
    while (ss >> x) v.push_back(x);
    if (rows.empty())
      dim = v.size();
    else if (v.size() != dim)
      throw std::runtime_error("inconsistent vector width in: " + path);
    rows.emplace_back(id, std::move(v));
  }
  if (rows.empty() || dim == 0) throw std::runtime_error("no vectors in: " + path);
  nncore::Matrix<float> m(static_cast<int64_t>(rows.size()), static_cast<int64_t>(dim));
  std::vector<uint8_t> seen(rows.size(), 0);
  for (auto& [id, v] : rows) {
    if (id >= rows.size() || seen[id])
      throw std::runtime_error("vectors file must cover each doc id 0..n-1 exactly once");
    std::copy(v.begin(), v.end(), m.row(id).begin());
    seen[id] = 1;
  }
  return m;
}

char peek_model_magic(const std::string& path, char out[4]) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read: " + path);
  in.read(out, 4);
  if (!in) throw std::runtime_error("model file too short: " + path);
  return out[0];
}

// ---------------------------------------------------------------------------
// preprocess

std::unique_ptr<Command> make_preprocess(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand(
      "preprocess", "normalize raw text into one tokenized document per line");
  cmd->add_common(sub);
  struct S {
    std::string input, out, stopwords;
    uint64_t min_len = 2, max_len = 15;
    bool collapse_numbers = false;
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--input", st->input, "raw corpus: file (one doc per line) or directory")
      ->required();
  ov.bind(sub, "--out", st->out, "tokenized corpus file")->required();
  ov.bind(sub, "--stopwords", st->stopwords, "stopword list, one per line");
  ov.bind(sub, "--min-token-len", st->min_len, "shortest token kept");
  ov.bind(sub, "--max-token-len", st->max_len, "longest token kept");
  ov.bind_flag(sub, "--collapse-numbers", st->collapse_numbers,
               "replace all-digit tokens with a shared placeholder");
  Command* c = cmd.get();
  cmd->run = [st, c]() {
    auto cfg = make_preprocess_config(st->stopwords, st->min_len, st->max_len,
                                      st->collapse_numbers);
    auto out = open_out(st->out);
    uint64_t docs = 0, tokens = 0;
    for_each_document(st->input, [&](uint32_t, const std::string& text) {
      auto toks = corpus::preprocess_text(text, cfg);
      for (size_t i = 0; i < toks.size(); ++i) {
        if (i) out << ' ';
        out << toks[i];
      }
      out << '\n';
      ++docs;
      tokens += toks.size();
    });
    out.close();
    write_manifest(st->out, "preprocess", *c);
    std::printf("preprocess: %llu documents, %llu tokens -> %s\n",
                (unsigned long long)docs, (unsigned long long)tokens, st->out.c_str());
    return 0;
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// vocab

std::unique_ptr<Command> make_vocab(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand("vocab", "count n-grams and build the vocabulary");
  cmd->add_common(sub);
  struct S {
    std::string tokens, out;
    bool bigrams = false;
    uint64_t min_count = 1, max_terms = 0;
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--tokens", st->tokens, "tokenized corpus (preprocess output)")->required();
  ov.bind(sub, "--out", st->out, "vocabulary file")->required();
  ov.bind_flag(sub, "--bigrams", st->bigrams, "count adjacent-pair bigrams too");
  ov.bind(sub, "--min-count", st->min_count, "drop terms rarer than this");
  ov.bind(sub, "--max-terms", st->max_terms, "keep only the most frequent n terms (0 = all)");
  Command* c = cmd.get();
  cmd->run = [st, c]() {
    corpus::VocabCounter counter(st->bigrams);
    for_each_document(st->tokens, [&](uint32_t, const std::string& line) {
      counter.add_document(split_ws(line));
    });
    auto vocab = counter.build(st->min_count, st->max_terms == 0
                                                  ? std::nullopt
                                                  : std::optional<size_t>(st->max_terms));
    if (vocab.empty()) throw std::runtime_error("vocabulary is empty after filtering");
    vocab.save(st->out);
    write_manifest(st->out, "vocab", *c);
    std::printf("vocab: %zu terms (%zu unigrams, %zu bigrams) -> %s\n", vocab.size(),
                vocab.unigram_count(), vocab.size() - vocab.unigram_count(),
                st->out.c_str());
    return 0;
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// shuffle

std::unique_ptr<Command> make_shuffle(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand(
      "shuffle", "encode documents, generate training examples, globally shuffle");
  cmd->add_common(sub);
  struct S {
    std::string tokens, vocab, out, mode = "dbow", scratch;
    bool bigrams = false, one_sided = true;
    uint64_t window = 1, seed = 1, bucket_budget = 1 << 16;
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--tokens", st->tokens, "tokenized corpus")->required();
  ov.bind(sub, "--vocab", st->vocab, "vocabulary file")->required();
  ov.bind(sub, "--out", st->out, "shuffled example store")->required();
  ov.bind(sub, "--mode", st->mode, "example layout: dbow | dm | sg");
  ov.bind_flag(sub, "--bigrams", st->bigrams, "emit bigram targets too (dbow)");
  ov.bind(sub, "--window", st->window, "context window (dm, sg)");
  ov.bind_flag(sub, "--one-sided,!--two-sided", st->one_sided,
               "window covers preceding words only (dm)");
  ov.bind(sub, "--seed", st->seed, "shuffle permutation seed");
  ov.bind(sub, "--scratch", st->scratch, "bucket directory (default: <out>.scratch)");
  ov.bind(sub, "--bucket-budget", st->bucket_budget, "max records shuffled in memory");
  Command* c = cmd.get();
  cmd->run = [st, c]() {
    namespace fs = std::filesystem;
    auto vocab = corpus::Vocabulary::load(st->vocab);
    corpus::StoreVariant variant;
    uint32_t width;
    int window = static_cast<int>(st->window);
    if (window < 1) throw UsageError("--window must be >= 1");
    if (st->mode == "dbow") {
      variant = corpus::StoreVariant::dbow;
      width = corpus::dbow_record_width();
    } else if (st->mode == "dm") {
      variant = corpus::StoreVariant::dm;
      width = corpus::dm_record_width(window, st->one_sided);
    } else if (st->mode == "sg") {
      variant = corpus::StoreVariant::sg;
      width = corpus::sg_record_width(window);
    } else {
      throw UsageError("unknown mode '" + st->mode + "' (dbow|dm|sg)");
    }

    std::string spool_path = st->out + ".spool";
    std::vector<uint32_t> packed;
    corpus::RecordSpool spool(spool_path, width);
    for_each_document(st->tokens, [&](uint32_t id, const std::string& line) {
      auto enc = corpus::encode_document(id, split_ws(line), vocab);
      switch (variant) {
        case corpus::StoreVariant::dbow:
          corpus::generate_dbow(enc, vocab, st->bigrams, [&](const corpus::DbowRecord& r) {
            corpus::pack_dbow(r, packed);
            spool.append_words(packed);
          });
          break;
        case corpus::StoreVariant::dm:
          corpus::generate_dm(enc, window, st->one_sided, [&](const corpus::DmRecord& r) {
            corpus::pack_dm(r, packed);
            spool.append_words(packed);
          });
          break;
        case corpus::StoreVariant::sg:
          corpus::generate_sg(enc, window, [&](const corpus::SgRecord& r) {
            corpus::pack_sg(r, window, packed);
            spool.append_words(packed);
          });
          break;
      }
    });
    spool.close();
    if (spool.count() == 0) {
      fs::remove(spool_path);
      throw std::runtime_error("no training examples were generated");
    }

    std::string scratch = st->scratch.empty() ? st->out + ".scratch" : st->scratch;
    fs::create_directories(scratch);
    auto stats = corpus::global_shuffle(spool_path, variant, width, spool.count(), st->seed,
                                        st->out, scratch, st->bucket_budget);
    std::error_code ec;
    fs::remove(scratch, ec);  // only if empty
    write_manifest(st->out, "shuffle", *c);
    std::printf("shuffle: %llu records (width %u) -> %s  [%llu buckets, peak %llu in memory]\n",
                (unsigned long long)spool.count(), width, st->out.c_str(),
                (unsigned long long)stats.leaf_buckets,
                (unsigned long long)stats.max_resident_records);
    return 0;
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// train-pvdbow / train-pvdm / train-realbinary share most flags.

struct PvTrainFlags {
  std::string store, vocab, out;
  std::string binarizer = "krizhevsky";
  double noise_std = 0.4, anneal_increment = 0.1;
  bool anneal = false;
  uint64_t epochs = 10;
  double lr = 0.3, dropout_keep = 1.0;
  uint64_t batch_size = 128, negatives = 64, seed = 1, num_docs = 0;
  int workers = 1;

  void bind_common(CLI::App* sub, Overlay& ov) {
    ov.bind(sub, "--store", store, "shuffled example store")->required();
    ov.bind(sub, "--vocab", vocab, "vocabulary file")->required();
    ov.bind(sub, "--out", out, "model file")->required();
    ov.bind(sub, "--binarizer", binarizer,
            "coding layer: none | krizhevsky | gaussian | bsn-identity | bsn-sigmoid");
    ov.bind(sub, "--noise-std", noise_std, "gaussian binarizer noise std");
    ov.bind_flag(sub, "--anneal", anneal, "increase binarizer slope each epoch");
    ov.bind(sub, "--anneal-increment", anneal_increment, "slope increase per epoch");
    ov.bind(sub, "--epochs", epochs, "training epochs");
    ov.bind(sub, "--lr", lr, "AdaGrad learning rate");
    ov.bind(sub, "--dropout-keep", dropout_keep, "keep probability on the document signal");
    ov.bind(sub, "--batch-size", batch_size, "records per negative-sample draw");
    ov.bind(sub, "--negatives", negatives, "shared negative samples per batch");
    ov.bind(sub, "--seed", seed, "rng seed");
    ov.bind(sub, "--num-docs", num_docs, "document count (0 = derive from store)");
    ov.bind(sub, "--workers", workers, "training threads");
  }

  pvmodels::TrainConfig train_config(bool deterministic) const {
    pvmodels::TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.learning_rate = lr;
    cfg.batch_size = batch_size;
    cfg.negatives = negatives;
    cfg.dropout_keep = dropout_keep;
    cfg.seed = seed;
    cfg.workers = deterministic ? 1 : workers;
    return cfg;
  }
};

int run_pv_training(pvmodels::PvModel<float>& model, const PvTrainFlags& f,
                    const corpus::ExampleStore& store, const nncore::LogUniformSampler& sampler,
                    const Command& c, const std::string& subcommand) {
  auto cfg = f.train_config(c.deterministic);
  auto losses = train_pv(model, store, sampler, cfg);
  for (size_t e = 0; e < losses.size(); ++e)
    std::printf("epoch %zu  loss %.6f\n", e, losses[e]);
  pvmodels::save_pv_model(model, f.out);
  write_manifest(f.out, subcommand, c);
  std::printf("%s: %lld docs, %lld classes -> %s\n", subcommand.c_str(),
              (long long)model.num_docs(), (long long)model.num_classes(), f.out.c_str());
  return 0;
}

std::unique_ptr<Command> make_train_pvdbow(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand("train-pvdbow",
                                 "distributed bag of words, optionally with a coding layer");
  cmd->add_common(sub);
  auto st = std::make_shared<PvTrainFlags>();
  uint64_t dim_store = 32;
  auto dim = std::make_shared<uint64_t>(dim_store);
  st->bind_common(sub, cmd->overlay);
  cmd->overlay.bind(sub, "--dim", *dim, "embedding width (= code bits when binarized)");
  Command* c = cmd.get();
  cmd->run = [st, dim, c]() {
    auto vocab = corpus::Vocabulary::load(st->vocab);
    auto store = corpus::ExampleStore::open(st->store);
    if (store.variant() != corpus::StoreVariant::dbow)
      throw std::runtime_error("train-pvdbow needs a dbow example store");
    auto strat = parse_binarizer(st->binarizer, st->noise_std, st->anneal,
                                 st->anneal_increment);
    int64_t docs = st->num_docs ? static_cast<int64_t>(st->num_docs) : docs_in_store(store);
    auto model = pvmodels::make_pvdbow<float>(docs, static_cast<int64_t>(*dim),
                                              static_cast<int64_t>(vocab.size()), strat,
                                              st->seed);
    model.vocab_hash = vocab.content_hash();
    nncore::LogUniformSampler sampler(vocab.frequencies());
    return run_pv_training(model, *st, store, sampler, *c, "train-pvdbow");
  };
  return cmd;
}

std::unique_ptr<Command> make_train_pvdm(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand(
      "train-pvdm", "distributed memory: document + context words predict the center");
  cmd->add_common(sub);
  auto st = std::make_shared<PvTrainFlags>();
  st->lr = 1.2;
  struct E {
    uint64_t dim_doc = 300, dim_word = 300, window = 1;
    bool one_sided = true;
  };
  auto extra = std::make_shared<E>();
  st->bind_common(sub, cmd->overlay);
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--dim-doc", extra->dim_doc, "document embedding width");
  ov.bind(sub, "--dim-word", extra->dim_word, "word embedding width");
  ov.bind(sub, "--window", extra->window, "context window (must match the store)");
  ov.bind_flag(sub, "--one-sided,!--two-sided", extra->one_sided,
               "window covers preceding words only");
  Command* c = cmd.get();
  cmd->run = [st, extra, c]() {
    auto vocab = corpus::Vocabulary::load(st->vocab);
    auto store = corpus::ExampleStore::open(st->store);
    if (store.variant() != corpus::StoreVariant::dm)
      throw std::runtime_error("train-pvdm needs a dm example store");
    auto strat = parse_binarizer(st->binarizer, st->noise_std, st->anneal,
                                 st->anneal_increment);
    int64_t docs = st->num_docs ? static_cast<int64_t>(st->num_docs) : docs_in_store(store);
    auto model = pvmodels::make_pvdm<float>(
        docs, static_cast<int64_t>(extra->dim_doc), static_cast<int64_t>(extra->dim_word),
        static_cast<int64_t>(vocab.unigram_count()), static_cast<uint32_t>(extra->window),
        extra->one_sided, strat, st->seed);
    model.vocab_hash = vocab.content_hash();
    auto freqs = vocab.frequencies();
    freqs.resize(vocab.unigram_count());
    nncore::LogUniformSampler sampler(freqs);
    return run_pv_training(model, *st, store, sampler, *c, "train-pvdm");
  };
  return cmd;
}

std::unique_ptr<Command> make_train_realbinary(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand(
      "train-realbinary", "real embeddings with a projected binary code, trained jointly");
  cmd->add_common(sub);
  auto st = std::make_shared<PvTrainFlags>();
  struct E {
    uint64_t dim_real = 300, dim_bin = 28;
  };
  auto extra = std::make_shared<E>();
  st->bind_common(sub, cmd->overlay);
  cmd->overlay.bind(sub, "--dim-real", extra->dim_real, "real embedding width");
  cmd->overlay.bind(sub, "--dim-bin", extra->dim_bin, "binary code bits");
  Command* c = cmd.get();
  cmd->run = [st, extra, c]() {
    auto vocab = corpus::Vocabulary::load(st->vocab);
    auto store = corpus::ExampleStore::open(st->store);
    if (store.variant() != corpus::StoreVariant::dbow)
      throw std::runtime_error("train-realbinary needs a dbow example store");
    auto strat = parse_binarizer(st->binarizer, st->noise_std, st->anneal,
                                 st->anneal_increment);
    if (!strat.active())
      throw UsageError("train-realbinary requires an active binarizer");
    int64_t docs = st->num_docs ? static_cast<int64_t>(st->num_docs) : docs_in_store(store);
    auto model = pvmodels::make_realbinary<float>(
        docs, static_cast<int64_t>(extra->dim_real), static_cast<int64_t>(extra->dim_bin),
        static_cast<int64_t>(vocab.size()), strat, st->seed);
    model.vocab_hash = vocab.content_hash();
    nncore::LogUniformSampler sampler(vocab.frequencies());
    return run_pv_training(model, *st, store, sampler, *c, "train-realbinary");
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// train-dsg

std::unique_ptr<Command> make_train_dsg(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand(
      "train-dsg", "probabilistic multi-sense skip-gram: pretrain, finetune, marginals");
  cmd->add_common(sub);
  struct S {
    std::string store, vocab, out;
    uint64_t senses = 5, dim = 50;
    double gamma = 0.0, delta = 0.0, pretrain_gamma = -0.01, epsilon = 1e-8;
    double pretrain_lr = 1.0, temp_start = 1.0, temp_end = 0.5, prune_threshold = 0.05;
    std::vector<double> finetune_lrs{0.1, 0.05, 0.01};
    uint64_t batch_size = 128, negatives = 64, seed = 1;
    int workers = 1;
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--store", st->store, "shuffled sg example store")->required();
  ov.bind(sub, "--vocab", st->vocab, "vocabulary file")->required();
  ov.bind(sub, "--out", st->out, "model file")->required();
  ov.bind(sub, "--senses", st->senses, "senses per word");
  ov.bind(sub, "--dim", st->dim, "embedding width");
  ov.bind(sub, "--gamma", st->gamma, "finetune entropy cost");
  ov.bind(sub, "--delta", st->delta, "parallel-sense penalty weight");
  ov.bind(sub, "--pretrain-gamma", st->pretrain_gamma, "pretraining entropy weight");
  ov.bind(sub, "--epsilon", st->epsilon, "entropy / sampling floor");
  ov.bind(sub, "--pretrain-lr", st->pretrain_lr, "pretraining start learning rate");
  ov.bind(sub, "--finetune-lrs", st->finetune_lrs, "per-epoch finetune learning rates");
  ov.bind(sub, "--temp-start", st->temp_start, "relaxation temperature at finetune start");
  ov.bind(sub, "--temp-end", st->temp_end, "temperature after the first finetune epoch");
  ov.bind(sub, "--prune-threshold", st->prune_threshold,
          "deactivate senses below this marginal probability (negative = keep all)");
  ov.bind(sub, "--batch-size", st->batch_size, "records per negative-sample draw");
  ov.bind(sub, "--negatives", st->negatives, "shared negative samples per batch");
  ov.bind(sub, "--seed", st->seed, "rng seed");
  ov.bind(sub, "--workers", st->workers, "training threads");
  Command* c = cmd.get();
  cmd->run = [st, c]() {
    auto vocab = corpus::Vocabulary::load(st->vocab);
    auto store = corpus::ExampleStore::open(st->store);
    if (store.variant() != corpus::StoreVariant::sg)
      throw std::runtime_error("train-dsg needs an sg example store");
    if (st->senses == 0) throw UsageError("--senses must be >= 1");

    dsg::DsgTrainConfig cfg;
    cfg.pretrain_lr = st->pretrain_lr;
    cfg.pretrain_gamma = st->pretrain_gamma;
    cfg.finetune_lrs = st->finetune_lrs;
    cfg.gamma = st->gamma;
    cfg.delta = st->delta;
    cfg.eps = st->epsilon;
    cfg.temp_start = st->temp_start;
    cfg.temp_end = st->temp_end;
    cfg.negatives = st->negatives;
    cfg.batch_size = st->batch_size;
    cfg.seed = st->seed;
    cfg.workers = c->deterministic ? 1 : st->workers;

    dsg::SenseModel<float> model(vocab.unigram_count(),
                                 static_cast<uint32_t>(st->senses),
                                 static_cast<int64_t>(st->dim), st->seed);
    model.vocab_hash = vocab.content_hash();
    auto freqs = vocab.frequencies();
    freqs.resize(vocab.unigram_count());
    nncore::LogUniformSampler sampler(freqs);

    double pre = dsg::dsg_pretrain(model, store, sampler, cfg);
    std::printf("pretrain  loss %.6f\n", pre);
    model.broadcast_disambig();
    auto ft = dsg::dsg_finetune(model, store, sampler, cfg);
    for (size_t e = 0; e < ft.size(); ++e)
      std::printf("finetune %zu  loss %.6f\n", e, ft[e]);
    dsg::estimate_marginals(model, store, cfg.workers);
    double mean_active = static_cast<double>(model.senses.rows) /
                         std::max<double>(1.0, static_cast<double>(model.vocab()));
    if (st->prune_threshold >= 0.0) {
      mean_active = dsg::prune_senses(model, st->prune_threshold);
      std::printf("pruning at %.3f: %.2f active senses per word\n", st->prune_threshold,
                  mean_active);
    }
    dsg::save_sense_model(model, st->out);
    write_manifest(st->out, "train-dsg", *c);
    std::printf("train-dsg: %zu words x %u senses, dim %llu -> %s\n", model.vocab(),
                model.k, (unsigned long long)st->dim, st->out.c_str());
    return 0;
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// infer

std::unique_ptr<Command> make_infer(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand(
      "infer", "fit codes/embeddings for held-out documents against a frozen model");
  cmd->add_common(sub);
  struct S {
    std::string model, vocab, tokens, out, real_out, format = "auto";
    bool bigrams = false;
    uint64_t epochs = 0;  // 0 = same as --epochs default at train time (10)
    double lr = 0.3, dropout_keep = 1.0;
    uint64_t batch_size = 128, negatives = 64, seed = 1;
    int workers = 1;
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--model", st->model, "trained model file")->required();
  ov.bind(sub, "--vocab", st->vocab, "vocabulary file")->required();
  ov.bind(sub, "--tokens", st->tokens, "tokenized held-out documents")->required();
  ov.bind(sub, "--out", st->out, "output codes/vectors TSV")->required();
  ov.bind(sub, "--real-out", st->real_out,
          "also write the real embeddings TSV (two-stage search input)");
  ov.bind(sub, "--format", st->format, "output kind: auto | hex | real");
  ov.bind_flag(sub, "--bigrams", st->bigrams, "predict bigram targets too (match training)");
  ov.bind(sub, "--epochs", st->epochs, "inference epochs (0 = 10)");
  ov.bind(sub, "--lr", st->lr, "AdaGrad learning rate (use the training rate)");
  ov.bind(sub, "--dropout-keep", st->dropout_keep, "keep probability during inference");
  ov.bind(sub, "--batch-size", st->batch_size, "records per negative-sample draw");
  ov.bind(sub, "--negatives", st->negatives, "shared negative samples per batch");
  ov.bind(sub, "--seed", st->seed, "rng seed");
  ov.bind(sub, "--workers", st->workers, "inference threads");
  Command* c = cmd.get();
  cmd->run = [st, c]() {
    namespace fs = std::filesystem;
    auto vocab = corpus::Vocabulary::load(st->vocab);
    char magic[4];
    peek_model_magic(st->model, magic);
    if (std::string(magic, 4) == dsg::kSenseModelMagic)
      throw std::runtime_error("infer works on document models; got a sense model");
    auto model = pvmodels::load_pv_model<float>(st->model);
    check_vocab_hash(model.vocab_hash, vocab, "model");

    // Held-out docs go through the same example plumbing as training.
    std::string store_path = st->out + ".examples";
    std::string spool_path = store_path + ".spool";
    std::vector<uint32_t> packed;
    uint64_t num_docs = 0;
    {
      corpus::StoreVariant variant = model.kind == pvmodels::PvKind::pvdm
                                         ? corpus::StoreVariant::dm
                                         : corpus::StoreVariant::dbow;
      uint32_t width = variant == corpus::StoreVariant::dm
                           ? corpus::dm_record_width(static_cast<int>(model.window),
                                                     model.one_sided)
                           : corpus::dbow_record_width();
      corpus::RecordSpool spool(spool_path, width);
      for_each_document(st->tokens, [&](uint32_t id, const std::string& line) {
        ++num_docs;
        auto enc = corpus::encode_document(id, split_ws(line), vocab);
        if (variant == corpus::StoreVariant::dbow) {
          corpus::generate_dbow(enc, vocab, st->bigrams, [&](const corpus::DbowRecord& r) {
            corpus::pack_dbow(r, packed);
            spool.append_words(packed);
          });
        } else {
          corpus::generate_dm(enc, static_cast<int>(model.window), model.one_sided,
                              [&](const corpus::DmRecord& r) {
                                corpus::pack_dm(r, packed);
                                spool.append_words(packed);
                              });
        }
      });
      spool.close();
      if (num_docs == 0) throw std::runtime_error("no documents in: " + st->tokens);
      if (spool.count() == 0) {
        fs::remove(spool_path);
        throw std::runtime_error("no in-vocabulary examples in: " + st->tokens);
      }
      std::string scratch = store_path + ".scratch";
      fs::create_directories(scratch);
      corpus::global_shuffle(spool_path, variant, width, spool.count(), st->seed, store_path,
                             scratch);
      std::error_code ec;
      fs::remove(scratch, ec);
    }
    auto store = corpus::ExampleStore::open(store_path);

    pvmodels::TrainConfig cfg;
    cfg.epochs = st->epochs ? st->epochs : 10;
    cfg.learning_rate = st->lr;
    cfg.batch_size = st->batch_size;
    cfg.negatives = st->negatives;
    cfg.dropout_keep = st->dropout_keep;
    cfg.seed = st->seed;
    cfg.workers = c->deterministic ? 1 : st->workers;

    std::unique_ptr<nncore::LogUniformSampler> sampler;
    if (model.kind == pvmodels::PvKind::pvdm) {
      auto freqs = vocab.frequencies();
      freqs.resize(vocab.unigram_count());
      sampler = std::make_unique<nncore::LogUniformSampler>(freqs);
    } else {
      sampler = std::make_unique<nncore::LogUniformSampler>(vocab.frequencies());
    }
    auto result = pvmodels::infer_embeddings(model, store, static_cast<int64_t>(num_docs),
                                             *sampler, cfg);
    for (size_t e = 0; e < result.epoch_losses.size(); ++e)
      std::printf("infer epoch %zu  loss %.6f\n", e, result.epoch_losses[e]);
    std::error_code ec;
    fs::remove(store_path, ec);

    std::string format = st->format;
    if (format == "auto") format = model.binarizer.active() ? "hex" : "real";
    if (format == "hex") {
      if (!model.binarizer.active())
        throw UsageError("--format hex needs a model with a coding layer");
      std::vector<binarize::BinaryCode> codes;
      codes.reserve(num_docs);
      for (int64_t r = 0; r < result.embeddings.rows; ++r)
        codes.push_back(pvmodels::doc_binary_code(
            model, std::span<const float>(result.embeddings.row(r))));
      write_codes_tsv(st->out, codes, static_cast<uint32_t>(model.rep_width()));
    } else if (format == "real") {
      write_vectors_tsv(st->out, result.embeddings);
    } else {
      throw UsageError("unknown format '" + format + "' (auto|hex|real)");
    }
    if (!st->real_out.empty()) write_vectors_tsv(st->real_out, result.embeddings);

    uint64_t empty = 0;
    {
      auto flags = open_out(st->out + ".flags.tsv");
      for (size_t i = 0; i < result.seen.size(); ++i)
        if (!result.seen[i]) {
          flags << i << "\tempty\n";
          ++empty;
        }
    }
    write_manifest(st->out, "infer", *c);
    std::printf("infer: %llu documents (%llu without examples) -> %s\n",
                (unsigned long long)num_docs, (unsigned long long)empty, st->out.c_str());
    return 0;
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// search

std::unique_ptr<Command> make_search(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand(
      "search", "rank documents against a query document by code or two-stage search");
  cmd->add_common(sub);
  struct S {
    std::string codes, real, out;
    uint64_t query_id = 0, radius = 5, top = 10;
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--codes", st->codes, "binary codes TSV")->required();
  ov.bind(sub, "--real", st->real, "real vectors TSV (enables two-stage re-ranking)");
  ov.bind(sub, "--query-id", st->query_id, "query document id")->required();
  ov.bind(sub, "--radius", st->radius, "Hamming filter radius (two-stage only)");
  ov.bind(sub, "--top", st->top, "results to keep");
  ov.bind(sub, "--out", st->out, "ranking TSV")->required();
  Command* c = cmd.get();
  cmd->run = [st, c]() {
    auto codes = load_codes_tsv(st->codes);
    if (st->query_id >= codes.size())
      throw std::runtime_error("query id out of range (have " +
                               std::to_string(codes.size()) + " documents)");
    uint32_t q = static_cast<uint32_t>(st->query_id);
    evalir::RankedList ranked;
    const char* score_name;
    if (st->real.empty()) {
      ranked = evalir::rank_by_hamming(codes[q], codes, q);
      score_name = "hamming";
    } else {
      auto vm = load_vectors_tsv(st->real);
      if (static_cast<size_t>(vm.rows) != codes.size())
        throw std::runtime_error("--codes and --real disagree on document count");
      std::vector<std::vector<double>> vectors(vm.rows);
      for (int64_t r = 0; r < vm.rows; ++r)
        vectors[r].assign(vm.row(r).begin(), vm.row(r).end());
      evalir::HammingIndex index(codes);
      ranked = evalir::two_stage_search(codes[q], vectors[q], index, vectors,
                                        static_cast<uint32_t>(st->radius), q);
      score_name = "cosine";
    }
    if (ranked.size() > st->top) ranked.resize(st->top);
    auto out = open_out(st->out);
    out << "#rank\tdoc\t" << score_name << "\n";
    for (size_t i = 0; i < ranked.size(); ++i)
      out << i + 1 << "\t" << ranked[i].doc << "\t" << fmt_float(ranked[i].score) << "\n";
    out.close();
    write_manifest(st->out, "search", *c);
    std::printf("search: query %u, %zu results -> %s\n", q, ranked.size(), st->out.c_str());
    return 0;
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// eval-ir

std::unique_ptr<Command> make_eval_ir(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand(
      "eval-ir", "retrieval evaluation: MAP, NDCG@k and the precision-recall curve");
  cmd->add_common(sub);
  struct S {
    std::string codes, vectors, labels, out;
    std::string judge = "exact", overlap_denom = "jaccard";
    double threshold = 0.0, query_sample = 1.0;
    uint64_t ndcg_k = 10, sample_seed = 1, pr_levels = 200;
    int workers = 1;
    bool simhash = false;
    uint64_t simhash_bits = 32, simhash_seed = 1;
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--codes", st->codes, "binary codes TSV (Hamming ranking)");
  ov.bind(sub, "--vectors", st->vectors, "real vectors TSV (cosine ranking)");
  ov.bind(sub, "--labels", st->labels, "doc_id TAB comma-separated labels")->required();
  ov.bind(sub, "--out", st->out, "output prefix")->required();
  ov.bind(sub, "--judge", st->judge, "relevance: exact | overlap | shared");
  ov.bind(sub, "--overlap-denom", st->overlap_denom,
          "overlap normalizer: jaccard | query | min");
  ov.bind(sub, "--threshold", st->threshold, "graded relevance counts when above this");
  ov.bind(sub, "--ndcg-k", st->ndcg_k, "NDCG cutoff");
  ov.bind(sub, "--query-sample", st->query_sample, "fraction of documents used as queries");
  ov.bind(sub, "--sample-seed", st->sample_seed, "query sampling seed");
  ov.bind(sub, "--pr-levels", st->pr_levels, "precision-recall curve resolution");
  ov.bind(sub, "--workers", st->workers, "query threads");
  ov.bind_flag(sub, "--simhash", st->simhash,
               "hash --vectors into codes first (baseline)");
  ov.bind(sub, "--simhash-bits", st->simhash_bits, "simhash code width");
  ov.bind(sub, "--simhash-seed", st->simhash_seed, "simhash hyperplane seed");
  Command* c = cmd.get();
  cmd->run = [st, c]() {
    if (st->codes.empty() == st->vectors.empty())
      throw UsageError("pass exactly one of --codes / --vectors");
    if (st->simhash && st->vectors.empty())
      throw UsageError("--simhash needs --vectors");
    auto labels = corpus::load_labels(st->labels);

    evalir::EvalConfig cfg;
    if (st->judge == "exact")
      cfg.judge = evalir::JudgeKind::exact_label;
    else if (st->judge == "overlap")
      cfg.judge = evalir::JudgeKind::overlap_fraction;
    else if (st->judge == "shared")
      cfg.judge = evalir::JudgeKind::shared_category;
    else
      throw UsageError("unknown judge '" + st->judge + "' (exact|overlap|shared)");
    if (st->overlap_denom == "jaccard")
      cfg.overlap_denom = evalir::OverlapDenom::jaccard;
    else if (st->overlap_denom == "query")
      cfg.overlap_denom = evalir::OverlapDenom::query_size;
    else if (st->overlap_denom == "min")
      cfg.overlap_denom = evalir::OverlapDenom::min_size;
    else
      throw UsageError("unknown overlap denominator (jaccard|query|min)");
    cfg.relevance_threshold = st->threshold;
    cfg.ndcg_k = static_cast<int>(st->ndcg_k);
    cfg.query_sample = st->query_sample;
    cfg.sample_seed = st->sample_seed;
    cfg.pr_levels = static_cast<int>(st->pr_levels);
    cfg.workers = c->deterministic ? 1 : st->workers;

    evalir::EvalReport report;
    if (!st->codes.empty()) {
      report = evalir::evaluate_codes(load_codes_tsv(st->codes), labels, cfg);
    } else if (st->simhash) {
      auto vm = load_vectors_tsv(st->vectors);
      evalir::SimHash hasher(static_cast<size_t>(vm.cols),
                             static_cast<uint32_t>(st->simhash_bits), st->simhash_seed);
      std::vector<binarize::BinaryCode> codes;
      codes.reserve(vm.rows);
      std::vector<double> x(vm.cols);
      for (int64_t r = 0; r < vm.rows; ++r) {
        auto row = vm.row(r);
        std::copy(row.begin(), row.end(), x.begin());
        codes.push_back(hasher.code(x));
      }
      report = evalir::evaluate_codes(codes, labels, cfg);
    } else {
      report = evalir::evaluate_vectors(load_vectors_tsv(st->vectors), labels, cfg);
    }

    {
      auto out = open_out(st->out + ".metrics.tsv");
      out << "map\t" << fmt_float(report.map) << "\n";
      out << "ndcg@" << st->ndcg_k << "\t" << fmt_float(report.ndcg) << "\n";
      out << "queries_used\t" << report.queries_used << "\n";
      out << "queries_skipped\t" << report.queries_skipped << "\n";
    }
    {
      auto out = open_out(st->out + ".pr.tsv");
      out << "#recall\tprecision\n";
      for (size_t i = 0; i < report.curve.recall.size(); ++i)
        out << fmt_float(report.curve.recall[i]) << "\t"
            << fmt_float(report.curve.precision[i]) << "\n";
    }
    {
      json j;
      j["map"] = report.map;
      j["ndcg_k"] = st->ndcg_k;
      j["ndcg"] = report.ndcg;
      j["queries_used"] = report.queries_used;
      j["queries_skipped"] = report.queries_skipped;
      j["pr_recall"] = report.curve.recall;
      j["pr_precision"] = report.curve.precision;
      auto out = open_out(st->out + ".report.json");
      out << j.dump(2) << "\n";
    }
    write_manifest(st->out, "eval-ir", *c);
    std::printf("eval-ir: map %.4f  ndcg@%llu %.4f  (%zu queries, %zu skipped)\n", report.map,
                (unsigned long long)st->ndcg_k, report.ndcg, report.queries_used,
                report.queries_skipped);
    return 0;
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// eval-wsi

std::unique_ptr<Command> make_eval_wsi(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand(
      "eval-wsi", "sense induction (ARI) and contextual word similarity (Spearman)");
  cmd->add_common(sub);
  struct S {
    std::string model, vocab, out;
    std::string wsi, wsi_format = "semeval";
    std::string similarity, sim_format = "wordsim", metric = "avgsimc";
    std::string stopwords;
    uint64_t min_len = 2, max_len = 15;
    bool collapse_numbers = false, pooled = false;
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--model", st->model, "sense model file")->required();
  ov.bind(sub, "--vocab", st->vocab, "vocabulary file")->required();
  ov.bind(sub, "--out", st->out, "output prefix")->required();
  ov.bind(sub, "--wsi", st->wsi, "sense-induction TSV: target, gold label, context");
  ov.bind(sub, "--wsi-format", st->wsi_format, "wsi layout: semeval | wwsi");
  ov.bind_flag(sub, "--pooled", st->pooled,
               "single ARI over all instances instead of per-word macro average");
  ov.bind(sub, "--similarity", st->similarity, "similarity pairs TSV");
  ov.bind(sub, "--sim-format", st->sim_format, "pair layout: wordsim | scws");
  ov.bind(sub, "--metric", st->metric, "pair score: avgsimc | maxsimc | avgsim");
  ov.bind(sub, "--stopwords", st->stopwords, "stopword list for context preprocessing");
  ov.bind(sub, "--min-token-len", st->min_len, "shortest context token kept");
  ov.bind(sub, "--max-token-len", st->max_len, "longest context token kept");
  ov.bind_flag(sub, "--collapse-numbers", st->collapse_numbers,
               "collapse digit tokens in contexts");
  Command* c = cmd.get();
  cmd->run = [st, c]() {
    if (st->wsi.empty() && st->similarity.empty())
      throw UsageError("pass --wsi and/or --similarity");
    auto vocab = corpus::Vocabulary::load(st->vocab);
    auto model = dsg::load_sense_model<float>(st->model);
    check_vocab_hash(model.vocab_hash, vocab, "sense model");
    auto pp = make_preprocess_config(st->stopwords, st->min_len, st->max_len,
                                     st->collapse_numbers);

    json j;
    auto metrics = open_out(st->out + ".metrics.tsv");
    if (!st->wsi.empty()) {
      evalwsi::WsiFormat fmt;
      if (st->wsi_format == "semeval")
        fmt = evalwsi::WsiFormat::semeval;
      else if (st->wsi_format == "wwsi")
        fmt = evalwsi::WsiFormat::wwsi_tsv;
      else
        throw UsageError("unknown wsi format (semeval|wwsi)");
      auto data = evalwsi::load_wsi_dataset(st->wsi, fmt, pp);
      auto score = evalwsi::score_wsi(model, vocab, data.instances, st->pooled);
      metrics << "ari\t" << fmt_float(score.ari) << "\n";
      metrics << "wsi_words\t" << score.words_scored << "\n";
      metrics << "wsi_instances\t" << score.instances_used << "\n";
      metrics << "wsi_targets_oov\t" << score.targets_oov << "\n";
      metrics << "wsi_marginal_fallbacks\t" << score.marginal_fallbacks << "\n";
      j["ari"] = score.ari;
      j["wsi_words"] = score.words_scored;
      j["wsi_instances"] = score.instances_used;
      j["wsi_targets_oov"] = score.targets_oov;
      j["wsi_marginal_fallbacks"] = score.marginal_fallbacks;
      j["wsi_malformed"] = data.malformed;
      j["pooled"] = st->pooled;
      std::printf("eval-wsi: ari %.4f over %zu words (%zu instances)\n", score.ari,
                  score.words_scored, score.instances_used);
    }
    if (!st->similarity.empty()) {
      evalwsi::SimilarityFormat fmt;
      if (st->sim_format == "wordsim")
        fmt = evalwsi::SimilarityFormat::wordsim;
      else if (st->sim_format == "scws")
        fmt = evalwsi::SimilarityFormat::scws;
      else
        throw UsageError("unknown similarity format (wordsim|scws)");
      evalwsi::SimilarityMetric metric;
      if (st->metric == "avgsimc")
        metric = evalwsi::SimilarityMetric::avg_sim_c;
      else if (st->metric == "maxsimc")
        metric = evalwsi::SimilarityMetric::max_sim_c;
      else if (st->metric == "avgsim")
        metric = evalwsi::SimilarityMetric::avg_sim;
      else
        throw UsageError("unknown metric (avgsimc|maxsimc|avgsim)");
      auto data = evalwsi::load_similarity_dataset(st->similarity, fmt, pp);
      auto score = evalwsi::score_similarity(model, vocab, data.pairs, metric);
      metrics << "spearman\t" << fmt_float(score.spearman) << "\n";
      metrics << "sim_pairs_used\t" << score.pairs_used << "\n";
      metrics << "sim_pairs_skipped\t" << score.pairs_skipped << "\n";
      j["spearman"] = score.spearman;
      j["sim_metric"] = st->metric;
      j["sim_pairs_used"] = score.pairs_used;
      j["sim_pairs_skipped"] = score.pairs_skipped;
      j["sim_malformed"] = data.malformed;
      std::printf("eval-wsi: spearman %.4f over %zu pairs (%zu skipped)\n", score.spearman,
                  score.pairs_used, score.pairs_skipped);
    }
    metrics.close();
    {
      auto out = open_out(st->out + ".report.json");
      out << j.dump(2) << "\n";
    }
    write_manifest(st->out, "eval-wsi", *c);
    return 0;
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// neighbors

std::unique_ptr<Command> make_neighbors(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub =
      app.add_subcommand("neighbors", "nearest sense embeddings of a word's senses");
  cmd->add_common(sub);
  struct S {
    std::string model, vocab, word, out;
    int64_t sense = -1;
    uint64_t top = 10;
    bool merge = false;
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--model", st->model, "sense model file")->required();
  ov.bind(sub, "--vocab", st->vocab, "vocabulary file")->required();
  ov.bind(sub, "--word", st->word, "query word")->required();
  ov.bind(sub, "--sense", st->sense, "sense index (-1 = every active sense)");
  ov.bind(sub, "--top", st->top, "neighbors per sense");
  ov.bind_flag(sub, "--merge-senses", st->merge, "keep only each word's best sense");
  ov.bind(sub, "--out", st->out, "also write the table to this TSV");
  Command* c = cmd.get();
  cmd->run = [st, c]() {
    auto vocab = corpus::Vocabulary::load(st->vocab);
    auto model = dsg::load_sense_model<float>(st->model);
    check_vocab_hash(model.vocab_hash, vocab, "sense model");
    uint32_t word = dsg::require_word(vocab, st->word);

    std::vector<uint32_t> senses;
    if (st->sense >= 0) {
      if (st->sense >= model.k) throw UsageError("sense index out of range");
      senses.push_back(static_cast<uint32_t>(st->sense));
    } else {
      for (uint32_t s = 0; s < model.k; ++s)
        if (model.sense_active(word, s)) senses.push_back(s);
    }

    std::ofstream file;
    if (!st->out.empty()) file = open_out(st->out);
    for (uint32_t s : senses) {
      auto the_list = dsg::nearest_senses(model, word, s, st->top, st->merge);
      std::printf("%s/%u  (marginal %.3f)\n", st->word.c_str(), s,
                  model.marginals.row(word)[s]);
      for (const auto& n : the_list) {
        const std::string& surface = vocab.term(n.word).surface;
        std::printf("  %-24s sense %u  cos %.4f\n", surface.c_str(), n.sense, n.score);
        if (file.is_open())
          file << st->word << "\t" << s << "\t" << surface << "\t" << n.sense << "\t"
               << fmt_float(n.score) << "\n";
      }
    }
    if (file.is_open()) {
      file.close();
      write_manifest(st->out, "neighbors", *c);
    }
    return 0;
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// export

std::unique_ptr<Command> make_export(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand("export", "write model tables as TSV");
  cmd->add_common(sub);
  struct S {
    std::string model, vocab, out;
    std::string what = "codes";
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--model", st->model, "model file")->required();
  ov.bind(sub, "--vocab", st->vocab, "vocabulary (needed for word-level exports)");
  ov.bind(sub, "--out", st->out, "output TSV")->required();
  ov.bind(sub, "--what", st->what,
          "codes | embeddings | word-embeddings | senses | marginals");
  Command* c = cmd.get();
  cmd->run = [st, c]() {
    char magic[4];
    peek_model_magic(st->model, magic);
    bool is_sense = std::string(magic, 4) == dsg::kSenseModelMagic;

    std::optional<corpus::Vocabulary> vocab;
    if (!st->vocab.empty()) vocab = corpus::Vocabulary::load(st->vocab);

    if (is_sense) {
      auto model = dsg::load_sense_model<float>(st->model);
      if (!vocab) throw UsageError("sense exports need --vocab");
      check_vocab_hash(model.vocab_hash, *vocab, "sense model");
      if (st->what == "senses") {
        auto out = open_out(st->out);
        for (size_t w = 0; w < model.vocab(); ++w)
          for (uint32_t s = 0; s < model.k; ++s) {
            if (!model.sense_active(static_cast<uint32_t>(w), s)) continue;
            out << vocab->term(static_cast<uint32_t>(w)).surface << "\t" << s << "\t";
            auto row = model.sense(static_cast<uint32_t>(w), s);
            for (int64_t i = 0; i < model.d; ++i) {
              if (i) out << ' ';
              out << fmt_float(row[i]);
            }
            out << "\n";
          }
      } else if (st->what == "marginals") {
        auto out = open_out(st->out);
        for (size_t w = 0; w < model.vocab(); ++w) {
          out << vocab->term(static_cast<uint32_t>(w)).surface;
          auto row = model.marginals.row(static_cast<int64_t>(w));
          for (uint32_t s = 0; s < model.k; ++s) out << "\t" << fmt_float(row[s]);
          out << "\n";
        }
      } else {
        throw UsageError("sense models export --what senses|marginals");
      }
    } else {
      auto model = pvmodels::load_pv_model<float>(st->model);
      if (vocab) check_vocab_hash(model.vocab_hash, *vocab, "model");
      if (st->what == "codes") {
        if (!model.binarizer.active())
          throw UsageError("model has no coding layer; export --what embeddings");
        auto codes = pvmodels::all_binary_codes(model, model.doc_embeddings);
        write_codes_tsv(st->out, codes, static_cast<uint32_t>(model.rep_width()));
      } else if (st->what == "embeddings") {
        write_vectors_tsv(st->out, model.doc_embeddings);
      } else if (st->what == "word-embeddings") {
        if (model.kind != pvmodels::PvKind::pvdm)
          throw UsageError("only distributed-memory models hold word embeddings");
        if (!vocab) throw UsageError("word exports need --vocab");
        auto out = open_out(st->out);
        for (int64_t w = 0; w < model.word_embeddings.rows; ++w) {
          out << vocab->term(static_cast<uint32_t>(w)).surface << "\t";
          auto row = model.word_embeddings.row(w);
          for (int64_t i = 0; i < model.word_embeddings.cols; ++i) {
            if (i) out << ' ';
            out << fmt_float(row[i]);
          }
          out << "\n";
        }
      } else {
        throw UsageError("document models export --what codes|embeddings|word-embeddings");
      }
    }
    write_manifest(st->out, "export", *c);
    std::printf("export: %s -> %s\n", st->what.c_str(), st->out.c_str());
    return 0;
  };
  return cmd;
}

// ---------------------------------------------------------------------------
// gradcheck

std::unique_ptr<Command> make_gradcheck(CLI::App& app) {
  auto cmd = std::make_unique<Command>();
  auto* sub = app.add_subcommand(
      "gradcheck", "finite-difference verification of every analytic gradient");
  cmd->add_common(sub);
  struct S {
    std::string model = "all";
    uint64_t seed = 7, instances = 20;
    double tolerance = 1e-4;
  };
  auto st = std::make_shared<S>();
  Overlay& ov = cmd->overlay;
  ov.bind(sub, "--model", st->model,
          "all | pvdbow | pvdbow-coded | pvdm | realbinary | dsg | dsg-pretrain | "
          "dsg-finetune");
  ov.bind(sub, "--seed", st->seed, "rng seed");
  ov.bind(sub, "--instances", st->instances, "random instances per model");
  ov.bind(sub, "--tolerance", st->tolerance, "max relative error accepted");
  cmd->run = [st]() {
    auto results = gradcheck::run_suite(st->seed, static_cast<int>(st->instances));
    auto wanted = [&](const std::string& name) {
      if (st->model == "all") return true;
      if (st->model == "dsg") return name.rfind("dsg", 0) == 0;
      if (st->model == "pvdbow") return name.rfind("pvdbow", 0) == 0;
      return name == st->model;
    };
    bool matched = false, ok = true;
    for (const auto& r : results) {
      if (!wanted(r.name)) continue;
      matched = true;
      bool pass = r.max_rel_err <= st->tolerance;
      ok = ok && pass;
      std::printf("%-16s max rel err %.3e  [%s]\n", r.name.c_str(), r.max_rel_err,
                  pass ? "ok" : "FAIL");
    }
    if (!matched) throw UsageError("unknown gradcheck model '" + st->model + "'");
    return ok ? 0 : 2;
  };
  return cmd;
}

}  // namespace textvec::cli

int main(int argc, char** argv) {
  using namespace textvec::cli;
  CLI::App app{"binary paragraph vectors and multi-sense word embeddings"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Command>> commands;
  commands.push_back(make_preprocess(app));
  commands.push_back(make_vocab(app));
  commands.push_back(make_shuffle(app));
  commands.push_back(make_train_pvdbow(app));
  commands.push_back(make_train_pvdm(app));
  commands.push_back(make_train_realbinary(app));
  commands.push_back(make_train_dsg(app));
  commands.push_back(make_infer(app));
  commands.push_back(make_search(app));
  commands.push_back(make_eval_ir(app));
  commands.push_back(make_eval_wsi(app));
  commands.push_back(make_neighbors(app));
  commands.push_back(make_export(app));
  commands.push_back(make_gradcheck(app));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (auto& cmd : commands) {
    if (!cmd->sub->parsed()) continue;
    try {
      return cmd->dispatch();
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}
