// retronlu: retrieval-augmented task-oriented semantic parsing pipeline.
//
// Stages communicate only through documented files (TSV, index, JSON), so
// any of them can be swapped for an external tool:
//
//   ingest -> build-index -> query / augment / predict -> eval, plus subset.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "retronlu/augment.hpp"
#include "retronlu/corpus.hpp"
#include "retronlu/embedding.hpp"
#include "retronlu/error.hpp"
#include "retronlu/evaluation.hpp"
#include "retronlu/knnparser.hpp"
#include "retronlu/topformat.hpp"
#include "retronlu/vindex.hpp"

namespace {

using namespace retronlu;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct EmbedderFlags {
  std::string kind = "hashed";  // hashed | file
  int dim = 256;
  std::uint64_t seed = 0;
  std::string file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--embedder", kind, "Embedding source")
        ->check(CLI::IsMember({"hashed", "file"}))
        ->capture_default_str();
    cmd->add_option("--dim", dim, "Hashed embedder dimension")->capture_default_str();
    cmd->add_option("--embed-seed", seed, "Hashed embedder seed")->capture_default_str();
    cmd->add_option("--embed-file", file, "Embedding file for --embedder file");
  }

  Embedder make(const std::set<std::string>& expected_ids = {}) const {
    if (kind == "hashed") {
      int d = dim;
      std::uint64_t s = seed;
      return [d, s](const std::string& utterance, const std::string&) {
        return embed_hashed(utterance, d, s);
      };
    }
    if (file.empty())
      throw CLI::ValidationError("--embed-file is required with --embedder file");
    auto table = std::make_shared<EmbeddingTable>(load_embeddings(file, expected_ids));
    return [table](const std::string&, const std::string& id) {
      auto it = table->entries.find(id);
      if (it == table->entries.end())
        throw Error(Errc::MissingId, "no embedding for id '" + id + "'");
      return it->second;
    };
  }

  ordered_json config() const {
    ordered_json j;
    j["kind"] = kind;
    if (kind == "hashed") {
      j["dim"] = dim;
      j["seed"] = seed;
    } else {
      j["file"] = file;
    }
    return j;
  }
};

ExclusionKind parse_exclusion(const std::string& s) {
  if (s == "none") return ExclusionKind::None;
  if (s == "id") return ExclusionKind::ById;
  if (s == "text") return ExclusionKind::ByText;
  if (s == "id+text") return ExclusionKind::ByIdAndText;
  throw CLI::ValidationError("unknown exclusion '" + s + "'");
}

NeighborPolicy::Kind parse_policy(const std::string& s) {
  if (s == "top-k") return NeighborPolicy::Kind::TopK;
  if (s == "random-top-m") return NeighborPolicy::Kind::RandomTopM;
  if (s == "cross-domain") return NeighborPolicy::Kind::CrossDomainRandom;
  if (s == "oracle-skeleton") return NeighborPolicy::Kind::OracleSkeleton;
  throw CLI::ValidationError("unknown policy '" + s + "'");
}

IngestOptions::Header parse_header_flag(const std::string& s) {
  if (s == "auto") return IngestOptions::Header::Auto;
  if (s == "yes") return IngestOptions::Header::Yes;
  if (s == "no") return IngestOptions::Header::No;
  throw CLI::ValidationError("unknown --has-header value '" + s + "'");
}

VectorIndex build_index_from(const Corpus& train, const Embedder& embed) {
  std::vector<IndexEntry> entries;
  entries.reserve(train.size());
  for (const UtteranceRecord& rec : train.records())
    entries.push_back({rec.id, embed(rec.utterance, rec.id), rec.domain, rec.utterance});
  return VectorIndex::build(entries);
}

int run(int argc, char** argv) {
  CLI::App app{"RetroNLU retrieval-augmented semantic parsing toolkit"};
  app.require_subcommand(1);

  // ---- ingest ----------------------------------------------------------
  std::string in_tsv, split = "train", header_flag = "auto";
  bool skip_bad = false;
  auto* ingest = app.add_subcommand("ingest", "Validate a TSV and print a corpus summary");
  ingest->add_option("tsv", in_tsv, "Input TSV (domain\\tutterance\\tsemparse)")->required();
  ingest->add_option("--split", split, "Split name used for record ids")->capture_default_str();
  ingest->add_option("--has-header", header_flag, "auto|yes|no")->capture_default_str();
  ingest->add_flag("--skip-bad", skip_bad, "Skip rows that fail to parse");

  // ---- build-index -----------------------------------------------------
  std::string out_index;
  EmbedderFlags bi_embed;
  auto* build = app.add_subcommand("build-index", "Embed a training TSV and write an index file");
  build->add_option("tsv", in_tsv, "Training TSV")->required();
  build->add_option("out", out_index, "Output index path")->required();
  build->add_option("--split", split, "Split name")->capture_default_str();
  build->add_option("--has-header", header_flag)->capture_default_str();
  bi_embed.attach(build);

  // ---- query -----------------------------------------------------------
  std::string index_path, q_utterance, q_id, exclude_flag = "none";
  int k = 1;
  EmbedderFlags q_embed;
  auto* query = app.add_subcommand("query", "Retrieve nearest neighbors for one utterance");
  query->add_option("index", index_path, "Index file")->required();
  query->add_option("--utterance", q_utterance, "Query utterance")->required();
  query->add_option("--id", q_id, "Query record id (for --exclude id)");
  query->add_option("--k", k, "Neighbors to return")->capture_default_str();
  query->add_option("--exclude", exclude_flag, "none|id|text|id+text")->capture_default_str();
  q_embed.attach(query);

  // ---- augment ---------------------------------------------------------
  std::string train_tsv, out_tsv, mode_flag = "semparse-nn", policy_flag = "top-k";
  int m = 100;
  std::uint64_t seed = 0;
  EmbedderFlags a_embed;
  auto* augment = app.add_subcommand("augment", "Write a retrieval-augmented TSV");
  augment->add_option("tsv", in_tsv, "Corpus TSV to augment")->required();
  augment->add_option("index", index_path, "Index file")->required();
  augment->add_option("out", out_tsv, "Output augmented TSV")->required();
  augment->add_option("--train", train_tsv, "Training TSV backing the index")->required();
  augment->add_option("--split", split, "Split name of the corpus")->capture_default_str();
  augment->add_option("--has-header", header_flag)->capture_default_str();
  augment->add_option("--mode", mode_flag, "utterance-nn|semparse-nn")->capture_default_str();
  augment->add_option("--k", k, "Neighbors per example")->capture_default_str();
  augment->add_option("--policy", policy_flag, "top-k|random-top-m|cross-domain|oracle-skeleton")
      ->capture_default_str();
  augment->add_option("--m", m, "Pool size for random-top-m")->capture_default_str();
  augment->add_option("--exclude", exclude_flag, "none|id|text|id+text")->capture_default_str();
  augment->add_option("--seed", seed, "Seed for sampled policies")->capture_default_str();
  a_embed.attach(augment);

  // ---- predict ---------------------------------------------------------
  std::string out_preds;
  EmbedderFlags p_embed;
  auto* predict = app.add_subcommand("predict", "kNN frame-transfer predictions for a test TSV");
  predict->add_option("tsv", in_tsv, "Test TSV")->required();
  predict->add_option("index", index_path, "Index file")->required();
  predict->add_option("out", out_preds, "Output predictions TSV")->required();
  predict->add_option("--train", train_tsv, "Training TSV backing the index")->required();
  predict->add_option("--split", split, "Split name of the test corpus")->capture_default_str();
  predict->add_option("--has-header", header_flag)->capture_default_str();
  predict->add_option("--policy", policy_flag)->capture_default_str();
  predict->add_option("--m", m)->capture_default_str();
  predict->add_option("--exclude", exclude_flag)->capture_default_str();
  predict->add_option("--seed", seed)->capture_default_str();
  p_embed.attach(predict);

  // ---- eval ------------------------------------------------------------
  std::string preds_path, report_path, slices_flag;
  auto* eval = app.add_subcommand("eval", "Score predictions and emit a JSON report");
  eval->add_option("tsv", in_tsv, "Test TSV with golds")->required();
  eval->add_option("preds", preds_path, "Predictions TSV")->required();
  eval->add_option("--train", train_tsv, "Training TSV (enables frequency slicing)");
  eval->add_option("--split", split, "Split name")->capture_default_str();
  eval->add_option("--has-header", header_flag)->capture_default_str();
  eval->add_option("--slices", slices_flag, "Comma list of complexity,frequency");
  eval->add_option("--out", report_path, "Report path (default: stdout)");

  // ---- subset ----------------------------------------------------------
  std::string fractions_flag, out_prefix;
  auto* subset = app.add_subcommand("subset", "Write incremental limited-training subsets");
  subset->add_option("tsv", in_tsv, "Training TSV")->required();
  subset->add_option("--fractions", fractions_flag, "Comma list of percentages, e.g. 10,20,50")
      ->required();
  subset->add_option("--out-prefix", out_prefix, "Output path prefix")->required();
  subset->add_option("--split", split)->capture_default_str();
  subset->add_option("--has-header", header_flag)->capture_default_str();
  subset->add_option("--seed", seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);  // prints help or the usage error
    return rc == 0 ? 0 : kExitUsage;
  }

  IngestOptions opts;
  opts.header = parse_header_flag(header_flag);
  opts.skip_bad_rows = skip_bad;

  if (*ingest) {
    IngestStats stats;
    Corpus c = ingest_tsv(in_tsv, split, opts, &stats);
    std::map<std::string, long> by_domain;
    std::map<int, long> by_depth;
    for (const auto& r : c.records()) ++by_domain[r.domain], ++by_depth[r.depth];
    std::cout << "split: " << split << "\nrecords: " << c.size() << "\ndomains:\n";
    for (const auto& [d, n] : by_domain) std::cout << "  " << d << ": " << n << "\n";
    std::cout << "depth histogram:\n";
    for (const auto& [d, n] : by_depth) std::cout << "  " << d << ": " << n << "\n";
    if (stats.skipped) {
      std::cout << "skipped rows: " << stats.skipped << "\n";
      for (const auto& [row, msg] : stats.errors)
        std::cout << "  row " << row << ": " << msg << "\n";
    }
    return 0;
  }

  if (*build) {
    Corpus train = ingest_tsv(in_tsv, split, opts);
    build_index_from(train, bi_embed.make()).save(out_index);
    std::cout << "indexed " << train.size() << " records -> " << out_index << "\n";
    return 0;
  }

  if (*query) {
    VectorIndex ix = VectorIndex::load(index_path);
    Embedder embed = q_embed.make();
    ExclusionKind ek = parse_exclusion(exclude_flag);
    UtteranceRecord rec;
    rec.id = q_id;
    rec.utterance = q_utterance;
    NeighborList nl = ix.query(embed(q_utterance, q_id), k, exclusion_for(ek, rec));
    for (const auto& e : nl.entries) {
      int pos = ix.position_of(e.id);
      std::cout << e.id << '\t' << e.distance << '\t' << ix.utterance_of(pos) << '\n';
    }
    return 0;
  }

  if (*augment || *predict) {
    const EmbedderFlags& flags = *augment ? a_embed : p_embed;
    Corpus corpus = ingest_tsv(in_tsv, split, opts);
    Corpus train = ingest_tsv(train_tsv, "train", opts);
    VectorIndex ix = VectorIndex::load(index_path);
    if (ix.size() == 0) throw Error(Errc::EmptyIndex, index_path);

    std::set<std::string> ids;
    for (const auto& r : corpus.records()) ids.insert(r.id);
    Embedder embed = flags.make(ids);

    AugmentConfig cfg;
    cfg.mode = mode_flag == "utterance-nn" ? AugmentMode::UtteranceNN : AugmentMode::SemparseNN;
    cfg.k = k;
    cfg.policy.kind = parse_policy(policy_flag);
    cfg.policy.m = m;
    cfg.policy.exclusion = parse_exclusion(exclude_flag);
    cfg.seed = seed;

    if (*augment) {
      write_augmented_tsv(augment_corpus(corpus, ix, cfg, train, embed), out_tsv);
      std::cout << "augmented " << corpus.size() << " records -> " << out_tsv << "\n";
    } else {
      KnnParserConfig pcfg;
      pcfg.retrieval = cfg;
      PredictionSet preds;
      preds.split_name = split;
      for (const UtteranceRecord& rec : corpus.records())
        preds.preds[rec.id] = knn_predict(rec, embed(rec.utterance, rec.id), ix, train, pcfg);
      save_predictions(preds, out_preds);
      std::cout << "predicted " << preds.preds.size() << " records -> " << out_preds << "\n";
    }
    return 0;
  }

  if (*eval) {
    Corpus corpus = ingest_tsv(in_tsv, split, opts);
    PredictionSet preds = load_predictions(preds_path, corpus);
    EvalReport report = evaluate(corpus, preds);

    std::vector<const UtteranceRecord*> recs;
    std::vector<bool> matched;
    for (const UtteranceRecord& rec : corpus.records()) {
      recs.push_back(&rec);
      auto it = preds.preds.find(rec.id);
      bool ok = false;
      if (it != preds.preds.end()) {
        try {
          ok = serialize(canonicalize(parse_top(it->second))) == rec.canonical;
        } catch (const Error&) {
        }
      }
      matched.push_back(ok);
    }
    bool want_complexity = slices_flag.find("complexity") != std::string::npos;
    bool want_frequency = slices_flag.find("frequency") != std::string::npos;
    if (want_complexity) report.slices.push_back(slice_complexity(recs, matched));
    if (want_frequency) {
      if (train_tsv.empty())
        throw CLI::ValidationError("--slices frequency needs --train");
      Corpus train = ingest_tsv(train_tsv, "train", opts);
      report.slices.push_back(slice_frequency(recs, train, matched));
    }

    ordered_json cfg;
    cfg["test"] = in_tsv;
    cfg["preds"] = preds_path;
    if (!train_tsv.empty()) cfg["train"] = train_tsv;
    cfg["slices"] = slices_flag;
    cfg["split"] = split;
    std::string json = report_to_json(report, cfg.dump());
    if (report_path.empty()) std::cout << json;
    else emit_report(report, report_path, cfg.dump());
    return 0;
  }

  if (*subset) {
    Corpus c = ingest_tsv(in_tsv, split, opts);
    std::vector<double> fractions;
    std::stringstream ss(fractions_flag);
    std::string item;
    while (std::getline(ss, item, ',')) fractions.push_back(std::stod(item));
    std::vector<Corpus> subs = subset_incremental(c, fractions, seed);
    for (size_t i = 0; i < subs.size(); ++i) {
      std::string path = out_prefix + std::to_string(static_cast<long>(fractions[i])) + ".tsv";
      std::ofstream out(path);
      if (!out) throw Error(Errc::IoError, "cannot write " + path);
      for (const auto& r : subs[i].records())
        out << r.domain << '\t' << r.utterance << '\t' << r.semparse << '\n';
      std::cout << "wrote " << subs[i].size() << " records -> " << path << "\n";
    }
    return 0;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const retronlu::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
