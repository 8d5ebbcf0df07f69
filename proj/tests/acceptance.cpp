// Acceptance suite: one test case per criterion, one PASS line each.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "reference_strings.hpp"
#include "retronlu/augment.hpp"
#include "retronlu/evaluation.hpp"
#include "retronlu/hashing.hpp"
#include "retronlu/knnparser.hpp"
#include "synthetic_corpus.hpp"

using namespace retronlu;

namespace {

void pass(int criterion, const char* what) {
  std::cout << "[criterion " << criterion << "] PASS: " << what << std::endl;
}

std::vector<MatchResult> synthetic_results(const std::vector<double>& accuracies) {
  std::vector<MatchResult> out;
  for (size_t d = 0; d < accuracies.size(); ++d) {
    long matched = std::lround(accuracies[d] * 100.0);
    for (long i = 0; i < 10000; ++i)
      out.push_back({"dom" + std::to_string(d), i < matched});
  }
  return out;
}

Embedder hashed_embedder(int dim = 128, std::uint64_t seed = 0) {
  return [dim, seed](const std::string& utterance, const std::string&) {
    return embed_hashed(utterance, dim, seed);
  };
}

VectorIndex index_of(const Corpus& c, const Embedder& embed) {
  std::vector<IndexEntry> entries;
  for (const auto& r : c.records())
    entries.push_back({r.id, embed(r.utterance, r.id), r.domain, r.utterance});
  return VectorIndex::build(entries);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("criterion 1: published macro-average reproduction") {
  struct Column { std::vector<double> accs; double macro; };
  const Column columns[] = {
      {{86.67, 83.83, 79.80, 81.21, 93.50, 82.96}, 84.66},  // without-nn
      {{87.17, 85.03, 80.73, 81.75, 94.52, 84.16}, 85.56},  // utterance-nn
      {{88.57, 84.77, 80.71, 81.01, 94.65, 85.20}, 85.82},  // semparse-nn
  };
  for (const Column& col : columns) {
    EvalReport r = aggregate(synthetic_results(col.accs));
    REQUIRE(std::abs(r.macro_avg - col.macro) <= 0.005);
  }
  pass(1, "macro-avg 84.66 / 85.56 / 85.82 reproduced within 0.005");
}

TEST_CASE("criterion 2: parser corpus over all printed parse strings") {
  for (const char* s : fixtures::kAllReferenceParses) {
    ParseTree t = parse_top(s);
    REQUIRE(structurally_equal(parse_top(serialize(t)), t));
    REQUIRE_NOTHROW(canonicalize(t));
    // reorder the root's slot children and demand frame_match
    ParseTree reordered = t;
    std::stable_partition(reordered.root.children.begin(), reordered.root.children.end(),
                          [](const Node& n) { return !n.is_slot(); });
    std::reverse(reordered.root.children.begin(), reordered.root.children.end());
    REQUIRE(frame_match(serialize(reordered), s));
  }
  pass(2, "all reference parses round-trip, canonicalize, and match reordered selves");
}

TEST_CASE("criterion 3: index equals brute-force oracle on 2000 vectors") {
  const int dim = 32, n = 2000, n_queries = 200;
  std::mt19937 gen(12345);
  std::normal_distribution<float> normal;
  auto random_unit = [&] {
    EmbeddingVector v(dim);
    for (int j = 0; j < dim; ++j) v[j] = normal(gen);
    return unit_normalize(v);
  };

  std::vector<IndexEntry> entries;
  for (int i = 0; i < n; ++i)
    entries.push_back({"r" + std::to_string(i), random_unit(),
                       "dom" + std::to_string(i % 4), "utt " + std::to_string(i % 100)});
  VectorIndex ix = VectorIndex::build(entries);

  std::vector<ExclusionRule> rules = {
      ExclusionRule::none(), ExclusionRule::by_id("r17"),
      ExclusionRule::by_text("utt 42"), ExclusionRule::by_id_and_text("r5", "utt 5"),
      ExclusionRule::domain_not_equal("dom1")};

  long checks = 0;
  for (int qn = 0; qn < n_queries; ++qn) {
    EmbeddingVector q = random_unit();
    for (int k : {1, 5, 10}) {
      for (const auto& rule : rules) {
        // independent double-precision scan
        struct Hit { double dist; std::string id; };
        std::vector<Hit> hits;
        for (const IndexEntry& e : entries) {
          bool keep = true;
          switch (rule.kind) {
            case ExclusionRule::Kind::None: break;
            case ExclusionRule::Kind::ById: keep = e.id != rule.id; break;
            case ExclusionRule::Kind::ByText:
              keep = normalize_utterance(e.utterance) != normalize_utterance(rule.text);
              break;
            case ExclusionRule::Kind::ByIdAndText:
              keep = e.id != rule.id &&
                     normalize_utterance(e.utterance) != normalize_utterance(rule.text);
              break;
            case ExclusionRule::Kind::DomainNotEqual: keep = e.domain != rule.domain; break;
          }
          if (!keep) continue;
          double d2 = 0;
          for (int j = 0; j < dim; ++j) {
            double diff = static_cast<double>(q[j]) - static_cast<double>(e.vector[j]);
            d2 += diff * diff;
          }
          hits.push_back({std::sqrt(d2), e.id});
        }
        std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
          if (a.dist != b.dist) return a.dist < b.dist;
          return a.id < b.id;
        });

        NeighborList nl = ix.query(q, k, rule);
        REQUIRE(nl.entries.size() == std::min<size_t>(k, hits.size()));
        for (size_t i = 0; i < nl.entries.size(); ++i) {
          REQUIRE(nl.entries[i].id == hits[i].id);
          REQUIRE(nl.entries[i].distance == hits[i].dist);
          ++checks;
        }
      }
    }
  }
  pass(3, "100% oracle agreement across k in {1,5,10} and all exclusion rules");
}

TEST_CASE("criterion 4: augmentation format and neighbor ordering") {
  std::vector<UtteranceRecord> train_recs;
  train_recs.push_back(make_record("train:0", "timer", fixtures::kAddTimeTimerUtterance,
                                   fixtures::kAddTimeTimer));
  for (int i = 1; i < 8; ++i)
    train_recs.push_back(make_record("train:" + std::to_string(i), "timer",
                                     "filler utterance " + std::to_string(i),
                                     "[in:task_f [sl:v f" + std::to_string(i) + " ] ]"));
  Corpus train("train", std::move(train_recs));
  UtteranceRecord query = make_record("test:0", "timer", fixtures::kLasagnaUtterance,
                                      "[in:add_time_timer [sl:date_time 20 minutes ] "
                                      "[sl:timer_name lasagna ] ]");

  AugmentConfig cfg;
  cfg.mode = AugmentMode::SemparseNN;
  REQUIRE(render_augmented(query, {"train:0"}, cfg, train).input ==
          "[in:add_time_timer add [sl:date_time ten minutes ] to the "
          "[sl:timer_name oven ] [sl:method_timer timer ] ] | "
          "please add 20 minutes on the lasagna timer");

  // ordering property over randomized neighbor lists, k in {1,2,3}
  SplitMix64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    for (int k : {1, 2, 3}) {
      std::vector<std::string> ids;
      while (static_cast<int>(ids.size()) < k) {
        std::string id = "train:" + std::to_string(rng.below(8));
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
      }
      AugmentConfig c;
      c.mode = trial % 2 ? AugmentMode::UtteranceNN : AugmentMode::SemparseNN;
      c.k = k;
      AugmentedExample ex = render_augmented(query, ids, c, train);

      std::vector<std::string> parts;
      std::string s = ex.input;
      size_t start = 0;
      while (true) {
        size_t pos = s.find(" | ", start);
        if (pos == std::string::npos) {
          parts.push_back(s.substr(start));
          break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 3;
      }
      REQUIRE(parts.size() == static_cast<size_t>(k) + 1);
      REQUIRE(parts.back() == query.utterance);
      for (int rank = 1; rank <= k; ++rank) {
        const UtteranceRecord& nb = *train.find(ids[rank - 1]);
        std::string piece =
            c.mode == AugmentMode::UtteranceNN ? nb.utterance : serialize(nb.tree);
        REQUIRE(parts[parts.size() - 1 - rank] == piece);
      }
    }
  }
  pass(4, "worked semparse-nn string byte-exact; k in {1,2,3} ordering invariant holds");
}

TEST_CASE("criterion 5: end-to-end self-consistency on synthetic corpus") {
  Corpus train = fixtures::synth_corpus(fixtures::synth_training_rows(), "train");
  Corpus test = fixtures::synth_corpus(fixtures::synth_heldout_rows(), "test");
  REQUIRE(train.size() == 500);
  Embedder embed = hashed_embedder(256, 0);
  VectorIndex ix = index_of(train, embed);

  auto accuracy_under = [&](NeighborPolicy::Kind policy) {
    KnnParserConfig cfg;
    cfg.retrieval.policy.kind = policy;
    cfg.retrieval.seed = 3;
    long matched = 0;
    for (const UtteranceRecord& rec : test.records()) {
      std::string pred =
          knn_predict(rec, embed(rec.utterance, rec.id), ix, train, cfg);
      if (pred == rec.canonical) ++matched;
    }
    return 100.0 * static_cast<double>(matched) / static_cast<double>(test.size());
  };

  double top1 = accuracy_under(NeighborPolicy::Kind::TopK);
  REQUIRE(top1 == 100.0);
  double crossed = accuracy_under(NeighborPolicy::Kind::CrossDomainRandom);
  REQUIRE(crossed < top1);
  pass(5, "top-k transfer reaches 100% frame accuracy; cross-domain policy strictly drops");
}

TEST_CASE("criterion 6: slicing properties") {
  Corpus train = fixtures::synth_corpus(fixtures::synth_training_rows(), "train");
  Corpus test = fixtures::synth_corpus(fixtures::synth_heldout_rows(), "test");

  // deterministic pseudo-results
  std::vector<const UtteranceRecord*> recs;
  std::vector<bool> matched;
  SplitMix64 rng(9);
  for (const auto& r : test.records()) {
    recs.push_back(&r);
    matched.push_back(rng.below(3) != 0);
  }
  long pooled = std::count(matched.begin(), matched.end(), true);
  double micro = 100.0 * static_cast<double>(pooled) / static_cast<double>(matched.size());

  for (size_t n : {test.size(), test.size() - 1, test.size() - 3}) {
    std::vector<const UtteranceRecord*> sub(recs.begin(), recs.begin() + n);
    std::vector<bool> subm(matched.begin(), matched.begin() + n);
    SliceReport freq = slice_frequency(sub, train, subm);
    REQUIRE(freq.buckets.size() == 5);
    long total = 0, lo = static_cast<long>(n), hi = 0;
    for (const auto& b : freq.buckets) {
      total += b.n;
      lo = std::min(lo, b.n);
      hi = std::max(hi, b.n);
    }
    REQUIRE(total == static_cast<long>(n));  // partition
    REQUIRE(hi - lo <= 1);
  }

  SliceReport cx = slice_complexity(recs, matched);
  REQUIRE(cx.buckets.size() == 2);
  REQUIRE(cx.buckets[0].n + cx.buckets[1].n == static_cast<long>(test.size()));

  // bucket accuracies recombine to the pooled micro accuracy
  for (const SliceReport& s : {slice_frequency(recs, train, matched), cx}) {
    double weighted = 0;
    for (const auto& b : s.buckets)
      if (auto acc = b.frame_accuracy()) weighted += *acc * static_cast<double>(b.n);
    REQUIRE(std::abs(weighted / static_cast<double>(test.size()) - micro) <= 1e-9);
  }
  pass(6, "quintiles partition with sizes within 1, slices recombine to micro within 1e-9");
}

TEST_CASE("criterion 7: CLI pipeline determinism") {
  namespace fs = std::filesystem;
  const std::string cli = RETRONLU_CLI_PATH;
  fs::path dir = fs::temp_directory_path() / "retronlu_accept7";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Each rerun happens in its own directory with identical relative paths,
  // so every artifact (including the config echoed into the report) must
  // come out byte-identical.
  auto run_pipeline = [&](const std::string& tag) {
    fs::path sub = dir / tag;
    fs::create_directories(sub);
    {
      std::ofstream tr(sub / "train.tsv"), te(sub / "test.tsv");
      for (const auto& row : fixtures::synth_training_rows())
        tr << row.domain << '\t' << row.utterance << '\t' << row.semparse << '\n';
      int i = 0;
      for (const auto& row : fixtures::synth_heldout_rows())
        if (i++ % 4 == 0)
          te << row.domain << '\t' << row.utterance << '\t' << row.semparse << '\n';
    }
    std::string in = "cd " + sub.string() + " && " + cli + " ";
    std::string log = " >> log.txt 2>&1";
    REQUIRE(std::system((in + "build-index train.tsv index.vidx --dim 64 --embed-seed 1" +
                         log).c_str()) == 0);
    REQUIRE(std::system((in + "augment test.tsv index.vidx aug.tsv --train train.tsv"
                              " --split test --mode semparse-nn --k 2"
                              " --policy random-top-m --m 20 --seed 11"
                              " --dim 64 --embed-seed 1" + log).c_str()) == 0);
    REQUIRE(std::system((in + "predict test.tsv index.vidx preds.tsv --train train.tsv"
                              " --split test --dim 64 --embed-seed 1" + log).c_str()) == 0);
    REQUIRE(std::system((in + "eval test.tsv preds.tsv --train train.tsv --split test"
                              " --slices complexity,frequency --out report.json" +
                         log).c_str()) == 0);
    return std::vector<std::string>{
        read_file((sub / "index.vidx").string()), read_file((sub / "aug.tsv").string()),
        read_file((sub / "preds.tsv").string()), read_file((sub / "report.json").string())};
  };

  auto first = run_pipeline("a");
  auto second = run_pipeline("b");
  REQUIRE(first.size() == second.size());
  for (size_t i = 0; i < first.size(); ++i) REQUIRE(first[i] == second[i]);
  fs::remove_all(dir);
  pass(7, "index, augmented TSV, predictions, and report byte-identical across reruns");
}
