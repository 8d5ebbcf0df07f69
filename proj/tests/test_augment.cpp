#include <doctest.h>

#include <algorithm>
#include <set>

#include "reference_strings.hpp"
#include "retronlu/augment.hpp"
#include "retronlu/hashing.hpp"

using namespace retronlu;

namespace {

Corpus pair_corpus() {
  std::vector<UtteranceRecord> records;
  records.push_back(make_record("train:0", "timer", fixtures::kAddTimeTimerUtterance,
                                fixtures::kAddTimeTimer));
  records.push_back(make_record("train:1", "music", "no more music",
                                fixtures::kEx2NeighborParse));
  return Corpus("train", std::move(records));
}

Embedder hashed_embedder(int dim = 64, std::uint64_t seed = 0) {
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

// Mixed-domain corpus big enough for policy tests.
Corpus policy_corpus() {
  std::vector<UtteranceRecord> records;
  const char* domains[] = {"alarm", "music", "timer"};
  for (int i = 0; i < 30; ++i) {
    std::string w = "w" + std::to_string(i);
    records.push_back(make_record("train:" + std::to_string(i), domains[i % 3],
                                  "do thing " + w, "[in:x [sl:v " + w + " ] ]"));
  }
  return Corpus("train", std::move(records));
}

std::vector<std::string> split_on(const std::string& s, const std::string& sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(" " + sep + " ", start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + sep.size() + 2;
  }
  return parts;
}

}  // namespace

TEST_CASE("render_augmented reproduces the worked semparse-nn string") {
  Corpus train = pair_corpus();
  UtteranceRecord query = make_record("test:0", "timer", fixtures::kLasagnaUtterance,
                                      "[in:add_time_timer [sl:date_time 20 minutes ] "
                                      "[sl:timer_name lasagna ] ]");
  AugmentConfig cfg;
  cfg.mode = AugmentMode::SemparseNN;

  AugmentedExample ex = render_augmented(query, {"train:0"}, cfg, train);
  CHECK(ex.input ==
        "[in:add_time_timer add [sl:date_time ten minutes ] to the "
        "[sl:timer_name oven ] [sl:method_timer timer ] ] | "
        "please add 20 minutes on the lasagna timer");
  CHECK(ex.target == query.canonical);

  cfg.mode = AugmentMode::UtteranceNN;
  ex = render_augmented(query, {"train:0"}, cfg, train);
  CHECK(ex.input ==
        "add ten minutes to the oven timer | please add 20 minutes on the lasagna timer");
}

TEST_CASE("render_augmented: closest neighbor immediately left of utterance") {
  Corpus train = policy_corpus();
  UtteranceRecord query = make_record("test:0", "alarm", "my query", "[in:x ]");
  AugmentConfig cfg;
  cfg.mode = AugmentMode::UtteranceNN;
  cfg.k = 2;
  AugmentedExample ex = render_augmented(query, {"train:3", "train:7"}, cfg, train);
  CHECK(ex.input == train.find("train:7")->utterance + " | " +
                        train.find("train:3")->utterance + " | my query");

  CHECK_THROWS_AS(render_augmented(query, {"nope"}, cfg, train), Error);
}

TEST_CASE("ordering invariant under k in {1,2,3}") {
  Corpus train = policy_corpus();
  Embedder embed = hashed_embedder();
  VectorIndex ix = index_of(train, embed);
  for (int k : {1, 2, 3}) {
    AugmentConfig cfg;
    cfg.mode = AugmentMode::UtteranceNN;
    cfg.k = k;
    cfg.policy.exclusion = ExclusionKind::ById;
    for (const auto& ex : augment_corpus(train, ix, cfg, train, embed)) {
      auto parts = split_on(ex.input, cfg.separator);
      REQUIRE(parts.size() == ex.neighbor_ids.size() + 1);
      CHECK(parts.back() == train.find(ex.id)->utterance);
      // segment i from the right (after the utterance) is the rank-i piece
      for (size_t rank = 1; rank <= ex.neighbor_ids.size(); ++rank)
        CHECK(parts[parts.size() - 1 - rank] ==
              train.find(ex.neighbor_ids[rank - 1])->utterance);
    }
  }
}

TEST_CASE("select_neighbors: top_k excludes self by id") {
  Corpus train = policy_corpus();
  Embedder embed = hashed_embedder();
  VectorIndex ix = index_of(train, embed);
  AugmentConfig cfg;
  cfg.k = 1;
  cfg.policy.exclusion = ExclusionKind::ById;
  for (const auto& rec : train.records()) {
    auto ids = select_neighbors(rec, embed(rec.utterance, rec.id), ix, cfg, train);
    REQUIRE(ids.size() == 1);
    CHECK(ids[0] != rec.id);
  }
}

TEST_CASE("select_neighbors: random_top_m containment and determinism") {
  Corpus train = policy_corpus();
  Embedder embed = hashed_embedder();
  VectorIndex ix = index_of(train, embed);
  AugmentConfig cfg;
  cfg.k = 3;
  cfg.policy.kind = NeighborPolicy::Kind::RandomTopM;
  cfg.policy.m = 10;
  cfg.policy.exclusion = ExclusionKind::ById;
  cfg.seed = 5;

  const UtteranceRecord& rec = train.records()[4];
  EmbeddingVector q = embed(rec.utterance, rec.id);
  auto picks = select_neighbors(rec, q, ix, cfg, train);
  REQUIRE(picks.size() == 3);

  // subset of top-m retrieval, retrieval order preserved among picks
  NeighborList top = ix.query(q, cfg.policy.m, ExclusionRule::by_id(rec.id));
  std::vector<std::string> top_ids;
  for (const auto& e : top.entries) top_ids.push_back(e.id);
  size_t last = 0;
  for (const auto& id : picks) {
    auto it = std::find(top_ids.begin() + last, top_ids.end(), id);
    REQUIRE(it != top_ids.end());
    last = static_cast<size_t>(it - top_ids.begin()) + 1;
  }

  CHECK(select_neighbors(rec, q, ix, cfg, train) == picks);
  // different seed changes picks for at least one record
  AugmentConfig other = cfg;
  other.seed = 6;
  bool any_diff = false;
  for (const auto& r : train.records()) {
    EmbeddingVector e = embed(r.utterance, r.id);
    if (select_neighbors(r, e, ix, cfg, train) != select_neighbors(r, e, ix, other, train))
      any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("select_neighbors: cross_domain_random") {
  Corpus train = policy_corpus();
  Embedder embed = hashed_embedder();
  VectorIndex ix = index_of(train, embed);
  AugmentConfig cfg;
  cfg.k = 2;
  cfg.policy.kind = NeighborPolicy::Kind::CrossDomainRandom;
  cfg.seed = 1;
  for (const auto& rec : train.records()) {
    auto picks = select_neighbors(rec, embed(rec.utterance, rec.id), ix, cfg, train);
    REQUIRE(picks.size() == 2);
    for (const auto& id : picks) CHECK(train.find(id)->domain != rec.domain);
  }

  // single-domain index -> NoCandidates
  Corpus alarm_only = filter_domain(train, "alarm");
  VectorIndex aix = index_of(alarm_only, embed);
  const UtteranceRecord& rec = alarm_only.records()[0];
  try {
    select_neighbors(rec, embed(rec.utterance, rec.id), aix, cfg, alarm_only);
    FAIL("expected NoCandidates");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoCandidates);
  }
}

TEST_CASE("select_neighbors: oracle_skeleton matches gold skeleton, with fallback") {
  std::vector<UtteranceRecord> records;
  for (int i = 0; i < 10; ++i) {
    bool alt = i % 2 == 0;
    records.push_back(make_record(
        "train:" + std::to_string(i), "d", "utt number " + std::to_string(i),
        alt ? "[in:a [sl:p v" + std::to_string(i) + " ] ]"
            : "[in:b [sl:q v" + std::to_string(i) + " ] ]"));
  }
  Corpus train("train", std::move(records));
  Embedder embed = hashed_embedder();
  VectorIndex ix = index_of(train, embed);

  AugmentConfig cfg;
  cfg.k = 3;
  cfg.policy.kind = NeighborPolicy::Kind::OracleSkeleton;
  cfg.policy.exclusion = ExclusionKind::ById;
  for (const auto& rec : train.records()) {
    auto picks = select_neighbors(rec, embed(rec.utterance, rec.id), ix, cfg, train);
    REQUIRE(!picks.empty());
    for (const auto& id : picks) CHECK(train.find(id)->skeleton == rec.skeleton);
  }

  // no skeleton match anywhere -> falls back to plain top-k
  UtteranceRecord odd = make_record("test:0", "d", "utt number 3",
                                    "[in:zzz [sl:r x ] [sl:s y ] ]");
  auto picks = select_neighbors(odd, embed(odd.utterance, odd.id), ix, cfg, train);
  CHECK(picks.size() == 3);
}

TEST_CASE("augment_corpus: truncation and determinism") {
  Corpus train = pair_corpus();
  Embedder embed = hashed_embedder();
  VectorIndex ix = index_of(train, embed);
  AugmentConfig cfg;
  cfg.k = 3;
  cfg.policy.exclusion = ExclusionKind::ById;
  auto out = augment_corpus(train, ix, cfg, train, embed);
  REQUIRE(out.size() == 2);
  for (const auto& ex : out) {
    CHECK(ex.neighbor_ids.size() == 1);  // only one other record
    CHECK(std::find(ex.neighbor_ids.begin(), ex.neighbor_ids.end(), ex.id) ==
          ex.neighbor_ids.end());
  }
  auto rerun = augment_corpus(train, ix, cfg, train, embed);
  for (size_t i = 0; i < out.size(); ++i) CHECK(rerun[i].input == out[i].input);
}
