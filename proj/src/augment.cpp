#include "retronlu/augment.hpp"

#include <algorithm>
#include <fstream>

#include "retronlu/hashing.hpp"

namespace retronlu {

namespace {

SplitMix64 record_rng(std::uint64_t seed, const std::string& id) {
  return SplitMix64(fnv1a64(id, seed));
}

// Picks k positions uniformly without replacement from [0, n), returned in
// ascending order so retrieval rank is preserved among the picks.
std::vector<size_t> sample_positions(size_t n, size_t k, SplitMix64& rng) {
  std::vector<size_t> pool(n);
  for (size_t i = 0; i < n; ++i) pool[i] = i;
  k = std::min(k, n);
  for (size_t i = 0; i < k; ++i)
    std::swap(pool[i], pool[i + rng.below(n - i)]);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

const UtteranceRecord& must_find(const Corpus& c, const std::string& id) {
  const UtteranceRecord* rec = c.find(id);
  if (!rec) throw Error(Errc::UnknownNeighborId, "'" + id + "' not in corpus");
  return *rec;
}

}  // namespace

ExclusionRule exclusion_for(ExclusionKind kind, const UtteranceRecord& rec) {
  switch (kind) {
    case ExclusionKind::None: return ExclusionRule::none();
    case ExclusionKind::ById: return ExclusionRule::by_id(rec.id);
    case ExclusionKind::ByText: return ExclusionRule::by_text(rec.utterance);
    case ExclusionKind::ByIdAndText:
      return ExclusionRule::by_id_and_text(rec.id, rec.utterance);
  }
  return ExclusionRule::none();
}

std::vector<std::string> select_neighbors(const UtteranceRecord& rec,
                                          const EmbeddingVector& query,
                                          const VectorIndex& ix,
                                          const AugmentConfig& cfg,
                                          const Corpus& train) {
  if (ix.size() == 0) throw Error(Errc::EmptyIndex, "index has no records");
  const ExclusionRule rule = exclusion_for(cfg.policy.exclusion, rec);
  const size_t k = static_cast<size_t>(cfg.k);

  switch (cfg.policy.kind) {
    case NeighborPolicy::Kind::TopK: {
      NeighborList nl = ix.query(query, cfg.k, rule);
      std::vector<std::string> out;
      for (const auto& e : nl.entries) out.push_back(e.id);
      return out;
    }
    case NeighborPolicy::Kind::RandomTopM: {
      NeighborList nl = ix.query(query, std::max(cfg.policy.m, cfg.k), rule);
      SplitMix64 rng = record_rng(cfg.seed, rec.id);
      std::vector<std::string> out;
      for (size_t p : sample_positions(nl.entries.size(), k, rng))
        out.push_back(nl.entries[p].id);
      return out;
    }
    case NeighborPolicy::Kind::CrossDomainRandom: {
      std::vector<std::string> candidates;
      for (int i = 0; i < ix.size(); ++i)
        if (ix.domain_of(i) != rec.domain) candidates.push_back(ix.ids()[i]);
      if (candidates.empty())
        throw Error(Errc::NoCandidates, "no records outside domain '" + rec.domain + "'");
      SplitMix64 rng = record_rng(cfg.seed, rec.id);
      std::vector<std::string> out;
      for (size_t p : sample_positions(candidates.size(), k, rng))
        out.push_back(candidates[p]);
      return out;
    }
    case NeighborPolicy::Kind::OracleSkeleton: {
      // Rank the whole index, then keep the nearest records whose gold
      // skeleton matches the query's; fall back to plain top-k when none do.
      NeighborList nl = ix.query(query, ix.size(), rule);
      std::vector<std::string> out;
      for (const auto& e : nl.entries) {
        if (out.size() == k) break;
        if (must_find(train, e.id).skeleton == rec.skeleton) out.push_back(e.id);
      }
      if (!out.empty()) return out;
      AugmentConfig top = cfg;
      top.policy.kind = NeighborPolicy::Kind::TopK;
      return select_neighbors(rec, query, ix, top, train);
    }
  }
  return {};
}

AugmentedExample render_augmented(const UtteranceRecord& rec,
                                  const std::vector<std::string>& neighbor_ids,
                                  const AugmentConfig& cfg,
                                  const Corpus& train) {
  AugmentedExample out;
  out.id = rec.id;
  out.target = rec.canonical;
  out.neighbor_ids = neighbor_ids;

  // Farthest neighbor first; rank-1 ends up immediately left of the utterance.
  std::string input;
  for (auto it = neighbor_ids.rbegin(); it != neighbor_ids.rend(); ++it) {
    const UtteranceRecord& nb = must_find(train, *it);
    input += cfg.mode == AugmentMode::UtteranceNN ? nb.utterance : serialize(nb.tree);
    input += ' ';
    input += cfg.separator;
    input += ' ';
  }
  input += rec.utterance;
  out.input = std::move(input);
  return out;
}

std::vector<AugmentedExample> augment_corpus(const Corpus& c,
                                             const VectorIndex& ix,
                                             const AugmentConfig& cfg,
                                             const Corpus& train,
                                             const Embedder& embed) {
  std::vector<AugmentedExample> out;
  out.reserve(c.size());
  for (const UtteranceRecord& rec : c.records()) {
    EmbeddingVector q = embed(rec.utterance, rec.id);
    out.push_back(render_augmented(rec, select_neighbors(rec, q, ix, cfg, train), cfg, train));
  }
  return out;
}

void write_augmented_tsv(const std::vector<AugmentedExample>& examples,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  for (const auto& ex : examples) {
    out << ex.id << '\t' << ex.input << '\t' << ex.target << '\t';
    for (size_t i = 0; i < ex.neighbor_ids.size(); ++i) {
      if (i) out << ',';
      out << ex.neighbor_ids[i];
    }
    out << '\n';
  }
}

}  // namespace retronlu
