#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "retronlu/corpus.hpp"
#include "retronlu/vindex.hpp"

namespace retronlu {

enum class AugmentMode { UtteranceNN, SemparseNN };

enum class ExclusionKind { None, ById, ByText, ByIdAndText };

struct NeighborPolicy {
  enum class Kind { TopK, RandomTopM, CrossDomainRandom, OracleSkeleton };
  Kind kind = Kind::TopK;
  int m = 100;  // RandomTopM pool size; must be >= k
  ExclusionKind exclusion = ExclusionKind::None;
};

struct AugmentConfig {
  AugmentMode mode = AugmentMode::SemparseNN;
  int k = 1;
  std::string separator = "|";
  NeighborPolicy policy;
  std::uint64_t seed = 0;
};

struct AugmentedExample {
  std::string id;
  std::string input;   // "p_k | ... | p_1 | utterance"
  std::string target;  // canonical gold frame
  std::vector<std::string> neighbor_ids;  // rank order, closest first
};

// Maps an utterance (and its record id, for table lookups) to its embedding.
using Embedder = std::function<EmbeddingVector(const std::string& utterance,
                                               const std::string& id)>;

// Builds the concrete per-query exclusion rule for a record.
ExclusionRule exclusion_for(ExclusionKind kind, const UtteranceRecord& rec);

// Neighbor selection under the configured policy. Sampled policies draw from
// a generator keyed by (cfg.seed, rec.id), so selections are reproducible and
// order-independent. `train` supplies gold skeletons for OracleSkeleton.
std::vector<std::string> select_neighbors(const UtteranceRecord& rec,
                                          const EmbeddingVector& query,
                                          const VectorIndex& ix,
                                          const AugmentConfig& cfg,
                                          const Corpus& train);

// Renders the augmented input, neighbors right-to-left so the closest one
// sits immediately left of the utterance.
AugmentedExample render_augmented(const UtteranceRecord& rec,
                                  const std::vector<std::string>& neighbor_ids,
                                  const AugmentConfig& cfg,
                                  const Corpus& train);

std::vector<AugmentedExample> augment_corpus(const Corpus& c,
                                             const VectorIndex& ix,
                                             const AugmentConfig& cfg,
                                             const Corpus& train,
                                             const Embedder& embed);

// TSV columns: id \t input \t target \t neighbor_ids (comma-joined).
void write_augmented_tsv(const std::vector<AugmentedExample>& examples,
                         const std::string& path);

}  // namespace retronlu
