#pragma once

#include <map>
#include <string>
#include <vector>

#include "retronlu/augment.hpp"
#include "retronlu/corpus.hpp"
#include "retronlu/vindex.hpp"

namespace retronlu {

struct PredictionSet {
  std::string split_name;
  std::map<std::string, std::string> preds;  // record id -> frame string (kept raw)
};

// Normalized character-level longest-common-subsequence ratio between two
// token lists (joined with single spaces, lowercase folded):
// LCS / max(len); both empty -> 1, one empty -> 0.
double span_similarity(const std::vector<std::string>& a,
                       const std::vector<std::string>& b);

struct KnnParserConfig {
  AugmentConfig retrieval;         // policy/seed for picking the neighbor
  double min_similarity = 0.1;     // spans scoring below are rejected
  int span_slack = 2;              // max span length = |value| + span_slack
};

// Non-parametric frame-transfer parser: copies the top neighbor's canonical
// tree and re-fills each slot value with the best-matching non-overlapping
// token span of the input utterance; values with no qualifying span are kept
// verbatim. Output is the canonical serialization.
std::string knn_predict(const UtteranceRecord& rec, const EmbeddingVector& query,
                        const VectorIndex& ix, const Corpus& train,
                        const KnnParserConfig& cfg);

// Exposed for testing: fills slot values of `tree` from `utterance_tokens`.
ParseTree transfer_fill(const ParseTree& neighbor_canonical,
                        const std::vector<std::string>& utterance_tokens,
                        const KnnParserConfig& cfg);

// Reads a predictions TSV (`record-id \t frame-string`). Ids must exist in
// the corpus; missing corpus ids are allowed (partial sets).
PredictionSet load_predictions(const std::string& path, const Corpus& corpus);

void save_predictions(const PredictionSet& preds, const std::string& path);

}  // namespace retronlu
