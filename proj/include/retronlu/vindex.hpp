#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "retronlu/embedding.hpp"
#include "retronlu/error.hpp"

namespace retronlu {

// Lowercases and collapses internal whitespace; the textual identity used
// for "exact match" exclusion.
std::string normalize_utterance(const std::string& s);

struct ExclusionRule {
  enum class Kind { None, ById, ByText, ByIdAndText, DomainNotEqual };
  Kind kind = Kind::None;
  std::string id;      // ById / ByIdAndText
  std::string text;    // ByText / ByIdAndText; normalized on use
  std::string domain;  // DomainNotEqual: candidates must be in another domain

  static ExclusionRule none() { return {}; }
  static ExclusionRule by_id(std::string id);
  static ExclusionRule by_text(std::string text);
  static ExclusionRule by_id_and_text(std::string id, std::string text);
  static ExclusionRule domain_not_equal(std::string domain);
};

struct Neighbor {
  std::string id;
  double distance;
};

struct NeighborList {
  std::optional<std::string> query_id;
  std::vector<Neighbor> entries;  // ascending by (distance, id)
  std::string policy;
};

struct IndexEntry {
  std::string id;
  EmbeddingVector vector;
  std::string domain;
  std::string utterance;  // normalized on build
};

// Exact flat kNN index over unit-norm vectors under L2 distance.
// Immutable after build; queries are safe to run concurrently.
class VectorIndex {
 public:
  static VectorIndex build(const std::vector<IndexEntry>& records);

  // The k records minimizing L2(q, v) among those passing `exclude`,
  // ascending by (distance, id); fewer than k when the index is small.
  NeighborList query(const EmbeddingVector& q, int k,
                     const ExclusionRule& exclude = {}) const;

  void save(const std::string& path) const;
  static VectorIndex load(const std::string& path);

  int dim() const { return static_cast<int>(vectors_.rows()); }
  int size() const { return static_cast<int>(vectors_.cols()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& domain_of(int i) const { return domains_[i]; }
  const std::string& utterance_of(int i) const { return utterances_[i]; }
  EmbeddingVector vector_at(int i) const { return vectors_.col(i); }
  int position_of(const std::string& id) const;  // -1 if absent

 private:
  VectorIndex() = default;

  std::vector<std::string> ids_;
  std::vector<std::string> domains_;
  std::vector<std::string> utterances_;
  Eigen::MatrixXf vectors_;  // dim x count, column per record
  std::unordered_map<std::string, int> pos_;
};

}  // namespace retronlu
