#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>

#include "retronlu/error.hpp"

namespace retronlu {

using EmbeddingVector = Eigen::VectorXf;

struct EmbeddingTable {
  int dim = 0;
  std::unordered_map<std::string, EmbeddingVector> entries;
};

// Deterministic hashed-feature sentence embedder. Features are the
// lowercased whitespace tokens plus the character trigrams of each
// boundary-marked token `^word$`; each feature is FNV-1a hashed, bucketed
// mod dim, signed by the hash's top bit, accumulated in one left-to-right
// pass over 32-bit floats, then unit-L2-normalized. The empty utterance
// maps to the zero vector. Throws DimTooSmall for dim < 8.
EmbeddingVector embed_hashed(const std::string& utterance, int dim,
                             std::uint64_t seed);

// v / ||v||2, or v unchanged when ||v||2 <= 1e-12.
EmbeddingVector unit_normalize(const EmbeddingVector& v);

// Reads the embedding text format: one `<id>\t<f1> <f2> ... <fD>` record
// per line, `#` comments ignored; dim inferred from the first row and every
// vector unit-normalized on load. Throws DimMismatch, DuplicateId,
// MissingId (an expected id absent), ParseError.
EmbeddingTable load_embeddings(const std::string& path,
                               const std::set<std::string>& expected_ids = {});

void save_embeddings(const EmbeddingTable& table, const std::string& path);

}  // namespace retronlu
