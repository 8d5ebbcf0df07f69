#include "retronlu/embedding.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "retronlu/hashing.hpp"

namespace retronlu {

namespace {

std::vector<std::string> lower_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void accumulate(EmbeddingVector& acc, std::string_view feature,
                std::uint64_t seed, int dim) {
  std::uint64_t h = fnv1a64(feature, seed);
  int bucket = static_cast<int>(h % static_cast<std::uint64_t>(dim));
  float sign = (h >> 63) ? -1.0f : 1.0f;
  acc[bucket] += sign;
}

}  // namespace

EmbeddingVector embed_hashed(const std::string& utterance, int dim,
                             std::uint64_t seed) {
  if (dim < 8) throw Error(Errc::DimTooSmall, "dim must be >= 8, got " + std::to_string(dim));
  EmbeddingVector acc = EmbeddingVector::Zero(dim);
  for (const std::string& word : lower_tokens(utterance)) {
    accumulate(acc, word, seed, dim);
    std::string marked = "^" + word + "$";
    for (size_t i = 0; i + 3 <= marked.size(); ++i)
      accumulate(acc, std::string_view(marked).substr(i, 3), seed, dim);
  }
  return unit_normalize(acc);
}

EmbeddingVector unit_normalize(const EmbeddingVector& v) {
  float norm = v.norm();
  if (norm <= 1e-12f) return v;
  return v / norm;
}

EmbeddingTable load_embeddings(const std::string& path,
                               const std::set<std::string>& expected_ids) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  EmbeddingTable table;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": missing tab");
    std::string id = line.substr(0, tab);
    if (id.empty())
      throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": empty id");
    std::istringstream vals(line.substr(tab + 1));
    std::vector<float> row;
    float f;
    while (vals >> f) row.push_back(f);
    if (!vals.eof())
      throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": bad float");
    if (row.empty())
      throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": no values");
    if (table.dim == 0) table.dim = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != table.dim)
      throw Error(Errc::DimMismatch, path + ":" + std::to_string(lineno) + ": expected " +
                                         std::to_string(table.dim) + " values, got " +
                                         std::to_string(row.size()));
    if (table.entries.count(id))
      throw Error(Errc::DuplicateId, path + ":" + std::to_string(lineno) + ": id '" + id + "'");
    table.entries.emplace(
        id, unit_normalize(Eigen::Map<EmbeddingVector>(row.data(), row.size())));
  }
  for (const std::string& id : expected_ids)
    if (!table.entries.count(id))
      throw Error(Errc::MissingId, "id '" + id + "' not found in " + path);
  return table;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  // Deterministic order for byte-identical reruns.
  std::vector<const std::string*> ids;
  ids.reserve(table.entries.size());
  for (const auto& [id, _] : table.entries) ids.push_back(&id);
  std::sort(ids.begin(), ids.end(), [](auto* a, auto* b) { return *a < *b; });
  char buf[64];
  for (const auto* id : ids) {
    out << *id;
    const EmbeddingVector& v = table.entries.at(*id);
    for (int i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v[i]));
      out << (i == 0 ? '\t' : ' ') << buf;
    }
    out << '\n';
  }
}

}  // namespace retronlu
