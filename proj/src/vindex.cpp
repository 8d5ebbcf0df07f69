#include "retronlu/vindex.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace retronlu {

namespace {

const char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::string& in) {
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= in.size(); i += 3) {
    unsigned v = (static_cast<unsigned char>(in[i]) << 16) |
                 (static_cast<unsigned char>(in[i + 1]) << 8) |
                 static_cast<unsigned char>(in[i + 2]);
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
    out += kBase64Alphabet[v & 63];
  }
  size_t rem = in.size() - i;
  if (rem == 1) {
    unsigned v = static_cast<unsigned char>(in[i]) << 16;
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += "==";
  } else if (rem == 2) {
    unsigned v = (static_cast<unsigned char>(in[i]) << 16) |
                 (static_cast<unsigned char>(in[i + 1]) << 8);
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

int base64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

std::string base64_decode(const std::string& in) {
  std::string out;
  int buf = 0, bits = 0;
  for (char c : in) {
    if (c == '=') break;
    int v = base64_value(c);
    if (v < 0) throw Error(Errc::FormatError, "bad base64 character");
    buf = (buf << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((buf >> bits) & 0xff);
    }
  }
  return out;
}

}  // namespace

std::string normalize_utterance(const std::string& s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
    } else {
      if (pending_space) out += ' ', pending_space = false;
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

ExclusionRule ExclusionRule::by_id(std::string id) {
  ExclusionRule r;
  r.kind = Kind::ById;
  r.id = std::move(id);
  return r;
}

ExclusionRule ExclusionRule::by_text(std::string text) {
  ExclusionRule r;
  r.kind = Kind::ByText;
  r.text = std::move(text);
  return r;
}

ExclusionRule ExclusionRule::by_id_and_text(std::string id, std::string text) {
  ExclusionRule r;
  r.kind = Kind::ByIdAndText;
  r.id = std::move(id);
  r.text = std::move(text);
  return r;
}

ExclusionRule ExclusionRule::domain_not_equal(std::string domain) {
  ExclusionRule r;
  r.kind = Kind::DomainNotEqual;
  r.domain = std::move(domain);
  return r;
}

VectorIndex VectorIndex::build(const std::vector<IndexEntry>& records) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no records");
  VectorIndex ix;
  const int dim = static_cast<int>(records.front().vector.size());
  ix.vectors_.resize(dim, static_cast<int>(records.size()));
  for (size_t i = 0; i < records.size(); ++i) {
    const IndexEntry& r = records[i];
    if (static_cast<int>(r.vector.size()) != dim)
      throw Error(Errc::DimMismatch, "record '" + r.id + "' has dim " +
                                         std::to_string(r.vector.size()) + ", expected " +
                                         std::to_string(dim));
    if (!ix.pos_.emplace(r.id, static_cast<int>(i)).second)
      throw Error(Errc::DuplicateId, "record id '" + r.id + "'");
    ix.ids_.push_back(r.id);
    ix.domains_.push_back(r.domain);
    ix.utterances_.push_back(normalize_utterance(r.utterance));
    ix.vectors_.col(static_cast<int>(i)) = r.vector;
  }
  return ix;
}

int VectorIndex::position_of(const std::string& id) const {
  auto it = pos_.find(id);
  return it == pos_.end() ? -1 : it->second;
}

NeighborList VectorIndex::query(const EmbeddingVector& q, int k,
                                const ExclusionRule& exclude) const {
  if (static_cast<int>(q.size()) != dim())
    throw Error(Errc::DimMismatch, "query dim " + std::to_string(q.size()) +
                                       " vs index dim " + std::to_string(dim()));
  if (k < 1) throw Error(Errc::KZero, "k must be >= 1");

  const std::string norm_text =
      (exclude.kind == ExclusionRule::Kind::ByText ||
       exclude.kind == ExclusionRule::Kind::ByIdAndText)
          ? normalize_utterance(exclude.text)
          : std::string();

  auto passes = [&](int i) {
    switch (exclude.kind) {
      case ExclusionRule::Kind::None:
        return true;
      case ExclusionRule::Kind::ById:
        return ids_[i] != exclude.id;
      case ExclusionRule::Kind::ByText:
        return utterances_[i] != norm_text;
      case ExclusionRule::Kind::ByIdAndText:
        return ids_[i] != exclude.id && utterances_[i] != norm_text;
      case ExclusionRule::Kind::DomainNotEqual:
        return domains_[i] != exclude.domain;
    }
    return true;
  };

  std::vector<Neighbor> candidates;
  candidates.reserve(ids_.size());
  for (int i = 0; i < size(); ++i) {
    if (!passes(i)) continue;
    // Plain double accumulation keeps the scan bit-deterministic across
    // platforms and build flags.
    double d2 = 0.0;
    for (int j = 0; j < dim(); ++j) {
      double diff = static_cast<double>(q[j]) - static_cast<double>(vectors_(j, i));
      d2 += diff * diff;
    }
    candidates.push_back({ids_[i], std::sqrt(d2)});
  }
  auto cmp = [](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  };
  size_t keep = std::min<size_t>(static_cast<size_t>(k), candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(), cmp);
  candidates.resize(keep);

  NeighborList out;
  out.entries = std::move(candidates);
  return out;
}

void VectorIndex::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  out << "VIDX1 dim=" << dim() << " count=" << size() << " metric=l2\n";
  char buf[64];
  for (int i = 0; i < size(); ++i) {
    out << ids_[i] << '\t' << domains_[i] << '\t' << base64_encode(utterances_[i]) << '\t';
    for (int j = 0; j < dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(vectors_(j, i)));
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

VectorIndex VectorIndex::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw Error(Errc::FormatError, "empty index file");
  std::istringstream hs(header);
  std::string magic, dim_kv, count_kv, metric_kv;
  hs >> magic >> dim_kv >> count_kv >> metric_kv;
  if (magic != "VIDX1")
    throw Error(Errc::VersionMismatch, "unsupported header '" + magic + "'");
  int dim = 0, count = 0;
  if (std::sscanf(dim_kv.c_str(), "dim=%d", &dim) != 1 ||
      std::sscanf(count_kv.c_str(), "count=%d", &count) != 1 ||
      metric_kv != "metric=l2" || dim <= 0 || count <= 0)
    throw Error(Errc::FormatError, "bad index header '" + header + "'");

  VectorIndex ix;
  ix.vectors_.resize(dim, count);
  std::string line;
  for (int i = 0; i < count; ++i) {
    if (!std::getline(in, line))
      throw Error(Errc::FormatError, "truncated index: expected " + std::to_string(count) +
                                         " records, got " + std::to_string(i));
    std::vector<std::string> cols;
    size_t start = 0;
    for (int c = 0; c < 3; ++c) {
      size_t tab = line.find('\t', start);
      if (tab == std::string::npos)
        throw Error(Errc::FormatError, "record line " + std::to_string(i) + " has too few columns");
      cols.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    std::istringstream vals(line.substr(start));
    for (int j = 0; j < dim; ++j) {
      float f;
      if (!(vals >> f))
        throw Error(Errc::FormatError, "record line " + std::to_string(i) + " has too few values");
      ix.vectors_(j, i) = f;
    }
    if (!ix.pos_.emplace(cols[0], i).second)
      throw Error(Errc::DuplicateId, "record id '" + cols[0] + "'");
    ix.ids_.push_back(cols[0]);
    ix.domains_.push_back(cols[1]);
    ix.utterances_.push_back(base64_decode(cols[2]));
  }
  return ix;
}

}  // namespace retronlu
