#include "retronlu/knnparser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace retronlu {

namespace {

std::string lower_join(const std::vector<std::string>& toks) {
  std::string out;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i) out += ' ';
    for (char c : toks[i])
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

size_t lcs_length(const std::string& a, const std::string& b) {
  // Two-row DP over characters.
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::string> whitespace_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

struct SpanFiller {
  const std::vector<std::string>& tokens;
  const KnnParserConfig& cfg;
  std::vector<bool> used;

  SpanFiller(const std::vector<std::string>& toks, const KnnParserConfig& c)
      : tokens(toks), cfg(c), used(toks.size(), false) {}

  bool overlaps(size_t start, size_t len) const {
    for (size_t i = start; i < start + len; ++i)
      if (used[i]) return true;
    return false;
  }

  void fill(Node& node) {
    if (node.is_slot()) {
      bool all_text = !node.children.empty() &&
                      std::all_of(node.children.begin(), node.children.end(),
                                  [](const Node& c) { return c.is_text(); });
      if (all_text) {
        fill_slot_value(node);
        return;
      }
    }
    for (Node& c : node.children) fill(c);
  }

  void fill_slot_value(Node& slot) {
    std::vector<std::string> value;
    for (const Node& c : slot.children) value.push_back(c.label);
    const size_t max_len = value.size() + static_cast<size_t>(cfg.span_slack);

    double best_score = 0.0;
    size_t best_start = 0, best_len = 0;
    bool found = false;
    for (size_t start = 0; start < tokens.size(); ++start) {
      for (size_t len = 1; len <= max_len && start + len <= tokens.size(); ++len) {
        if (overlaps(start, len)) continue;
        std::vector<std::string> span(tokens.begin() + start,
                                      tokens.begin() + start + len);
        double score = span_similarity(span, value);
        if (score < cfg.min_similarity) continue;
        // Ties: earliest start, then shortest span.
        if (!found || score > best_score ||
            (score == best_score &&
             (start < best_start || (start == best_start && len < best_len)))) {
          found = true;
          best_score = score;
          best_start = start;
          best_len = len;
        }
      }
    }
    if (!found) return;  // keep the neighbor's value verbatim
    for (size_t i = best_start; i < best_start + best_len; ++i) used[i] = true;
    slot.children.clear();
    for (size_t i = best_start; i < best_start + best_len; ++i)
      slot.children.push_back(Node{NodeKind::Text, tokens[i], {}});
  }
};

}  // namespace

double span_similarity(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  std::string sa = lower_join(a), sb = lower_join(b);
  if (sa.empty() && sb.empty()) return 1.0;
  if (sa.empty() || sb.empty()) return 0.0;
  return static_cast<double>(lcs_length(sa, sb)) /
         static_cast<double>(std::max(sa.size(), sb.size()));
}

ParseTree transfer_fill(const ParseTree& neighbor_canonical,
                        const std::vector<std::string>& utterance_tokens,
                        const KnnParserConfig& cfg) {
  ParseTree out = neighbor_canonical;
  SpanFiller filler(utterance_tokens, cfg);
  filler.fill(out.root);
  return out;
}

std::string knn_predict(const UtteranceRecord& rec, const EmbeddingVector& query,
                        const VectorIndex& ix, const Corpus& train,
                        const KnnParserConfig& cfg) {
  if (ix.size() == 0) throw Error(Errc::EmptyIndex, "index has no records");
  AugmentConfig sel = cfg.retrieval;
  sel.k = 1;
  std::vector<std::string> ids = select_neighbors(rec, query, ix, sel, train);
  if (ids.empty()) throw Error(Errc::NoCandidates, "retrieval returned nothing for " + rec.id);
  const UtteranceRecord* nb = train.find(ids.front());
  if (!nb) throw Error(Errc::UnknownNeighborId, "'" + ids.front() + "' not in train corpus");

  ParseTree filled = transfer_fill(canonicalize(nb->tree),
                                   whitespace_tokens(rec.utterance), cfg);
  // Re-filled values can change the content tie-break between same-label
  // slots, so canonicalize again before serializing.
  return serialize(canonicalize(filled));
}

PredictionSet load_predictions(const std::string& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  PredictionSet out;
  out.split_name = corpus.split_name();
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": missing tab");
    std::string id = line.substr(0, tab);
    if (!corpus.find(id))
      throw Error(Errc::UnknownId, path + ":" + std::to_string(lineno) + ": id '" + id + "'");
    if (!out.preds.emplace(id, line.substr(tab + 1)).second)
      throw Error(Errc::DuplicateId, path + ":" + std::to_string(lineno) + ": id '" + id + "'");
  }
  return out;
}

void save_predictions(const PredictionSet& preds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  for (const auto& [id, frame] : preds.preds) out << id << '\t' << frame << '\n';
}

}  // namespace retronlu
