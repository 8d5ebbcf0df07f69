#include "retronlu/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace retronlu {

namespace {

using ordered_json = nlohmann::ordered_json;

double round2(double x) { return std::round(x * 100.0) / 100.0; }

void collect_labels(const Node& n, std::map<std::string, long>& intents,
                    std::map<std::string, long>& slots) {
  if (n.is_intent()) ++intents[n.label];
  else if (n.is_slot()) ++slots[n.label];
  for (const Node& c : n.children) collect_labels(c, intents, slots);
}

long multiset_intersection(const std::map<std::string, long>& a,
                           const std::map<std::string, long>& b) {
  long total = 0;
  for (const auto& [label, count] : a) {
    auto it = b.find(label);
    if (it != b.end()) total += std::min(count, it->second);
  }
  return total;
}

long multiset_size(const std::map<std::string, long>& m) {
  long total = 0;
  for (const auto& [_, count] : m) total += count;
  return total;
}

// P (or R) for one example given the intersection and a denominator side.
double pr_value(long inter, long denom, long other_side) {
  if (denom == 0) return other_side == 0 ? 1.0 : 0.0;
  return static_cast<double>(inter) / static_cast<double>(denom);
}

ordered_json slice_json(const SliceReport& s) {
  ordered_json buckets = ordered_json::array();
  for (const SliceBucket& b : s.buckets) {
    ordered_json jb;
    jb["bucket"] = b.name;
    jb["n"] = b.n;
    auto acc = b.frame_accuracy();
    if (acc) jb["frame_accuracy"] = round2(*acc);
    else jb["frame_accuracy"] = nullptr;
    buckets.push_back(std::move(jb));
  }
  ordered_json out;
  out["slice_kind"] = s.slice_kind;
  out["buckets"] = std::move(buckets);
  return out;
}

}  // namespace

bool frame_match(const std::string& pred, const std::string& gold) {
  std::string gold_canonical;
  try {
    gold_canonical = serialize(canonicalize(parse_top(gold)));
  } catch (const Error& e) {
    throw Error(Errc::GoldUnparseable, gold + " (" + e.what() + ")");
  }
  try {
    return serialize(canonicalize(parse_top(pred))) == gold_canonical;
  } catch (const Error&) {
    return false;
  }
}

EvalReport aggregate(const std::vector<MatchResult>& results) {
  if (results.empty()) throw Error(Errc::EmptyResults, "no results to aggregate");
  EvalReport r;
  long total = 0, matched = 0;
  for (const MatchResult& m : results) {
    DomainStat& d = r.per_domain[m.domain];
    ++d.n;
    ++total;
    if (m.matched) ++d.matched, ++matched;
  }
  r.micro_avg = 100.0 * static_cast<double>(matched) / static_cast<double>(total);
  double sum = 0;
  for (const auto& [_, d] : r.per_domain) sum += d.frame_accuracy();
  r.macro_avg = sum / static_cast<double>(r.per_domain.size());
  return r;
}

PRReport neighbor_pr(const std::vector<ParseTree>& neighbor_parses,
                     const std::vector<ParseTree>& gold_parses) {
  if (neighbor_parses.size() != gold_parses.size())
    throw Error(Errc::LengthMismatch,
                std::to_string(neighbor_parses.size()) + " neighbors vs " +
                    std::to_string(gold_parses.size()) + " golds");
  if (neighbor_parses.empty()) throw Error(Errc::EmptyResults, "no parses");

  double ip = 0, ir = 0, sp = 0, sr = 0;
  for (size_t i = 0; i < neighbor_parses.size(); ++i) {
    std::map<std::string, long> ni, ns, gi, gs;
    collect_labels(neighbor_parses[i].root, ni, ns);
    collect_labels(gold_parses[i].root, gi, gs);
    long ii = multiset_intersection(ni, gi), si = multiset_intersection(ns, gs);
    long niz = multiset_size(ni), giz = multiset_size(gi);
    long nsz = multiset_size(ns), gsz = multiset_size(gs);
    ip += pr_value(ii, niz, giz);
    ir += pr_value(ii, giz, niz);
    sp += pr_value(si, nsz, gsz);
    sr += pr_value(si, gsz, nsz);
  }
  double n = static_cast<double>(neighbor_parses.size());
  return PRReport{100.0 * ip / n, 100.0 * ir / n, 100.0 * sp / n, 100.0 * sr / n};
}

SliceReport slice_complexity(const std::vector<const UtteranceRecord*>& records,
                             const std::vector<bool>& matched) {
  if (records.size() != matched.size())
    throw Error(Errc::LengthMismatch, "records vs results");
  SliceReport out;
  out.slice_kind = "complexity";
  out.buckets = {{"simple", 0, 0}, {"complex", 0, 0}};
  for (size_t i = 0; i < records.size(); ++i) {
    SliceBucket& b = out.buckets[records[i]->depth >= 2 ? 1 : 0];
    ++b.n;
    if (matched[i]) ++b.matched;
  }
  return out;
}

SliceReport slice_frequency(const std::vector<const UtteranceRecord*>& test_records,
                            const Corpus& train_corpus,
                            const std::vector<bool>& matched) {
  if (test_records.size() != matched.size())
    throw Error(Errc::LengthMismatch, "records vs results");

  std::map<std::string, long> train_freq;
  for (const UtteranceRecord& r : train_corpus.records()) ++train_freq[r.skeleton];

  struct Row { long freq; const UtteranceRecord* rec; bool matched; };
  std::vector<Row> rows;
  rows.reserve(test_records.size());
  for (size_t i = 0; i < test_records.size(); ++i) {
    auto it = train_freq.find(test_records[i]->skeleton);
    rows.push_back({it == train_freq.end() ? 0 : it->second, test_records[i], matched[i]});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.freq != b.freq) return a.freq < b.freq;
    if (a.rec->skeleton != b.rec->skeleton) return a.rec->skeleton < b.rec->skeleton;
    return a.rec->id < b.rec->id;
  });

  static const char* kNames[5] = {"Very Low", "Low", "Medium", "High", "Very High"};
  SliceReport out;
  out.slice_kind = "frequency_quintile";
  const size_t n = rows.size();
  size_t start = 0;
  for (size_t b = 0; b < 5; ++b) {
    // Earlier buckets take the larger size.
    size_t size = n / 5 + (b < n % 5 ? 1 : 0);
    SliceBucket bucket{kNames[b], 0, 0};
    for (size_t i = start; i < start + size; ++i) {
      ++bucket.n;
      if (rows[i].matched) ++bucket.matched;
    }
    start += size;
    out.buckets.push_back(bucket);
  }
  return out;
}

double relative_improvement(double a, double b) {
  if (b <= 0) throw Error(Errc::ZeroBaseline, "baseline must be > 0");
  return 100.0 * (a - b) / b;
}

EvalReport evaluate(const Corpus& corpus, const PredictionSet& preds) {
  std::vector<MatchResult> results;
  long unparseable = 0, missing = 0;
  for (const UtteranceRecord& rec : corpus.records()) {
    auto it = preds.preds.find(rec.id);
    bool ok = false;
    if (it == preds.preds.end()) {
      ++missing;
    } else {
      try {
        ok = serialize(canonicalize(parse_top(it->second))) == rec.canonical;
      } catch (const Error&) {
        ++unparseable;
      }
    }
    results.push_back({rec.domain, ok});
  }
  EvalReport r = aggregate(results);
  r.split = corpus.split_name();
  r.unparseable = unparseable;
  r.missing = missing;
  return r;
}

std::string report_to_json(const EvalReport& r, const std::string& config_json) {
  ordered_json j;
  j["split"] = r.split;
  ordered_json pd;
  for (const auto& [domain, stat] : r.per_domain) {  // std::map: sorted keys
    ordered_json d;
    d["n"] = stat.n;
    d["frame_accuracy"] = round2(stat.frame_accuracy());
    pd[domain] = std::move(d);
  }
  j["per_domain"] = std::move(pd);
  j["micro_avg"] = round2(r.micro_avg);
  j["macro_avg"] = round2(r.macro_avg);
  j["unparseable"] = r.unparseable;
  j["missing"] = r.missing;
  ordered_json slices = ordered_json::array();
  for (const SliceReport& s : r.slices) slices.push_back(slice_json(s));
  j["slices"] = std::move(slices);
  if (!config_json.empty()) j["config"] = ordered_json::parse(config_json);
  return j.dump(2) + "\n";
}

void emit_report(const EvalReport& r, const std::string& path,
                 const std::string& config_json) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  out << report_to_json(r, config_json);
}

}  // namespace retronlu
