#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retronlu/corpus.hpp"
#include "retronlu/knnparser.hpp"
#include "retronlu/topformat.hpp"

namespace retronlu {

struct DomainStat {
  long n = 0;
  long matched = 0;
  double frame_accuracy() const {
    return n == 0 ? 0.0 : 100.0 * static_cast<double>(matched) / static_cast<double>(n);
  }
};

struct SliceBucket {
  std::string name;
  long n = 0;
  long matched = 0;
  // Null when the bucket is empty.
  std::optional<double> frame_accuracy() const {
    if (n == 0) return std::nullopt;
    return 100.0 * static_cast<double>(matched) / static_cast<double>(n);
  }
};

struct SliceReport {
  std::string slice_kind;  // "complexity" | "frequency_quintile"
  std::vector<SliceBucket> buckets;
};

struct PRReport {
  double intent_precision = 0, intent_recall = 0;
  double slot_precision = 0, slot_recall = 0;
};

struct EvalReport {
  std::string split;
  std::map<std::string, DomainStat> per_domain;
  double micro_avg = 0;   // pooled-example accuracy
  double macro_avg = 0;   // unweighted mean of per-domain accuracies
  long unparseable = 0;
  long missing = 0;       // corpus ids with no prediction
  std::vector<SliceReport> slices;
};

struct MatchResult {
  std::string domain;
  bool matched = false;
};

// True iff pred parses and its canonical serialization equals the gold's.
// Unparseable pred -> false; unparseable gold -> GoldUnparseable.
bool frame_match(const std::string& pred, const std::string& gold);

EvalReport aggregate(const std::vector<MatchResult>& results);

// Macro-averaged multiset precision/recall of intent and slot labels in
// neighbor parses against golds (x100). Empty-vs-empty label multisets
// contribute 1.0, empty-vs-nonempty 0.0.
PRReport neighbor_pr(const std::vector<ParseTree>& neighbor_parses,
                     const std::vector<ParseTree>& gold_parses);

// "simple" (depth 1) vs "complex" (depth >= 2) buckets.
SliceReport slice_complexity(const std::vector<const UtteranceRecord*>& records,
                             const std::vector<bool>& matched);

// Five contiguous buckets (Very Low .. Very High) of test records ordered
// ascending by training-set frequency of their frame skeleton; earlier
// buckets take the larger size when N % 5 != 0.
SliceReport slice_frequency(const std::vector<const UtteranceRecord*>& test_records,
                            const Corpus& train_corpus,
                            const std::vector<bool>& matched);

// 100 * (a - b) / b; b must be > 0.
double relative_improvement(double a, double b);

// Scores a prediction set against a corpus; fills per-domain stats,
// unparseable and missing counts. Missing predictions count as mismatches.
EvalReport evaluate(const Corpus& corpus, const PredictionSet& preds);

// JSON report with stable key order; floats rounded to 2 decimals. The
// optional `config` blob is echoed under key "config".
void emit_report(const EvalReport& r, const std::string& path,
                 const std::string& config_json = "");
std::string report_to_json(const EvalReport& r, const std::string& config_json = "");

}  // namespace retronlu
