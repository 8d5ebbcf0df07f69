#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "retronlu/error.hpp"
#include "retronlu/topformat.hpp"

namespace retronlu {

struct UtteranceRecord {
  std::string id;  // "<split>:<row-number>"
  std::string domain;
  std::string utterance;
  std::string semparse;   // gold frame string as read
  ParseTree tree;         // parse of semparse
  std::string canonical;  // serialize(canonicalize(tree))
  std::string skeleton;
  int depth = 1;
};

class Corpus {
 public:
  Corpus(std::string split_name, std::vector<UtteranceRecord> records);

  const std::string& split_name() const { return split_name_; }
  const std::vector<UtteranceRecord>& records() const { return records_; }
  const std::set<std::string>& domains() const { return domains_; }
  size_t size() const { return records_.size(); }

  const UtteranceRecord* find(const std::string& id) const;

 private:
  std::string split_name_;
  std::vector<UtteranceRecord> records_;
  std::set<std::string> domains_;
  std::unordered_map<std::string, size_t> by_id_;
};

struct IngestOptions {
  // Auto: treat the first line as a header iff its third column fails to
  // parse as a frame.
  enum class Header { Auto, Yes, No };
  Header header = Header::Auto;
  bool skip_bad_rows = false;
};

struct IngestStats {
  size_t rows = 0;
  size_t skipped = 0;
  std::vector<std::pair<size_t, std::string>> errors;  // (row, message)
};

// Reads a TOPv2-style TSV (`domain \t utterance \t semparse`, extra columns
// ignored). Ids are assigned as `<split>:<0-based data row>`. Throws
// RowParseError / ColumnCountError / EmptyFile; with skip_bad_rows the bad
// rows are collected in stats instead.
Corpus ingest_tsv(const std::string& path, const std::string& split_name,
                  const IngestOptions& opts = {}, IngestStats* stats = nullptr);

// Populates the derived fields of a record from its semparse.
UtteranceRecord make_record(std::string id, std::string domain,
                            std::string utterance, std::string semparse);

// Seeded (splitmix64-keyed Fisher-Yates) incremental subsets: subset i holds
// the first ceil(f_i * N / 100) shuffled records, reordered by original
// position, so each subset contains the previous one. Fractions must be
// strictly increasing in (0, 100].
std::vector<Corpus> subset_incremental(const Corpus& c,
                                       const std::vector<double>& fractions,
                                       std::uint64_t seed);

Corpus filter_domain(const Corpus& c, const std::string& domain);

}  // namespace retronlu
