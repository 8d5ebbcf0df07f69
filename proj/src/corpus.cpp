#include "retronlu/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "retronlu/hashing.hpp"

namespace retronlu {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

}  // namespace

Corpus::Corpus(std::string split_name, std::vector<UtteranceRecord> records)
    : split_name_(std::move(split_name)), records_(std::move(records)) {
  for (size_t i = 0; i < records_.size(); ++i) {
    domains_.insert(records_[i].domain);
    if (!by_id_.emplace(records_[i].id, i).second)
      throw Error(Errc::DuplicateId, "record id '" + records_[i].id + "'");
  }
}

const UtteranceRecord* Corpus::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

UtteranceRecord make_record(std::string id, std::string domain,
                            std::string utterance, std::string semparse) {
  UtteranceRecord rec;
  rec.id = std::move(id);
  rec.domain = std::move(domain);
  rec.utterance = std::move(utterance);
  rec.semparse = std::move(semparse);
  rec.tree = parse_top(rec.semparse);
  rec.canonical = serialize(canonicalize(rec.tree));
  rec.skeleton = skeleton(rec.tree);
  rec.depth = depth(rec.tree);
  return rec;
}

Corpus ingest_tsv(const std::string& path, const std::string& split_name,
                  const IngestOptions& opts, IngestStats* stats) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw Error(Errc::EmptyFile, path);

  size_t first = 0;
  if (opts.header == IngestOptions::Header::Yes) {
    first = 1;
  } else if (opts.header == IngestOptions::Header::Auto) {
    auto cols = split_tabs(lines[0]);
    if (cols.size() >= 3) {
      try {
        parse_top(cols[2]);
      } catch (const Error&) {
        first = 1;
      }
    } else {
      first = 1;
    }
  }
  if (first >= lines.size()) throw Error(Errc::EmptyFile, path + " (header only)");

  std::vector<UtteranceRecord> records;
  size_t row = 0;
  for (size_t i = first; i < lines.size(); ++i, ++row) {
    auto cols = split_tabs(lines[i]);
    std::string id = split_name + ":" + std::to_string(row);
    try {
      if (cols.size() < 3)
        throw Error(Errc::ColumnCountError,
                    "row " + std::to_string(row) + " has " + std::to_string(cols.size()) +
                        " columns, need 3");
      records.push_back(make_record(id, cols[0], cols[1], cols[2]));
    } catch (const Error& e) {
      if (e.code() == Errc::ColumnCountError && !opts.skip_bad_rows) throw;
      if (!opts.skip_bad_rows && e.code() != Errc::ColumnCountError)
        throw Error(Errc::RowParseError, "row " + std::to_string(row) + ": " + e.what());
      if (stats) stats->errors.emplace_back(row, e.what());
      if (stats) ++stats->skipped;
    }
  }
  if (stats) stats->rows = row;
  return Corpus(split_name, std::move(records));
}

std::vector<Corpus> subset_incremental(const Corpus& c,
                                       const std::vector<double>& fractions,
                                       std::uint64_t seed) {
  if (fractions.empty()) throw Error(Errc::BadFractions, "no fractions");
  for (size_t i = 0; i < fractions.size(); ++i) {
    if (fractions[i] <= 0.0 || fractions[i] > 100.0)
      throw Error(Errc::BadFractions, "fraction out of (0,100]");
    if (i > 0 && fractions[i] <= fractions[i - 1])
      throw Error(Errc::BadFractions, "fractions must be strictly increasing");
  }

  const size_t n = c.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(seed);
  for (size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<Corpus> out;
  for (double f : fractions) {
    size_t take = static_cast<size_t>(std::ceil(f * static_cast<double>(n) / 100.0));
    take = std::min(take, n);
    std::vector<size_t> picked(order.begin(), order.begin() + take);
    std::sort(picked.begin(), picked.end());
    std::vector<UtteranceRecord> records;
    records.reserve(take);
    for (size_t idx : picked) records.push_back(c.records()[idx]);
    out.emplace_back(c.split_name(), std::move(records));
  }
  return out;
}

Corpus filter_domain(const Corpus& c, const std::string& domain) {
  if (!c.domains().count(domain))
    throw Error(Errc::UnknownDomain, "'" + domain + "' not in corpus");
  std::vector<UtteranceRecord> records;
  for (const auto& r : c.records())
    if (r.domain == domain) records.push_back(r);
  return Corpus(c.split_name(), std::move(records));
}

}  // namespace retronlu
