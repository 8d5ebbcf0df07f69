#pragma once

#include <stdexcept>
#include <string>

namespace retronlu {

// Error codes shared across the toolkit. Parse errors carry the offending
// row/position in the message text.
enum class Errc {
  // topformat
  UnbalancedBrackets,
  EmptyNode,
  RootNotIntent,
  MixedSlotChildren,
  TrailingGarbage,
  InvalidChild,
  // embedding
  DimTooSmall,
  DimMismatch,
  DuplicateId,
  MissingId,
  ParseError,
  // vindex
  EmptyInput,
  KZero,
  FormatError,
  VersionMismatch,
  // corpus
  RowParseError,
  ColumnCountError,
  EmptyFile,
  BadFractions,
  UnknownDomain,
  // augment
  EmptyIndex,
  NoCandidates,
  UnknownNeighborId,
  // knnparser / evaluation
  UnknownId,
  GoldUnparseable,
  EmptyResults,
  LengthMismatch,
  ZeroBaseline,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace retronlu
