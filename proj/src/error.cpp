#include "retronlu/error.hpp"

namespace retronlu {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::UnbalancedBrackets: return "UnbalancedBrackets";
    case Errc::EmptyNode: return "EmptyNode";
    case Errc::RootNotIntent: return "RootNotIntent";
    case Errc::MixedSlotChildren: return "MixedSlotChildren";
    case Errc::TrailingGarbage: return "TrailingGarbage";
    case Errc::InvalidChild: return "InvalidChild";
    case Errc::DimTooSmall: return "DimTooSmall";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::MissingId: return "MissingId";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::KZero: return "KZero";
    case Errc::FormatError: return "FormatError";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::RowParseError: return "RowParseError";
    case Errc::ColumnCountError: return "ColumnCountError";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::BadFractions: return "BadFractions";
    case Errc::UnknownDomain: return "UnknownDomain";
    case Errc::EmptyIndex: return "EmptyIndex";
    case Errc::NoCandidates: return "NoCandidates";
    case Errc::UnknownNeighborId: return "UnknownNeighborId";
    case Errc::UnknownId: return "UnknownId";
    case Errc::GoldUnparseable: return "GoldUnparseable";
    case Errc::EmptyResults: return "EmptyResults";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ZeroBaseline: return "ZeroBaseline";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace retronlu
