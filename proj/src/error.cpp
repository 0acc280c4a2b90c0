#include "rankfuse/error.hpp"

namespace rankfuse {

std::string_view errc_name(Errc code) {
  switch (code) {
  case Errc::MalformedLine: return "MalformedLine";
  case Errc::DuplicateDocument: return "DuplicateDocument";
  case Errc::MixedTags: return "MixedTags";
  case Errc::NegativeGrade: return "NegativeGrade";
  case Errc::DuplicateJudgment: return "DuplicateJudgment";
  case Errc::DuplicateVariation: return "DuplicateVariation";
  case Errc::UnparseableDate: return "UnparseableDate";
  case Errc::MissingColumn: return "MissingColumn";
  case Errc::EmptyCorpus: return "EmptyCorpus";
  case Errc::DuplicateDocId: return "DuplicateDocId";
  case Errc::EmptyQuery: return "EmptyQuery";
  case Errc::EmptyRanking: return "EmptyRanking";
  case Errc::NoSources: return "NoSources";
  case Errc::InvalidPhi: return "InvalidPhi";
  case Errc::InvalidArgument: return "InvalidArgument";
  case Errc::DuplicateTag: return "DuplicateTag";
  case Errc::TooFewValues: return "TooFewValues";
  case Errc::UnknownSubcommand: return "UnknownSubcommand";
  case Errc::Io: return "Io";
  case Errc::BadIndexFormat: return "BadIndexFormat";
  }
  return "Unknown";
}

} // namespace rankfuse
