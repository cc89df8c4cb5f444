#include "ginger/error.hpp"

namespace ginger {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::MissingBinding: return "MissingBinding";
    case ErrorKind::UnknownTemplate: return "UnknownTemplate";
    case ErrorKind::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorKind::ProviderRejected: return "ProviderRejected";
    case ErrorKind::EmptyCompletion: return "EmptyCompletion";
    case ErrorKind::RewriteParseFailure: return "RewriteParseFailure";
    case ErrorKind::DuplicatePassageId: return "DuplicatePassageId";
    case ErrorKind::UnknownPassage: return "UnknownPassage";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::QueryIdMismatch: return "QueryIdMismatch";
    case ErrorKind::AnnotationMismatch: return "AnnotationMismatch";
    case ErrorKind::MalformedTags: return "MalformedTags";
    case ErrorKind::ScorerFailure: return "ScorerFailure";
    case ErrorKind::NoSummaries: return "NoSummaries";
    case ErrorKind::NoNuggets: return "NoNuggets";
    case ErrorKind::NoJudgedQueries: return "NoJudgedQueries";
    case ErrorKind::NoVitalNuggets: return "NoVitalNuggets";
    case ErrorKind::InsufficientWorkers: return "InsufficientWorkers";
  }
  return "Unknown";
}

}  // namespace ginger
