#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ginger {

enum class ErrorKind {
  ConfigInvalid,
  InvalidArgument,
  Io,
  Parse,
  MissingBinding,
  UnknownTemplate,
  ProviderUnavailable,
  ProviderRejected,
  EmptyCompletion,
  RewriteParseFailure,
  DuplicatePassageId,
  UnknownPassage,
  DimensionMismatch,
  QueryIdMismatch,
  AnnotationMismatch,
  MalformedTags,
  ScorerFailure,
  NoSummaries,
  NoNuggets,
  NoJudgedQueries,
  NoVitalNuggets,
  InsufficientWorkers,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace ginger
