#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rankfuse {

enum class Errc {
  MalformedLine,
  DuplicateDocument,
  MixedTags,
  NegativeGrade,
  DuplicateJudgment,
  DuplicateVariation,
  UnparseableDate,
  MissingColumn,
  EmptyCorpus,
  DuplicateDocId,
  EmptyQuery,
  EmptyRanking,
  NoSources,
  InvalidPhi,
  InvalidArgument,
  DuplicateTag,
  TooFewValues,
  UnknownSubcommand,
  Io,
  BadIndexFormat,
};

std::string_view errc_name(Errc code);

// All library failures are reported through this type; code() is what
// callers branch on, what() carries file/line context when known.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string &message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

// Collects non-fatal diagnostics. Functions accept a nullable pointer; a null
// sink drops warnings.
struct Warnings {
  std::vector<std::string> messages;

  void add(std::string message) { messages.push_back(std::move(message)); }
  bool empty() const noexcept { return messages.empty(); }
  std::size_t size() const noexcept { return messages.size(); }
};

inline void warn(Warnings *sink, std::string message) {
  if (sink != nullptr)
    sink->add(std::move(message));
}

} // namespace rankfuse
