#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace confsec {

enum class ErrorCode {
  InvalidArgument,
  MismatchedSpace,
  AmbiguousGeodesic,
  DegenerateRegularValue,
  CoincidenceDetected,
  SearchBudgetExceeded,
  Contradiction,
  DegenerateQuery,
  Unsupported,
  Parse,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace confsec
