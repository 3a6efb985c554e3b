#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace volts {

enum class ErrorCode {
  MalformedRow,
  InvariantViolation,
  EmptySeries,
  NoCommonDates,
  EmptyWindow,
  WindowTooShort,
  SeriesTooShort,
  AllFlagged,
  InfeasibleBand,
  TooFewSeries,
  NotThreeClusters,
  SingularDesign,
  DegenerateVariance,
  NoSignificantEdges,
  ZeroVariance,
  NoDownside,
  ZeroDrawdown,
  BudgetExhausted,
  SignalOutOfCalendar,
  InvalidArgument,
  Io,
  Config,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as this exception; `code()` is the
// machine-readable kind, `what()` carries the context (row index, ticker...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace volts
