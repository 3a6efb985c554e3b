#include "volts/error.hpp"

namespace volts {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::NoCommonDates: return "NoCommonDates";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::AllFlagged: return "AllFlagged";
    case ErrorCode::InfeasibleBand: return "InfeasibleBand";
    case ErrorCode::TooFewSeries: return "TooFewSeries";
    case ErrorCode::NotThreeClusters: return "NotThreeClusters";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::NoSignificantEdges: return "NoSignificantEdges";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NoDownside: return "NoDownside";
    case ErrorCode::ZeroDrawdown: return "ZeroDrawdown";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::SignalOutOfCalendar: return "SignalOutOfCalendar";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace volts
