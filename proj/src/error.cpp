#include "rllp/error.hpp"

namespace rllp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DegenerateGamma: return "DegenerateGamma";
        case ErrorCode::AttitudeOutOfRange: return "AttitudeOutOfRange";
        case ErrorCode::ZeroCommand: return "ZeroCommand";
        case ErrorCode::DegenerateLos: return "DegenerateLos";
        case ErrorCode::PathExhausted: return "PathExhausted";
        case ErrorCode::TargetSwitched: return "TargetSwitched";
        case ErrorCode::NonPositiveTau: return "NonPositiveTau";
        case ErrorCode::SingularTheta: return "SingularTheta";
        case ErrorCode::EmptyRun: return "EmptyRun";
        case ErrorCode::InvalidPath: return "InvalidPath";
        case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

}  // namespace rllp
