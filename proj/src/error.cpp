#include "wavegame/error.hpp"

namespace wavegame {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
        case ErrorCode::EventNotBracketed: return "EventNotBracketed";
        case ErrorCode::NoBracket: return "NoBracket";
        case ErrorCode::InvalidEta: return "InvalidEta";
        case ErrorCode::ComplexEigenvalues: return "ComplexEigenvalues";
        case ErrorCode::SeedTooLarge: return "SeedTooLarge";
        case ErrorCode::SeedBranchWrong: return "SeedBranchWrong";
        case ErrorCode::DomainExceeded: return "DomainExceeded";
        case ErrorCode::SpeedTooLarge: return "SpeedTooLarge";
        case ErrorCode::NegativeDensity: return "NegativeDensity";
        case ErrorCode::NoLanding: return "NoLanding";
        case ErrorCode::NoPeriodicOrbit: return "NoPeriodicOrbit";
        case ErrorCode::NoExtinctionSpeed: return "NoExtinctionSpeed";
        case ErrorCode::NonConvexLagrangian: return "NonConvexLagrangian";
        case ErrorCode::BlowUp: return "BlowUp";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::UnboundedCurvature: return "UnboundedCurvature";
        case ErrorCode::NoCrossing: return "NoCrossing";
        case ErrorCode::CFLViolation: return "CFLViolation";
        case ErrorCode::FrontLeftDomain: return "FrontLeftDomain";
        case ErrorCode::InvasionFailed: return "InvasionFailed";
    }
    return "Unknown";
}

}  // namespace wavegame
