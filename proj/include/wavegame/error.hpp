#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavegame {

/// Failure categories raised by the numerical modules. The CLI maps every
/// code to exit status 1; configuration problems use ConfigError instead.
enum class ErrorCode {
    MaxStepsExceeded,
    EventNotBracketed,
    NoBracket,
    InvalidEta,
    ComplexEigenvalues,
    SeedTooLarge,
    SeedBranchWrong,
    DomainExceeded,
    SpeedTooLarge,
    NegativeDensity,
    NoLanding,
    NoPeriodicOrbit,
    NoExtinctionSpeed,
    NonConvexLagrangian,
    BlowUp,
    NoConvergence,
    UnboundedCurvature,
    NoCrossing,
    CFLViolation,
    FrontLeftDomain,
    InvasionFailed,
};

std::string_view to_string(ErrorCode code);

class WaveError : public std::runtime_error {
public:
    WaveError(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Invalid user input (bad config values, malformed JSON). Exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wavegame
