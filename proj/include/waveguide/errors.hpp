#pragma once

#include <stdexcept>
#include <string>

namespace wg {

// Every failure mode carries a stable machine-readable kind string so the CLI
// can serialize it; the what() text is for humans.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define WG_DEFINE_ERROR(NAME)                                   \
    class NAME : public Error {                                 \
    public:                                                     \
        explicit NAME(const std::string& message)               \
            : Error(#NAME, message) {}                          \
    }

WG_DEFINE_ERROR(NonConvergence);
WG_DEFINE_ERROR(SingularJacobian);
WG_DEFINE_ERROR(NoSignChange);
WG_DEFINE_ERROR(StepUnderflow);
WG_DEFINE_ERROR(EventStorm);
WG_DEFINE_ERROR(InvalidParams);
WG_DEFINE_ERROR(InvalidFrame);
WG_DEFINE_ERROR(SharpModel);
WG_DEFINE_ERROR(NonSharp);
WG_DEFINE_ERROR(NoReflectionFound);
WG_DEFINE_ERROR(OutOfDomain);
WG_DEFINE_ERROR(BranchViolation);
WG_DEFINE_ERROR(InvalidSample);
WG_DEFINE_ERROR(UnitarityViolation);
WG_DEFINE_ERROR(CoverageGap);
WG_DEFINE_ERROR(ResidualTooLarge);
WG_DEFINE_ERROR(SmallQ);
WG_DEFINE_ERROR(NoEscape);
WG_DEFINE_ERROR(NoGrowth);

#undef WG_DEFINE_ERROR

// Branch continuation failure; carries the parameter value where the branch
// could no longer be continued.
class BranchLost : public Error {
public:
    explicit BranchLost(double parameter)
        : Error("BranchLost", "branch lost at parameter " + std::to_string(parameter)),
          parameter_(parameter) {}
    double parameter() const { return parameter_; }

private:
    double parameter_;
};

} // namespace wg
