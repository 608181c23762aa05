#pragma once

#include <stdexcept>
#include <string>

namespace dqlab {

enum class ErrorKind {
    kMalformedInterval,
    kUndefinedDensity,
    kEmptyInput,
    kCannotSample,
    kOutsideDomain,
    kAmbiguousDerivative,
    kDiagonalExcluded,
    kSplitRequired,
    kDegenerateMap,
    kInvalidParameter,
    kPreconditionViolation,
    kSearchFailure,
    kDensityTooLow,
    kThetaTooLarge,
    kPairDegenerate,
    kSchema,
    kIo,
};

const char* to_string(ErrorKind kind);

/// The single exception type thrown by the library. `kind` lets callers (the
/// CLI in particular) map failures onto exit codes without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace dqlab
