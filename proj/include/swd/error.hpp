#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swd {

enum class ErrorCode {
    MalformedCsv,
    InconsistentRate,
    EmptyFile,
    UnknownChannel,
    OutOfRange,
    BadLabel,
    MalformedJson,
    SignalTooShort,
    BadWindowSpec,
    BadBand,
    GridRateMismatch,
    DegenerateData,
    NoConvergence,
    DegenerateCoefficients,
    ZeroSpread,
    EmptyModel,
    BadModel,
    TooFewPoints,
    SingleClass,
    TooFewAugment,
    EmptyTestSet,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can report it in a machine-parsable form.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace swd
