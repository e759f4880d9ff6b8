#include "swd/error.hpp"

namespace swd {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedCsv: return "MalformedCsv";
        case ErrorCode::InconsistentRate: return "InconsistentRate";
        case ErrorCode::EmptyFile: return "EmptyFile";
        case ErrorCode::UnknownChannel: return "UnknownChannel";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::BadLabel: return "BadLabel";
        case ErrorCode::MalformedJson: return "MalformedJson";
        case ErrorCode::SignalTooShort: return "SignalTooShort";
        case ErrorCode::BadWindowSpec: return "BadWindowSpec";
        case ErrorCode::BadBand: return "BadBand";
        case ErrorCode::GridRateMismatch: return "GridRateMismatch";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegenerateCoefficients: return "DegenerateCoefficients";
        case ErrorCode::ZeroSpread: return "ZeroSpread";
        case ErrorCode::EmptyModel: return "EmptyModel";
        case ErrorCode::BadModel: return "BadModel";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::TooFewAugment: return "TooFewAugment";
        case ErrorCode::EmptyTestSet: return "EmptyTestSet";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace swd
