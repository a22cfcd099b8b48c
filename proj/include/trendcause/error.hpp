#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tc {

enum class ErrorKind {
    DuplicateDate,
    NonFiniteValue,
    DegenerateRange,
    SeriesTooShort,
    EmptyIntersection,
    RegionMismatch,
    LengthMismatch,
    DomainError,
    SingularDesign,
    ZeroVariance,
    ShapeMismatch,
    TooFewSamples,
    NumericalDivergence,
    ParseError,
    UnknownRegion,
    ValueOutOfRange,
    InvalidSpec,
    InvalidConfig,
    IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DuplicateDate: return "DuplicateDate";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::DegenerateRange: return "DegenerateRange";
        case ErrorKind::SeriesTooShort: return "SeriesTooShort";
        case ErrorKind::EmptyIntersection: return "EmptyIntersection";
        case ErrorKind::RegionMismatch: return "RegionMismatch";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::SingularDesign: return "SingularDesign";
        case ErrorKind::ZeroVariance: return "ZeroVariance";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::TooFewSamples: return "TooFewSamples";
        case ErrorKind::NumericalDivergence: return "NumericalDivergence";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnknownRegion: return "UnknownRegion";
        case ErrorKind::ValueOutOfRange: return "ValueOutOfRange";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Library-wide exception. Every failure the toolkit reports carries a kind so
/// callers (and the CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace tc
