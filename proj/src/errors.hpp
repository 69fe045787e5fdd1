#pragma once

#include <stdexcept>
#include <string>

namespace rlens {

// Error categories shared by the library and the C API. Values are stable;
// the C header mirrors them one-to-one.
enum class Errc {
    DomainError = 1,
    EmptyCondition = 2,
    ConfigError = 3,
    ParseError = 4,
    DuplicateTrial = 5,
    LabelError = 6,
    EmptyDataset = 7,
    OutOfScopeAiAccuracy = 8,
    AiAccuracyMismatch = 9,
    UnknownCondition = 10,
    PointOutsideEnvelope = 11,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

inline const char* errc_name(Errc code) {
    switch (code) {
    case Errc::DomainError: return "DomainError";
    case Errc::EmptyCondition: return "EmptyCondition";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateTrial: return "DuplicateTrial";
    case Errc::LabelError: return "LabelError";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::OutOfScopeAiAccuracy: return "OutOfScopeAiAccuracy";
    case Errc::AiAccuracyMismatch: return "AiAccuracyMismatch";
    case Errc::UnknownCondition: return "UnknownCondition";
    case Errc::PointOutsideEnvelope: return "PointOutsideEnvelope";
    }
    return "UnknownError";
}

} // namespace rlens
