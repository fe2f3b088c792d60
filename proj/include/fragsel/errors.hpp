#pragma once

#include <stdexcept>
#include <string>

namespace fragsel {

enum class ErrorKind {
    EmptyDocument,
    SingleSentence,
    NotAnImage,
    LengthMismatch,
    DomainError,
    DimensionMismatch,
    PreconditionViolation,
    MissingTeacherLogits,
    UnsortedEdges,
    EmptyRetrieval,
    FixtureParseError,
    FixtureMiss,
    ScorerFailure,
    DetectorFailure,
    BackendFailure,
    Timeout,
    ConfigError,
    DataError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    // Stable machine-parseable code, e.g. "FIXTURE_MISS".
    const char* code() const;

    // CLI exit code: 3 for backend failures, 4 for data/format errors.
    int exit_code() const;

private:
    ErrorKind kind_;
};

inline const char* Error::code() const {
    switch (kind_) {
        case ErrorKind::EmptyDocument: return "EMPTY_DOCUMENT";
        case ErrorKind::SingleSentence: return "SINGLE_SENTENCE";
        case ErrorKind::NotAnImage: return "NOT_AN_IMAGE";
        case ErrorKind::LengthMismatch: return "LENGTH_MISMATCH";
        case ErrorKind::DomainError: return "DOMAIN_ERROR";
        case ErrorKind::DimensionMismatch: return "DIMENSION_MISMATCH";
        case ErrorKind::PreconditionViolation: return "PRECONDITION_VIOLATION";
        case ErrorKind::MissingTeacherLogits: return "MISSING_TEACHER_LOGITS";
        case ErrorKind::UnsortedEdges: return "UNSORTED_EDGES";
        case ErrorKind::EmptyRetrieval: return "EMPTY_RETRIEVAL";
        case ErrorKind::FixtureParseError: return "FIXTURE_PARSE_ERROR";
        case ErrorKind::FixtureMiss: return "FIXTURE_MISS";
        case ErrorKind::ScorerFailure: return "SCORER_FAILURE";
        case ErrorKind::DetectorFailure: return "DETECTOR_FAILURE";
        case ErrorKind::BackendFailure: return "BACKEND_FAILURE";
        case ErrorKind::Timeout: return "TIMEOUT";
        case ErrorKind::ConfigError: return "CONFIG_ERROR";
        case ErrorKind::DataError: return "DATA_ERROR";
    }
    return "UNKNOWN";
}

inline int Error::exit_code() const {
    switch (kind_) {
        case ErrorKind::FixtureMiss:
        case ErrorKind::ScorerFailure:
        case ErrorKind::DetectorFailure:
        case ErrorKind::BackendFailure:
        case ErrorKind::Timeout:
            return 3;
        default:
            return 4;
    }
}

}  // namespace fragsel
