#pragma once

#include <stdexcept>
#include <string>

namespace patchprov {

// Error categories shared by the whole library. The C API maps these 1:1
// onto pp_status codes, so keep the numbering stable.
enum class ErrorCode {
    InvalidArgument = 1,
    MalformedDocument = 2,
    UnsupportedFormat = 3,
    UnsupportedProfile = 4,
    MismatchedGramSize = 5,
    EmptyReference = 6,
    NotFound = 7,
    RateLimited = 8,
    NetworkFailure = 9,
    BlockedDomain = 10,
    IoFailure = 11,
    LengthMismatch = 12,
    UnknownLabel = 13,
    MissingDataset = 14,
    Internal = 15,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message)
        , m_code(code)
    {
    }

    ErrorCode code() const { return m_code; }

private:
    ErrorCode m_code;
};

inline const char* error_code_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::MalformedDocument: return "malformed_document";
    case ErrorCode::UnsupportedFormat: return "unsupported_format";
    case ErrorCode::UnsupportedProfile: return "unsupported_profile";
    case ErrorCode::MismatchedGramSize: return "mismatched_gram_size";
    case ErrorCode::EmptyReference: return "empty_reference";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::RateLimited: return "rate_limited";
    case ErrorCode::NetworkFailure: return "network_failure";
    case ErrorCode::BlockedDomain: return "blocked_domain";
    case ErrorCode::IoFailure: return "io_failure";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::UnknownLabel: return "unknown_label";
    case ErrorCode::MissingDataset: return "missing_dataset";
    case ErrorCode::Internal: return "internal";
    }
    return "internal";
}

} // namespace patchprov
