#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace artism {

enum class ErrorCode {
    // corpus
    MissingField,
    MalformedYear,
    MalformedRecord,
    InsufficientMaterial,
    FileUnreadable,
    DuplicateExternalId,
    // memory
    TickRegression,
    UnknownAgent,
    // gateway
    UnknownTemplate,
    MissingBinding,
    BackendTimeout,
    BackendRefused,
    EmptyCompletion,
    MalformedOutput,
    // social
    DanglingReply,
    DuplicatePostId,
    InvalidPost,
    UnknownCursor,
    UnknownSession,
    ReplyUnavailable,
    // ismism
    SyntheticWithoutSource,
    ArityTooLarge,
    AlreadyFedBack,
    UnknownIsm,
    UnknownCritique,
    // orchestrator
    SnapshotCorrupt,
    ConfigError,
    // generic precondition violation
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

inline void require(bool condition, const std::string& detail) {
    if (!condition) fail(ErrorCode::InvalidArgument, detail);
}

}  // namespace artism
