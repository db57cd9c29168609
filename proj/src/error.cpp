#include "artism/error.hpp"

namespace artism {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingField: return "MissingField";
        case ErrorCode::MalformedYear: return "MalformedYear";
        case ErrorCode::MalformedRecord: return "MalformedRecord";
        case ErrorCode::InsufficientMaterial: return "InsufficientMaterial";
        case ErrorCode::FileUnreadable: return "FileUnreadable";
        case ErrorCode::DuplicateExternalId: return "DuplicateExternalId";
        case ErrorCode::TickRegression: return "TickRegression";
        case ErrorCode::UnknownAgent: return "UnknownAgent";
        case ErrorCode::UnknownTemplate: return "UnknownTemplate";
        case ErrorCode::MissingBinding: return "MissingBinding";
        case ErrorCode::BackendTimeout: return "BackendTimeout";
        case ErrorCode::BackendRefused: return "BackendRefused";
        case ErrorCode::EmptyCompletion: return "EmptyCompletion";
        case ErrorCode::MalformedOutput: return "MalformedOutput";
        case ErrorCode::DanglingReply: return "DanglingReply";
        case ErrorCode::DuplicatePostId: return "DuplicatePostId";
        case ErrorCode::InvalidPost: return "InvalidPost";
        case ErrorCode::UnknownCursor: return "UnknownCursor";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::ReplyUnavailable: return "ReplyUnavailable";
        case ErrorCode::SyntheticWithoutSource: return "SyntheticWithoutSource";
        case ErrorCode::ArityTooLarge: return "ArityTooLarge";
        case ErrorCode::AlreadyFedBack: return "AlreadyFedBack";
        case ErrorCode::UnknownIsm: return "UnknownIsm";
        case ErrorCode::UnknownCritique: return "UnknownCritique";
        case ErrorCode::SnapshotCorrupt: return "SnapshotCorrupt";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace artism
