#pragma once

#include <stdexcept>
#include <string>

namespace manurag {

/// Every failure the engine can raise, one kind per contract violation.
enum class ErrorKind {
    // corpus
    MissingAsset,
    DuplicateUuid,
    UnreadableFile,
    MalformedManifest,
    MalformedLink,
    // providers
    EmptyInput,
    ProviderUnreachable,
    ProviderRejected,
    UndecodableImage,
    FixtureMiss,
    ContextTooLarge,
    // vector store
    DimMismatch,
    ZeroVector,
    EmptyStore,
    IoFailure,
    CorruptIndex,
    // bench
    MalformedRow,
    EmptyDataset,
    UndefinedMetric,
    // cli
    StaleIndex,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingAsset: return "MissingAsset";
        case ErrorKind::DuplicateUuid: return "DuplicateUuid";
        case ErrorKind::UnreadableFile: return "UnreadableFile";
        case ErrorKind::MalformedManifest: return "MalformedManifest";
        case ErrorKind::MalformedLink: return "MalformedLink";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::ProviderUnreachable: return "ProviderUnreachable";
        case ErrorKind::ProviderRejected: return "ProviderRejected";
        case ErrorKind::UndecodableImage: return "UndecodableImage";
        case ErrorKind::FixtureMiss: return "FixtureMiss";
        case ErrorKind::ContextTooLarge: return "ContextTooLarge";
        case ErrorKind::DimMismatch: return "DimMismatch";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::EmptyStore: return "EmptyStore";
        case ErrorKind::IoFailure: return "IoFailure";
        case ErrorKind::CorruptIndex: return "CorruptIndex";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::UndefinedMetric: return "UndefinedMetric";
        case ErrorKind::StaleIndex: return "StaleIndex";
    }
    return "UnknownError";
}

}  // namespace manurag
