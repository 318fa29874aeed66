#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace candleseg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class IoErrorKind { file_missing, unsupported_format, corrupt_header, io_failure };

const char* to_string(IoErrorKind kind) noexcept;

class IoError : public Error {
public:
    IoError(IoErrorKind kind, std::filesystem::path path, const std::string& detail);

    IoErrorKind kind() const noexcept { return kind_; }
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    IoErrorKind kind_;
    std::filesystem::path path_;
};

/// A rectangle or index fell outside an image.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Two operands disagree in size or dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the mathematical domain of an operator.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Fewer distinct points than requested clusters.
class InfeasibleKError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters or configuration. `key()` names the offending key when known.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message, std::string key = {})
        : Error(message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Wraps a failure raised while the pipeline executed a particular stage.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& cause)
        : Error("stage '" + stage + "': " + cause), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace candleseg
