#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hqmsa {

/// Failure categories surfaced by the library. The CLI prints the kind in its
/// machine-readable error record.
enum class ErrorKind {
    Input,      // bad residue, malformed FASTA, invalid sequence set
    Dimension,  // lengths or sizes that do not line up
    Capacity,   // qubit count over an enumeration or state-vector cap
    Config,     // scenario validation
    Io,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Input: return "input";
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Capacity: return "capacity";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& m) : Error(ErrorKind::Input, m) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& m) : Error(ErrorKind::Dimension, m) {}
};

class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& m) : Error(ErrorKind::Capacity, m) {}
};

class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& m)
        : Error(ErrorKind::Config, field + ": " + m), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& m) : Error(ErrorKind::Io, m) {}
};

}  // namespace hqmsa
