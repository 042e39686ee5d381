#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aegis {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorKind { Config = 2, InputFormat = 3, Model = 4, Runtime = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

// Tensor/graph shape mismatches. Messages always name both shapes.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error(ErrorKind::Runtime, msg) {}
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(ErrorKind::Runtime, msg) {}
};

// Out-of-range arguments (stride < 1, t out of range, ...).
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& msg) : Error(ErrorKind::Config, msg) {}
};

// Malformed byte streams: bad magic, bad header fields.
class FormatError : public Error {
public:
    FormatError(ErrorKind kind, const std::string& msg) : Error(kind, msg) {}
};

// Stream ended before a declared payload; carries the failing offset.
class TruncationError : public FormatError {
public:
    TruncationError(ErrorKind kind, const std::string& msg, std::size_t offset)
        : FormatError(kind, msg + " (offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Structurally sound container with inconsistent contents.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(ErrorKind::Model, msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(ErrorKind::Config, msg) {}
};

// Window/crop/bounds misuse at runtime.
class BoundsError : public Error {
public:
    explicit BoundsError(const std::string& msg) : Error(ErrorKind::Runtime, msg) {}
};

class CropError : public Error {
public:
    explicit CropError(const std::string& msg) : Error(ErrorKind::Runtime, msg) {}
};

class NotReadyError : public Error {
public:
    explicit NotReadyError(const std::string& msg) : Error(ErrorKind::Runtime, msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(ErrorKind::Runtime, msg) {}
};

}  // namespace aegis
