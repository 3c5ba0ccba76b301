#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dpikit {

// Base for everything thrown by this library. The CLI maps subclasses onto
// its exit-code taxonomy: data/format errors -> 2, runtime/numeric -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- data / format errors -------------------------------------------------

class IoError : public Error {
public:
    using Error::Error;
};

class UnknownMagicError : public Error {
public:
    UnknownMagicError(uint32_t magic, uint64_t offset);
    uint32_t magic;
    uint64_t offset;
};

class TruncatedHeaderError : public Error {
public:
    explicit TruncatedHeaderError(uint64_t offset);
    uint64_t offset;
};

class TruncatedRecordError : public Error {
public:
    TruncatedRecordError(uint64_t record_offset, const std::string& what_part);
    uint64_t offset;
};

class FormatError : public Error {
public:
    FormatError(const std::string& msg, size_t line);
    size_t line;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class OddLengthHexError : public Error {
public:
    OddLengthHexError();
};

class InvalidHexCharError : public Error {
public:
    explicit InvalidHexCharError(size_t index);
    size_t index;
};

class InsufficientBenignError : public Error {
public:
    InsufficientBenignError(size_t benign, size_t malicious);
    size_t benign;
    size_t malicious;
};

class UnknownClassError : public Error {
public:
    explicit UnknownClassError(const std::string& class_name);
};

class TooSmallError : public Error {
public:
    explicit TooSmallError(size_t n);
};

class EmptyPayloadError : public Error {
public:
    EmptyPayloadError();
};

class NonByteTokenError : public Error {
public:
    NonByteTokenError(int32_t token, size_t position);
};

class VersionMismatchError : public Error {
public:
    using Error::Error;
};

class ClassCountMismatchError : public Error {
public:
    ClassCountMismatchError(int expected, int actual);
};

// ---- shape / numeric errors -------------------------------------------------

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

class LabelOutOfRangeError : public Error {
public:
    LabelOutOfRangeError(int32_t label, int n_classes);
};

class LengthMismatchError : public Error {
public:
    using Error::Error;
};

class EmptyMatrixError : public Error {
public:
    using Error::Error;
};

class SequenceTooLongError : public Error {
public:
    SequenceTooLongError(size_t length, size_t max_positions);
};

class TokenOutOfRangeError : public Error {
public:
    TokenOutOfRangeError(int32_t token, size_t position);
};

class MissingCacheError : public Error {
public:
    MissingCacheError();
};

class InvalidScheduleError : public Error {
public:
    using Error::Error;
};

class NonFiniteLossError : public Error {
public:
    explicit NonFiniteLossError(int64_t step);
    int64_t step;
};

class NumericHealthError : public Error {
public:
    using Error::Error;
};

} // namespace dpikit
