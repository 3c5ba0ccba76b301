#include "dpikit/errors.hpp"

#include <cinttypes>
#include <cstdarg>
#include <cstdio>

namespace dpikit {

namespace {

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

} // namespace

UnknownMagicError::UnknownMagicError(uint32_t m, uint64_t off)
    : Error(fmt("not a classic pcap file: unknown magic 0x%08" PRIx32 " at offset %" PRIu64
                " (pcapng and other formats are not supported)",
                m, off)),
      magic(m), offset(off) {}

TruncatedHeaderError::TruncatedHeaderError(uint64_t off)
    : Error(fmt("truncated pcap global header at offset %" PRIu64, off)), offset(off) {}

TruncatedRecordError::TruncatedRecordError(uint64_t record_offset, const std::string& what_part)
    : Error(fmt("truncated pcap record at offset %" PRIu64 ": stream ended inside %s",
                record_offset, what_part.c_str())),
      offset(record_offset) {}

FormatError::FormatError(const std::string& msg, size_t l)
    : Error(fmt("line %zu: %s", l, msg.c_str())), line(l) {}

OddLengthHexError::OddLengthHexError()
    : Error("hex string has odd length") {}

InvalidHexCharError::InvalidHexCharError(size_t idx)
    : Error(fmt("invalid hex character at index %zu", idx)), index(idx) {}

InsufficientBenignError::InsufficientBenignError(size_t b, size_t m)
    : Error(fmt("cannot balance: %zu benign records but %zu malicious", b, m)),
      benign(b), malicious(m) {}

UnknownClassError::UnknownClassError(const std::string& class_name)
    : Error("requested class has zero records: " + class_name) {}

TooSmallError::TooSmallError(size_t n)
    : Error(fmt("dataset too small to split: %zu records (need at least 10)", n)) {}

EmptyPayloadError::EmptyPayloadError()
    : Error("payload is empty") {}

NonByteTokenError::NonByteTokenError(int32_t token, size_t position)
    : Error(fmt("non-byte token id %d at unmasked position %zu", token, position)) {}

ClassCountMismatchError::ClassCountMismatchError(int expected, int actual)
    : Error(fmt("checkpoint expects %d classes but dataset has %d", expected, actual)) {}

LabelOutOfRangeError::LabelOutOfRangeError(int32_t label, int n_classes)
    : Error(fmt("label %d out of range [0, %d)", label, n_classes)) {}

SequenceTooLongError::SequenceTooLongError(size_t length, size_t max_positions)
    : Error(fmt("sequence length %zu exceeds max_positions %zu", length, max_positions)) {}

TokenOutOfRangeError::TokenOutOfRangeError(int32_t token, size_t position)
    : Error(fmt("token id %d at position %zu outside vocabulary", token, position)) {}

MissingCacheError::MissingCacheError()
    : Error("backward requires a cache from a train-mode forward") {}

NonFiniteLossError::NonFiniteLossError(int64_t s)
    : Error(fmt("non-finite loss at optimizer step %" PRId64, s)), step(s) {}

} // namespace dpikit
