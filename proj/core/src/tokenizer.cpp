#include "dpikit/tokenizer.hpp"

#include "dpikit/errors.hpp"

#include <algorithm>

namespace dpikit {

TokenSequence encode(std::span<const uint8_t> payload, int32_t max_len) {
    if (payload.empty()) throw EmptyPayloadError();
    if (max_len < 1) throw Error("max_len must be at least 1");

    TokenSequence seq;
    const size_t keep = std::min(payload.size(), static_cast<size_t>(max_len));
    seq.true_len = static_cast<int32_t>(keep);
    seq.ids.resize(static_cast<size_t>(max_len), vocab::pad_id);
    seq.mask.assign(static_cast<size_t>(max_len), 0);
    for (size_t i = 0; i < keep; ++i) {
        seq.ids[i] = payload[i];
        seq.mask[i] = 1;
    }
    return seq;
}

std::vector<uint8_t> decode(const TokenSequence& seq) {
    std::vector<uint8_t> bytes;
    bytes.reserve(static_cast<size_t>(seq.true_len));
    for (int32_t i = 0; i < seq.true_len; ++i) {
        const int32_t id = seq.ids[static_cast<size_t>(i)];
        if (id < 0 || id > 255) throw NonByteTokenError(id, static_cast<size_t>(i));
        bytes.push_back(static_cast<uint8_t>(id));
    }
    return bytes;
}

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::vector<uint8_t> hex_to_bytes(std::string_view hex) {
    if (hex.size() % 2 != 0) throw OddLengthHexError();
    std::vector<uint8_t> bytes;
    bytes.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        const int hi = hex_digit(hex[i]);
        if (hi < 0) throw InvalidHexCharError(i);
        const int lo = hex_digit(hex[i + 1]);
        if (lo < 0) throw InvalidHexCharError(i + 1);
        bytes.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    return bytes;
}

std::string bytes_to_hex(std::span<const uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        hex.push_back(digits[b >> 4]);
        hex.push_back(digits[b & 0x0f]);
    }
    return hex;
}

} // namespace dpikit
