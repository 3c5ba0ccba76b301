#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dpikit {

// 258-entry vocabulary: ids 0..255 are the byte values themselves, plus one
// padding and one unknown token. Nothing this toolkit encodes ever produces
// unk; it exists so foreign datasets/checkpoints can be decoded defensively.
namespace vocab {
inline constexpr int32_t size = 258;
inline constexpr int32_t pad_id = 256;
inline constexpr int32_t unk_id = 257;
} // namespace vocab

struct TokenSequence {
    std::vector<int32_t> ids;  // length max_len
    std::vector<uint8_t> mask; // 1 for real tokens, 0 for padding
    int32_t true_len = 0;

    int32_t max_len() const { return static_cast<int32_t>(ids.size()); }
};

// Byte-identity encoding, truncating to the first max_len bytes and padding
// the remainder with pad_id. Throws EmptyPayloadError.
TokenSequence encode(std::span<const uint8_t> payload, int32_t max_len);

// Inverse of encode on its valid domain; throws NonByteTokenError if an
// unmasked slot holds pad/unk.
std::vector<uint8_t> decode(const TokenSequence& seq);

// Lowercase two-characters-per-byte hexadecimal, mutual inverses.
std::vector<uint8_t> hex_to_bytes(std::string_view hex);
std::string bytes_to_hex(std::span<const uint8_t> bytes);

} // namespace dpikit
