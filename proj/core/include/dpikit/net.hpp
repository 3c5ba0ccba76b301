#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace dpikit {

enum class Protocol : uint8_t { tcp = 6, udp = 17 };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& s); // "tcp"/"udp", case-insensitive

// IPv4 or IPv6 address. v4 occupies bytes[0..3], the rest is zero, so the
// defaulted comparison is well-defined across versions.
struct IpAddr {
    uint8_t version = 4; // 4 or 6
    std::array<uint8_t, 16> bytes{};

    static IpAddr v4(const uint8_t* p);
    static IpAddr v6(const uint8_t* p);
    static IpAddr parse(const std::string& text); // throws Error on bad input
    std::string to_string() const;

    auto operator<=>(const IpAddr&) const = default;
};

struct FiveTuple {
    IpAddr src_ip;
    IpAddr dst_ip;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    Protocol protocol = Protocol::tcp;

    FiveTuple reversed() const {
        return FiveTuple{dst_ip, src_ip, dst_port, src_port, protocol};
    }

    auto operator<=>(const FiveTuple&) const = default;
};

// One extracted transport payload. timestamp is unix seconds; micro- and
// nanosecond captures are both normalized to a real number.
struct PayloadRecord {
    FiveTuple five_tuple;
    double timestamp = 0.0;
    std::vector<uint8_t> payload; // non-empty, at most 65535 bytes
};

} // namespace dpikit
