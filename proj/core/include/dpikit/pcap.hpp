#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace dpikit {

// Classic libpcap container, both endiannesses, micro/nanosecond timestamp
// magics. On-disk layout:
//
//   global header (24 bytes):
//     u32 magic, u16 version_major, u16 version_minor,
//     i32 thiszone, u32 sigfigs, u32 snaplen, u32 link_type
//   per record (16-byte header + body):
//     u32 ts_sec, u32 ts_frac, u32 captured_len, u32 original_len
//
// Interpreting the first four bytes as a little-endian integer:
//   0xa1b2c3d4  little-endian file, microsecond fractions
//   0xd4c3b2a1  big-endian file, microsecond fractions
//   0xa1b23c4d  little-endian file, nanosecond fractions
//   0x4d3cb2a1  big-endian file, nanosecond fractions
// Anything else is rejected as UnknownMagic (pcapng in particular).

struct PcapFileHeader {
    bool big_endian = false;
    bool nanosecond = false;
    uint16_t version_major = 2;
    uint16_t version_minor = 4;
    int32_t thiszone = 0;
    uint32_t sigfigs = 0;
    uint32_t snaplen = 65535;
    uint32_t link_type = 1; // LINKTYPE_ETHERNET
};

struct RawPacket {
    uint32_t ts_sec = 0;
    uint32_t ts_frac = 0;   // micro- or nanoseconds, as written in the file
    bool ts_nanos = false;
    uint32_t captured_len = 0;
    uint32_t original_len = 0;
    uint32_t link_type = 1;
    std::vector<uint8_t> bytes; // exactly captured_len long

    double timestamp_seconds() const {
        return static_cast<double>(ts_sec) +
               static_cast<double>(ts_frac) * (ts_nanos ? 1e-9 : 1e-6);
    }

    bool operator==(const RawPacket&) const = default;
};

// Streaming parser. Construction consumes and validates the global header
// (throws UnknownMagicError / TruncatedHeaderError); next() yields records in
// file order and throws TruncatedRecordError when the stream ends inside a
// record. Reaching EOF exactly on a record boundary ends iteration cleanly.
class PcapReader {
public:
    explicit PcapReader(std::istream& in);

    const PcapFileHeader& header() const { return header_; }
    std::optional<RawPacket> next();

    uint64_t packets_read() const { return packets_read_; }
    // Present-but-odd captures (captured_len > original_len) are tolerated
    // and counted here rather than rejected.
    uint64_t captured_exceeds_original() const { return warn_caplen_; }

private:
    std::istream& in_;
    PcapFileHeader header_;
    uint64_t offset_ = 0;
    uint64_t packets_read_ = 0;
    uint64_t warn_caplen_ = 0;
};

// Parses a whole stream eagerly.
std::vector<RawPacket> parse_pcap(std::istream& in, PcapFileHeader* header_out = nullptr);

// Serializes records back into a classic pcap stream. Endianness and
// timestamp resolution follow the header, so parse -> write reproduces a
// well-formed input byte for byte.
void write_pcap(std::ostream& out, const PcapFileHeader& header, std::span<const RawPacket> records);

} // namespace dpikit
