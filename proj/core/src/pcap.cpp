#include "dpikit/pcap.hpp"

#include "dpikit/errors.hpp"

#include <array>
#include <cstring>
#include <limits>

namespace dpikit {

namespace {

constexpr uint32_t kMagicLeMicro = 0xa1b2c3d4u;
constexpr uint32_t kMagicBeMicro = 0xd4c3b2a1u;
constexpr uint32_t kMagicLeNano = 0xa1b23c4du;
constexpr uint32_t kMagicBeNano = 0x4d3cb2a1u;

uint16_t load_u16(const uint8_t* p, bool swap) {
    return swap ? static_cast<uint16_t>(p[0] << 8 | p[1])
                : static_cast<uint16_t>(p[1] << 8 | p[0]);
}

uint32_t load_u32(const uint8_t* p, bool swap) {
    if (swap) {
        return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
    }
    return (uint32_t(p[3]) << 24) | (uint32_t(p[2]) << 16) | (uint32_t(p[1]) << 8) | uint32_t(p[0]);
}

void store_u16(uint8_t* p, uint16_t v, bool swap) {
    if (swap) {
        p[0] = uint8_t(v >> 8);
        p[1] = uint8_t(v);
    } else {
        p[0] = uint8_t(v);
        p[1] = uint8_t(v >> 8);
    }
}

void store_u32(uint8_t* p, uint32_t v, bool swap) {
    if (swap) {
        p[0] = uint8_t(v >> 24);
        p[1] = uint8_t(v >> 16);
        p[2] = uint8_t(v >> 8);
        p[3] = uint8_t(v);
    } else {
        p[0] = uint8_t(v);
        p[1] = uint8_t(v >> 8);
        p[2] = uint8_t(v >> 16);
        p[3] = uint8_t(v >> 24);
    }
}

// Reads up to n bytes; returns the count actually read (short only at EOF).
size_t read_some(std::istream& in, uint8_t* dst, size_t n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<size_t>(in.gcount());
}

} // namespace

PcapReader::PcapReader(std::istream& in) : in_(in) {
    std::array<uint8_t, 24> hdr{};
    const size_t got = read_some(in_, hdr.data(), hdr.size());
    if (got < 4) throw TruncatedHeaderError(got);

    const uint32_t magic = load_u32(hdr.data(), /*swap=*/false);
    switch (magic) {
    case kMagicLeMicro: header_.big_endian = false; header_.nanosecond = false; break;
    case kMagicBeMicro: header_.big_endian = true;  header_.nanosecond = false; break;
    case kMagicLeNano:  header_.big_endian = false; header_.nanosecond = true;  break;
    case kMagicBeNano:  header_.big_endian = true;  header_.nanosecond = true;  break;
    default:
        throw UnknownMagicError(magic, 0);
    }
    if (got < hdr.size()) throw TruncatedHeaderError(got);

    const bool swap = header_.big_endian;
    header_.version_major = load_u16(hdr.data() + 4, swap);
    header_.version_minor = load_u16(hdr.data() + 6, swap);
    header_.thiszone = static_cast<int32_t>(load_u32(hdr.data() + 8, swap));
    header_.sigfigs = load_u32(hdr.data() + 12, swap);
    header_.snaplen = load_u32(hdr.data() + 16, swap);
    header_.link_type = load_u32(hdr.data() + 20, swap);
    offset_ = hdr.size();
}

std::optional<RawPacket> PcapReader::next() {
    std::array<uint8_t, 16> rec{};
    const uint64_t record_offset = offset_;
    const size_t got = read_some(in_, rec.data(), rec.size());
    if (got == 0) return std::nullopt; // clean EOF on a record boundary
    if (got < rec.size()) throw TruncatedRecordError(record_offset, "record header");
    offset_ += rec.size();

    const bool swap = header_.big_endian;
    RawPacket pkt;
    pkt.ts_sec = load_u32(rec.data(), swap);
    pkt.ts_frac = load_u32(rec.data() + 4, swap);
    pkt.ts_nanos = header_.nanosecond;
    pkt.captured_len = load_u32(rec.data() + 8, swap);
    pkt.original_len = load_u32(rec.data() + 12, swap);
    pkt.link_type = header_.link_type;

    // Body is read in bounded chunks so a corrupt length field cannot force a
    // huge allocation before EOF is discovered.
    constexpr size_t kChunk = 1 << 20;
    size_t remaining = pkt.captured_len;
    while (remaining > 0) {
        const size_t want = remaining < kChunk ? remaining : kChunk;
        const size_t old = pkt.bytes.size();
        pkt.bytes.resize(old + want);
        const size_t n = read_some(in_, pkt.bytes.data() + old, want);
        offset_ += n;
        if (n < want) throw TruncatedRecordError(record_offset, "record body");
        remaining -= want;
    }

    if (pkt.captured_len > pkt.original_len) ++warn_caplen_;
    ++packets_read_;
    return pkt;
}

std::vector<RawPacket> parse_pcap(std::istream& in, PcapFileHeader* header_out) {
    PcapReader reader(in);
    if (header_out) *header_out = reader.header();
    std::vector<RawPacket> out;
    while (auto pkt = reader.next()) out.push_back(std::move(*pkt));
    return out;
}

void write_pcap(std::ostream& out, const PcapFileHeader& header, std::span<const RawPacket> records) {
    const bool swap = header.big_endian;
    std::array<uint8_t, 24> hdr{};
    const uint32_t magic = header.nanosecond ? kMagicLeNano : kMagicLeMicro;
    // The magic is stored in the file's own byte order; a swapped reader sees
    // the byte-reversed value.
    store_u32(hdr.data(), magic, swap);
    store_u16(hdr.data() + 4, header.version_major, swap);
    store_u16(hdr.data() + 6, header.version_minor, swap);
    store_u32(hdr.data() + 8, static_cast<uint32_t>(header.thiszone), swap);
    store_u32(hdr.data() + 12, header.sigfigs, swap);
    store_u32(hdr.data() + 16, header.snaplen, swap);
    store_u32(hdr.data() + 20, header.link_type, swap);
    out.write(reinterpret_cast<const char*>(hdr.data()), hdr.size());

    for (const RawPacket& pkt : records) {
        std::array<uint8_t, 16> rec{};
        store_u32(rec.data(), pkt.ts_sec, swap);
        store_u32(rec.data() + 4, pkt.ts_frac, swap);
        store_u32(rec.data() + 8, static_cast<uint32_t>(pkt.bytes.size()), swap);
        store_u32(rec.data() + 12, pkt.original_len, swap);
        out.write(reinterpret_cast<const char*>(rec.data()), rec.size());
        out.write(reinterpret_cast<const char*>(pkt.bytes.data()),
                  static_cast<std::streamsize>(pkt.bytes.size()));
    }
    if (!out) throw IoError("failed writing pcap stream");
}

} // namespace dpikit
