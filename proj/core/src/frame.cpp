#include "dpikit/frame.hpp"

#include "dpikit/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace dpikit {

namespace {

constexpr uint16_t kEtherTypeIpv4 = 0x0800;
constexpr uint16_t kEtherTypeIpv6 = 0x86dd;
constexpr uint16_t kEtherTypeVlan = 0x8100;

constexpr uint8_t kProtoTcp = 6;
constexpr uint8_t kProtoUdp = 17;

// Bounds-checked view over the frame bytes. Every read is validated, so no
// input can make the decoder touch memory past captured_len.
struct Cursor {
    const uint8_t* p;
    size_t len;
    size_t pos = 0;

    size_t remaining() const { return len - pos; }
    bool can_read(size_t n) const { return n <= remaining(); }
    const uint8_t* peek() const { return p + pos; }
    void advance(size_t n) { pos += n; }

    uint8_t u8(size_t off) const { return p[pos + off]; }
    uint16_t be16(size_t off) const {
        return static_cast<uint16_t>((p[pos + off] << 8) | p[pos + off + 1]);
    }
};

DecodeOutcome skip(SkipReason r) { return DecodeOutcome{std::nullopt, r}; }

struct L4Region {
    Protocol protocol;
    size_t offset;     // start of the transport header within the frame
    size_t ip_bound;   // bytes of L4 data admitted by the IP length field
    IpAddr src, dst;
};

// Walks IPv6 extension headers until a transport header. Returns nullopt for
// anything that should be skipped (reason set via *out_reason).
std::optional<L4Region> decode_ipv6(Cursor cur, SkipReason* out_reason) {
    if (!cur.can_read(40)) { *out_reason = SkipReason::malformed; return std::nullopt; }
    if ((cur.u8(0) >> 4) != 6) { *out_reason = SkipReason::malformed; return std::nullopt; }

    const uint16_t payload_len = cur.be16(4);
    uint8_t next = cur.u8(6);
    IpAddr src = IpAddr::v6(cur.peek() + 8);
    IpAddr dst = IpAddr::v6(cur.peek() + 24);
    cur.advance(40);

    // The payload length field bounds everything after the fixed header,
    // extension headers included.
    size_t ip_bound = payload_len;
    if (ip_bound > cur.remaining()) ip_bound = cur.remaining();
    size_t walked = 0;

    for (int depth = 0; depth < 8; ++depth) {
        if (next == kProtoTcp || next == kProtoUdp) {
            L4Region r;
            r.protocol = next == kProtoTcp ? Protocol::tcp : Protocol::udp;
            r.offset = cur.pos;
            r.ip_bound = ip_bound - walked;
            r.src = src;
            r.dst = dst;
            return r;
        }
        switch (next) {
        case 0:   // hop-by-hop options
        case 43:  // routing
        case 60: { // destination options
            if (!cur.can_read(2)) { *out_reason = SkipReason::malformed; return std::nullopt; }
            const size_t ext_len = (static_cast<size_t>(cur.u8(1)) + 1) * 8;
            if (!cur.can_read(ext_len) || walked + ext_len > ip_bound) {
                *out_reason = SkipReason::malformed;
                return std::nullopt;
            }
            next = cur.u8(0);
            cur.advance(ext_len);
            walked += ext_len;
            break;
        }
        case 44: { // fragment header
            if (!cur.can_read(8)) { *out_reason = SkipReason::malformed; return std::nullopt; }
            const uint16_t frag_field = cur.be16(2);
            if ((frag_field & 0xfff8) != 0) { *out_reason = SkipReason::fragment; return std::nullopt; }
            next = cur.u8(0);
            cur.advance(8);
            walked += 8;
            break;
        }
        default:
            *out_reason = SkipReason::non_tcp_udp;
            return std::nullopt;
        }
    }
    *out_reason = SkipReason::malformed;
    return std::nullopt;
}

std::optional<L4Region> decode_ipv4(Cursor cur, SkipReason* out_reason) {
    if (!cur.can_read(20)) { *out_reason = SkipReason::malformed; return std::nullopt; }
    if ((cur.u8(0) >> 4) != 4) { *out_reason = SkipReason::malformed; return std::nullopt; }

    const size_t ihl = (cur.u8(0) & 0x0f) * 4u;
    if (ihl < 20 || !cur.can_read(ihl)) { *out_reason = SkipReason::malformed; return std::nullopt; }

    const uint16_t total_len = cur.be16(2);
    if (total_len < ihl) { *out_reason = SkipReason::malformed; return std::nullopt; }

    const uint16_t flags_frag = cur.be16(6);
    if ((flags_frag & 0x1fff) != 0) { *out_reason = SkipReason::fragment; return std::nullopt; }

    const uint8_t proto = cur.u8(9);
    if (proto != kProtoTcp && proto != kProtoUdp) {
        *out_reason = SkipReason::non_tcp_udp;
        return std::nullopt;
    }

    L4Region r;
    r.protocol = proto == kProtoTcp ? Protocol::tcp : Protocol::udp;
    r.src = IpAddr::v4(cur.peek() + 12);
    r.dst = IpAddr::v4(cur.peek() + 16);
    r.offset = cur.pos + ihl;

    // Total length may exceed the captured slice in truncated captures; the
    // caller clamps again against what is actually present.
    r.ip_bound = static_cast<size_t>(total_len) - ihl;
    return r;
}

} // namespace

DecodeOutcome decode_frame(const RawPacket& raw) {
    if (raw.link_type != 1) return skip(SkipReason::non_ethernet);

    Cursor cur{raw.bytes.data(), raw.bytes.size()};
    if (!cur.can_read(14)) return skip(SkipReason::malformed);

    uint16_t ether_type = cur.be16(12);
    cur.advance(14);
    if (ether_type == kEtherTypeVlan) {
        if (!cur.can_read(4)) return skip(SkipReason::malformed);
        ether_type = cur.be16(2);
        cur.advance(4);
    }
    if (ether_type != kEtherTypeIpv4 && ether_type != kEtherTypeIpv6) {
        return skip(SkipReason::non_ip);
    }

    SkipReason reason = SkipReason::malformed;
    const auto l4 = ether_type == kEtherTypeIpv4 ? decode_ipv4(cur, &reason)
                                                 : decode_ipv6(cur, &reason);
    if (!l4) return skip(reason);

    Cursor tcur{raw.bytes.data(), raw.bytes.size(), l4->offset};
    size_t bound = l4->ip_bound;
    if (bound > tcur.remaining()) bound = tcur.remaining();

    uint16_t src_port = 0, dst_port = 0;
    size_t header_len = 0;
    size_t payload_bound = 0;

    if (l4->protocol == Protocol::tcp) {
        if (bound < 20 || !tcur.can_read(20)) return skip(SkipReason::malformed);
        src_port = tcur.be16(0);
        dst_port = tcur.be16(2);
        header_len = static_cast<size_t>(tcur.u8(12) >> 4) * 4u;
        if (header_len < 20 || header_len > bound || !tcur.can_read(header_len)) {
            return skip(SkipReason::malformed);
        }
        payload_bound = bound - header_len;
    } else {
        if (bound < 8 || !tcur.can_read(8)) return skip(SkipReason::malformed);
        src_port = tcur.be16(0);
        dst_port = tcur.be16(2);
        const uint16_t udp_len = tcur.be16(4);
        if (udp_len < 8) return skip(SkipReason::malformed);
        header_len = 8;
        payload_bound = static_cast<size_t>(udp_len) - 8;
        if (payload_bound > bound - 8) payload_bound = bound - 8;
    }

    tcur.advance(header_len);
    size_t payload_len = payload_bound;
    if (payload_len > tcur.remaining()) payload_len = tcur.remaining();
    if (payload_len == 0) return skip(SkipReason::empty_payload);

    PayloadRecord rec;
    rec.five_tuple = FiveTuple{l4->src, l4->dst, src_port, dst_port, l4->protocol};
    rec.timestamp = raw.timestamp_seconds();
    rec.payload.assign(tcur.peek(), tcur.peek() + payload_len);
    return DecodeOutcome{std::move(rec), SkipReason::none};
}

void ExtractionSummary::count(SkipReason reason) {
    switch (reason) {
    case SkipReason::none: ++payload_records; break;
    case SkipReason::non_ethernet: ++skipped_non_ethernet; break;
    case SkipReason::non_ip: ++skipped_non_ip; break;
    case SkipReason::non_tcp_udp: ++skipped_non_tcp_udp; break;
    case SkipReason::fragment: ++skipped_fragment; break;
    case SkipReason::empty_payload: ++skipped_empty_payload; break;
    case SkipReason::malformed: ++skipped_malformed; break;
    }
    ++total_packets;
}

void ExtractionSummary::merge(const ExtractionSummary& o) {
    total_packets += o.total_packets;
    payload_records += o.payload_records;
    skipped_non_ethernet += o.skipped_non_ethernet;
    skipped_non_ip += o.skipped_non_ip;
    skipped_non_tcp_udp += o.skipped_non_tcp_udp;
    skipped_fragment += o.skipped_fragment;
    skipped_empty_payload += o.skipped_empty_payload;
    skipped_malformed += o.skipped_malformed;
    warn_captured_exceeds_original += o.warn_captured_exceeds_original;
}

std::string ExtractionSummary::to_json_string() const {
    nlohmann::ordered_json j;
    j["total_packets"] = total_packets;
    j["payload_records"] = payload_records;
    j["skipped"] = nlohmann::ordered_json{
        {"non_ethernet", skipped_non_ethernet},
        {"non_ip", skipped_non_ip},
        {"non_tcp_udp", skipped_non_tcp_udp},
        {"fragment", skipped_fragment},
        {"empty_payload", skipped_empty_payload},
        {"malformed", skipped_malformed},
    };
    j["warnings"] = nlohmann::ordered_json{
        {"captured_exceeds_original", warn_captured_exceeds_original},
    };
    return j.dump(2) + "\n";
}

std::pair<std::vector<PayloadRecord>, ExtractionSummary>
extract_payload_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open pcap file: " + path.string());

    PcapReader reader(in);
    std::vector<PayloadRecord> records;
    ExtractionSummary summary;
    while (auto pkt = reader.next()) {
        auto outcome = decode_frame(*pkt);
        summary.count(outcome.skip);
        if (outcome.record) records.push_back(std::move(*outcome.record));
    }
    summary.warn_captured_exceeds_original = reader.captured_exceeds_original();
    return {std::move(records), summary};
}

} // namespace dpikit
