#pragma once

#include "dpikit/net.hpp"
#include "dpikit/pcap.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dpikit {

enum class SkipReason : uint8_t {
    none,
    non_ethernet,
    non_ip,
    non_tcp_udp,
    fragment,
    empty_payload,
    malformed,
};

struct DecodeOutcome {
    std::optional<PayloadRecord> record;
    SkipReason skip = SkipReason::none;
};

// Decodes one captured frame: Ethernet II (at most one 802.1Q tag), IPv4 or
// IPv6, then TCP or UDP. Pure function of the input; malformed frames never
// throw, they report a skip reason instead. TCP payloads are bounded by
// min(captured bytes, IP total length); UDP payloads by the UDP length field.
DecodeOutcome decode_frame(const RawPacket& raw);

struct ExtractionSummary {
    uint64_t total_packets = 0;
    uint64_t payload_records = 0;
    uint64_t skipped_non_ethernet = 0;
    uint64_t skipped_non_ip = 0;
    uint64_t skipped_non_tcp_udp = 0;
    uint64_t skipped_fragment = 0;
    uint64_t skipped_empty_payload = 0;
    uint64_t skipped_malformed = 0;
    uint64_t warn_captured_exceeds_original = 0;

    void count(SkipReason reason);
    void merge(const ExtractionSummary& other);
    std::string to_json_string() const;
};

// parse_pcap composed with decode_frame over a whole file, order-preserving.
std::pair<std::vector<PayloadRecord>, ExtractionSummary>
extract_payload_records(const std::filesystem::path& path);

} // namespace dpikit
