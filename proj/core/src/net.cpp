#include "dpikit/net.hpp"

#include "dpikit/errors.hpp"

#include <arpa/inet.h>

#include <cctype>
#include <cstring>

namespace dpikit {

const char* to_string(Protocol p) {
    return p == Protocol::tcp ? "tcp" : "udp";
}

Protocol protocol_from_string(const std::string& s) {
    std::string lower;
    lower.reserve(s.size());
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "tcp") return Protocol::tcp;
    if (lower == "udp") return Protocol::udp;
    throw Error("unknown protocol: " + s + " (expected tcp or udp)");
}

IpAddr IpAddr::v4(const uint8_t* p) {
    IpAddr a;
    a.version = 4;
    std::memcpy(a.bytes.data(), p, 4);
    return a;
}

IpAddr IpAddr::v6(const uint8_t* p) {
    IpAddr a;
    a.version = 6;
    std::memcpy(a.bytes.data(), p, 16);
    return a;
}

IpAddr IpAddr::parse(const std::string& text) {
    IpAddr a;
    if (inet_pton(AF_INET, text.c_str(), a.bytes.data()) == 1) {
        a.version = 4;
        return a;
    }
    if (inet_pton(AF_INET6, text.c_str(), a.bytes.data()) == 1) {
        a.version = 6;
        return a;
    }
    throw Error("invalid IP address: " + text);
}

std::string IpAddr::to_string() const {
    char buf[INET6_ADDRSTRLEN] = {};
    const int family = version == 4 ? AF_INET : AF_INET6;
    if (!inet_ntop(family, bytes.data(), buf, sizeof(buf))) {
        throw Error("cannot format IP address");
    }
    return buf;
}

} // namespace dpikit
