#include "rapid/wire.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace rapid {
namespace wire {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (std::uint16_t(p[1]) << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

double get_f64(const std::uint8_t* p) {
    const std::uint64_t bits = get_u64(p);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void check_header(const std::uint8_t* data, std::size_t size, std::size_t need, const char* kind) {
    if (size < need)
        throw ProtocolError(std::string(kind) + ": truncated header (" + std::to_string(size) +
                            " bytes)");
    if (get_u32(data) != kMagic) throw ProtocolError(std::string(kind) + ": bad magic");
    if (get_u16(data + 4) != kVersion)
        throw ProtocolError(std::string(kind) + ": unsupported version " +
                            std::to_string(get_u16(data + 4)));
}

// Caps reject absurd dimensions before any allocation happens.
constexpr std::uint32_t kMaxHorizon = 4096;
constexpr std::uint32_t kMaxJoints = 256;
constexpr std::uint32_t kMaxBins = 65536;
constexpr std::uint32_t kMaxPayload = 1u << 28;

}  // namespace

std::vector<std::uint8_t> encode_request(const Request& r) {
    if (r.observation.size() > kMaxPayload) throw ProtocolError("request: payload too large");
    std::vector<std::uint8_t> out;
    out.reserve(kRequestHeaderBytes + r.observation.size());
    put_u32(out, kMagic);
    put_u16(out, kVersion);
    put_u64(out, r.sequence);
    put_u64(out, r.step);
    put_u32(out, static_cast<std::uint32_t>(r.observation.size()));
    out.insert(out.end(), r.observation.begin(), r.observation.end());
    return out;
}

Request decode_request(const std::uint8_t* data, std::size_t size) {
    check_header(data, size, kRequestHeaderBytes, "request");
    Request r;
    r.sequence = get_u64(data + 6);
    r.step = get_u64(data + 14);
    const std::uint32_t len = get_u32(data + 22);
    if (len > kMaxPayload) throw ProtocolError("request: payload too large");
    if (size != kRequestHeaderBytes + len)
        throw ProtocolError("request: size " + std::to_string(size) + " != header + declared " +
                            std::to_string(len));
    r.observation.assign(data + kRequestHeaderBytes, data + kRequestHeaderBytes + len);
    return r;
}

std::vector<std::uint8_t> encode_response(const Response& r) {
    if (r.actions.size() != std::size_t(r.horizon) * r.joints)
        throw ProtocolError("response: actions size mismatch");
    if (r.logits.size() != std::size_t(r.horizon) * r.bins)
        throw ProtocolError("response: logits size mismatch");
    std::vector<std::uint8_t> out;
    out.reserve(kResponseHeaderBytes + 8 * (r.actions.size() + r.logits.size()));
    put_u32(out, kMagic);
    put_u16(out, kVersion);
    put_u16(out, static_cast<std::uint16_t>(r.status));
    put_u64(out, r.sequence);
    put_u32(out, r.horizon);
    put_u32(out, r.joints);
    put_u32(out, r.bins);
    for (double v : r.actions) put_f64(out, v);
    for (double v : r.logits) put_f64(out, v);
    return out;
}

Response decode_response(const std::uint8_t* data, std::size_t size) {
    check_header(data, size, kResponseHeaderBytes, "response");
    Response r;
    const std::uint16_t status = get_u16(data + 6);
    if (status > static_cast<std::uint16_t>(Status::malformed))
        throw ProtocolError("response: unknown status " + std::to_string(status));
    r.status = static_cast<Status>(status);
    r.sequence = get_u64(data + 8);
    r.horizon = get_u32(data + 16);
    r.joints = get_u32(data + 20);
    r.bins = get_u32(data + 24);
    if (r.horizon > kMaxHorizon || r.joints > kMaxJoints || r.bins > kMaxBins)
        throw ProtocolError("response: dimensions out of range");
    const std::size_t want =
        kResponseHeaderBytes + 8 * (std::size_t(r.horizon) * r.joints + std::size_t(r.horizon) * r.bins);
    if (size != want)
        throw ProtocolError("response: size " + std::to_string(size) + " != expected " +
                            std::to_string(want));
    const std::uint8_t* p = data + kResponseHeaderBytes;
    r.actions.resize(std::size_t(r.horizon) * r.joints);
    for (double& v : r.actions) {
        v = get_f64(p);
        p += 8;
    }
    r.logits.resize(std::size_t(r.horizon) * r.bins);
    for (double& v : r.logits) {
        v = get_f64(p);
        p += 8;
    }
    return r;
}

Response error_response(Status status, std::uint64_t sequence) {
    Response r;
    r.status = status;
    r.sequence = sequence;
    return r;
}

std::size_t request_frame_size(const std::uint8_t* header) {
    if (get_u32(header) != kMagic) throw ProtocolError("request: bad magic");
    const std::uint32_t len = get_u32(header + 22);
    if (len > kMaxPayload) throw ProtocolError("request: payload too large");
    return kRequestHeaderBytes + len;
}

std::size_t response_frame_size(const std::uint8_t* header) {
    if (get_u32(header) != kMagic) throw ProtocolError("response: bad magic");
    const std::uint32_t k = get_u32(header + 16);
    const std::uint32_t n = get_u32(header + 20);
    const std::uint32_t b = get_u32(header + 24);
    if (k > kMaxHorizon || n > kMaxJoints || b > kMaxBins)
        throw ProtocolError("response: dimensions out of range");
    return kResponseHeaderBytes + 8 * (std::size_t(k) * n + std::size_t(k) * b);
}

}  // namespace wire
}  // namespace rapid
