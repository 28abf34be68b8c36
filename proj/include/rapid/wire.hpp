#pragma once

#include <cstdint>
#include <vector>

#include "rapid/errors.hpp"

namespace rapid {
namespace wire {

// Byte-exact layout documented in PROTOCOL.md. All integers little-endian,
// floats IEEE-754 binary64 little-endian.
constexpr std::uint32_t kMagic = 0x52415044u;
constexpr std::uint16_t kVersion = 1;

constexpr std::size_t kRequestHeaderBytes = 26;
constexpr std::size_t kResponseHeaderBytes = 28;

enum class Status : std::uint16_t {
    ok = 0,
    protocol_error = 1,
    version_mismatch = 2,
    malformed = 3,
};

struct Request {
    std::uint64_t sequence = 0;
    std::uint64_t step = 0;                 // control tick of the observation
    std::vector<std::uint8_t> observation;  // opaque payload
};

struct Response {
    Status status = Status::ok;
    std::uint64_t sequence = 0;  // echo; 0 when the request was unparseable
    std::uint32_t horizon = 0;   // k
    std::uint32_t joints = 0;    // N
    std::uint32_t bins = 0;      // B
    std::vector<double> actions;  // k*N row-major
    std::vector<double> logits;   // k*B row-major
};

std::vector<std::uint8_t> encode_request(const Request& r);
Request decode_request(const std::uint8_t* data, std::size_t size);

std::vector<std::uint8_t> encode_response(const Response& r);
Response decode_response(const std::uint8_t* data, std::size_t size);

inline Request decode_request(const std::vector<std::uint8_t>& b) {
    return decode_request(b.data(), b.size());
}
inline Response decode_response(const std::vector<std::uint8_t>& b) {
    return decode_response(b.data(), b.size());
}

Response error_response(Status status, std::uint64_t sequence);

// Total frame size implied by a complete header, for stream reassembly.
// Throws ProtocolError if the header bytes are invalid.
std::size_t request_frame_size(const std::uint8_t* header);
std::size_t response_frame_size(const std::uint8_t* header);

}  // namespace wire
}  // namespace rapid
