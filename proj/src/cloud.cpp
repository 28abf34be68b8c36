#include "rapid/cloud.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "rapid/rng.hpp"

namespace rapid {

double LatencyModel::sample(std::uint64_t call_index, std::size_t payload_bytes) const {
    std::uint64_t s = mix_seed(seed, call_index, 0x4c415459ULL);
    SplitMix64 rng(s);
    double ms = base_ms;
    if (jitter_ms > 0.0) ms += jitter_ms * (2.0 * rng.next_unit() - 1.0);
    if (bandwidth_mbps > 0.0)
        ms += static_cast<double>(payload_bytes) * 8.0 / (bandwidth_mbps * 1000.0);
    return std::max(ms, 0.0);
}

std::vector<std::uint8_t> make_observation(std::uint64_t obs_seed, std::uint64_t step,
                                           std::size_t size, double noise_level,
                                           std::uint64_t noise_seed) {
    if (noise_level < 0.0 || noise_level > 1.0 || !std::isfinite(noise_level))
        throw ConfigError("noise_level must be in [0, 1]");
    std::vector<std::uint8_t> out(size);
    SplitMix64 rng(mix_seed(obs_seed, step, 0x4f425353ULL));
    std::size_t i = 0;
    while (i < size) {
        std::uint64_t w = rng.next();
        for (int b = 0; b < 8 && i < size; ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(w);
            w >>= 8;
        }
    }
    const std::size_t n_corrupt = static_cast<std::size_t>(noise_level * static_cast<double>(size));
    SplitMix64 nrng(mix_seed(noise_seed, step, 0x4e4f4953ULL));
    for (std::size_t j = 0; j < n_corrupt; ++j)
        out[j] ^= static_cast<std::uint8_t>(1 + nrng.next_below(255));
    return out;
}

double measure_corruption(std::uint64_t obs_seed, std::uint64_t step,
                          const std::vector<std::uint8_t>& payload) {
    if (payload.empty()) return 0.0;
    const std::vector<std::uint8_t> clean =
        make_observation(obs_seed, step, payload.size(), 0.0, 0);
    std::size_t bad = 0;
    for (std::size_t i = 0; i < payload.size(); ++i)
        if (payload[i] != clean[i]) ++bad;
    return static_cast<double>(bad) / static_cast<double>(payload.size());
}

ActionChunk synthesize_chunk(const ModelParams& p, std::uint64_t step, double corruption,
                             ChunkSource source) {
    if (corruption < 0.0 || corruption > 1.0) throw ConfigError("corruption must be in [0, 1]");
    ActionChunk chunk;
    chunk.origin_step = step;
    chunk.horizon = p.horizon;
    chunk.joints = p.joints;
    chunk.bins = p.bins;
    chunk.source = source;

    SplitMix64 arng(mix_seed(p.seed, step, 0x414354ULL));
    chunk.actions.resize(p.horizon * p.joints);
    for (double& a : chunk.actions) a = arng.next_in(-1.0, 1.0);

    if (p.bins > 0) {
        chunk.logits.resize(p.horizon * p.bins);
        const double base_scale = p.logit_scale / (1.0 + p.logit_noise_gain * corruption);
        for (std::size_t r = 0; r < p.horizon; ++r) {
            SplitMix64 jrng(mix_seed(p.seed, step, r, 0x4a4954ULL));
            const double row_scale =
                base_scale * (1.0 - p.logit_jitter + 2.0 * p.logit_jitter * jrng.next_unit());
            SplitMix64 lrng(mix_seed(p.seed, step, r, 0x4c4f47ULL));
            for (std::size_t b = 0; b < p.bins; ++b)
                chunk.logits[r * p.bins + b] = row_scale * lrng.next_unit();
        }
    }
    chunk.validate();
    return chunk;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    if (logits.empty()) throw ConfigError("softmax: empty input");
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

double shannon_entropy_bits(const std::vector<double>& probs) {
    if (probs.empty()) throw ConfigError("entropy: empty distribution");
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0) throw ConfigError("entropy: invalid probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("entropy: probabilities do not sum to 1");
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

wire::Response MockVlaService::handle(const wire::Request& req) const {
    const double d = measure_corruption(obs_seed_, req.step, req.observation);
    const ActionChunk chunk = synthesize_chunk(params_, req.step, d, ChunkSource::cloud);
    wire::Response resp;
    resp.status = wire::Status::ok;
    resp.sequence = req.sequence;
    resp.horizon = static_cast<std::uint32_t>(chunk.horizon);
    resp.joints = static_cast<std::uint32_t>(chunk.joints);
    resp.bins = static_cast<std::uint32_t>(chunk.bins);
    resp.actions = chunk.actions;
    resp.logits = chunk.logits;
    return resp;
}

namespace {

std::uint32_t peek_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::uint64_t peek_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace

std::vector<std::uint8_t> MockVlaService::handle_bytes(const std::uint8_t* data,
                                                       std::size_t size) const {
    try {
        const wire::Request req = wire::decode_request(data, size);
        return wire::encode_response(handle(req));
    } catch (const ProtocolError&) {
        wire::Status status = wire::Status::protocol_error;
        std::uint64_t seq = 0;
        if (size >= 6 && peek_u32(data) == wire::kMagic) {
            const std::uint16_t ver =
                static_cast<std::uint16_t>(data[4] | (std::uint16_t(data[5]) << 8));
            if (ver != wire::kVersion) status = wire::Status::version_mismatch;
            else status = wire::Status::malformed;
            if (size >= 14) seq = peek_u64(data + 6);
        }
        return wire::encode_response(wire::error_response(status, seq));
    }
}

namespace {

void write_all(int fd, const std::uint8_t* data, std::size_t size) {
    std::size_t done = 0;
    while (done < size) {
        const ssize_t n = ::send(fd, data + done, size - done, MSG_NOSIGNAL);
        if (n <= 0) throw IoError("socket write failed");
        done += static_cast<std::size_t>(n);
    }
}

// Returns false on clean EOF at offset 0, throws on mid-frame EOF or error.
bool read_exact(int fd, std::uint8_t* data, std::size_t size) {
    std::size_t done = 0;
    while (done < size) {
        const ssize_t n = ::recv(fd, data + done, size - done, 0);
        if (n == 0) {
            if (done == 0) return false;
            throw IoError("socket closed mid-frame");
        }
        if (n < 0) throw IoError("socket read failed");
        done += static_cast<std::size_t>(n);
    }
    return true;
}

}  // namespace

SocketTransport::SocketTransport(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw IoError("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw IoError("bad host address: " + host);
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        throw IoError("connect to " + host + ":" + std::to_string(port) + " failed");
    }
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

SocketTransport::~SocketTransport() {
    if (fd_ >= 0) ::close(fd_);
}

std::vector<std::uint8_t> SocketTransport::roundtrip(const std::vector<std::uint8_t>& frame) {
    write_all(fd_, frame.data(), frame.size());
    std::vector<std::uint8_t> buf(wire::kResponseHeaderBytes);
    if (!read_exact(fd_, buf.data(), buf.size())) throw IoError("server closed connection");
    const std::size_t total = wire::response_frame_size(buf.data());
    buf.resize(total);
    if (total > wire::kResponseHeaderBytes &&
        !read_exact(fd_, buf.data() + wire::kResponseHeaderBytes,
                    total - wire::kResponseHeaderBytes))
        throw IoError("server closed mid-frame");
    return buf;
}

WireServer::WireServer(const MockVlaService& svc, const std::string& host, std::uint16_t port)
    : svc_(svc) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw IoError("socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw IoError("bad host address: " + host);
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(listen_fd_);
        throw IoError("bind " + host + ":" + std::to_string(port) + " failed");
    }
    if (::listen(listen_fd_, 8) != 0) {
        ::close(listen_fd_);
        throw IoError("listen failed");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
    thread_ = std::thread([this] { serve_loop(); });
}

WireServer::~WireServer() { stop(); }

void WireServer::stop() {
    if (stop_.exchange(true)) return;
    if (thread_.joinable()) thread_.join();
    if (listen_fd_ >= 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
}

void WireServer::serve_loop() {
    while (!stop_.load()) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, 100);
        if (rc <= 0) continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        try {
            serve_connection(fd);
        } catch (const Error&) {
            // connection-level fault; drop the client and keep serving
        }
        ::close(fd);
    }
}

void WireServer::serve_connection(int fd) {
    std::vector<std::uint8_t> buf;
    for (;;) {
        // idle between frames: poll so stop() is not held hostage by a
        // connected-but-silent client
        pollfd pfd{fd, POLLIN, 0};
        while (::poll(&pfd, 1, 100) == 0)
            if (stop_.load()) return;
        buf.resize(wire::kRequestHeaderBytes);
        if (!read_exact(fd, buf.data(), buf.size())) return;
        std::size_t total;
        try {
            total = wire::request_frame_size(buf.data());
        } catch (const ProtocolError&) {
            const auto err =
                wire::encode_response(wire::error_response(wire::Status::protocol_error, 0));
            write_all(fd, err.data(), err.size());
            return;  // framing lost, cannot resync
        }
        buf.resize(total);
        if (total > wire::kRequestHeaderBytes &&
            !read_exact(fd, buf.data() + wire::kRequestHeaderBytes,
                        total - wire::kRequestHeaderBytes))
            return;
        const auto resp = svc_.handle_bytes(buf.data(), buf.size());
        write_all(fd, resp.data(), resp.size());
    }
}

FetchResult CloudClient::fetch(std::uint64_t step, double noise_level) {
    FetchResult res;
    double spent_ms = 0.0;
    for (int attempt = 1; attempt <= 2; ++attempt) {
        const std::uint64_t seq = next_sequence_++;
        const std::uint64_t call = calls_++;
        const double lat = cfg_.latency.sample(call, cfg_.obs_bytes);
        res.attempts = attempt;
        res.sequence = seq;
        if (lat > cfg_.timeout_ms) {
            // virtual timeout: the response never lands, a fresh sequence
            // supersedes this one; the physical call is not made
            spent_ms += cfg_.timeout_ms;
            continue;
        }
        wire::Request req;
        req.sequence = seq;
        req.step = step;
        req.observation =
            make_observation(cfg_.obs_seed, step, cfg_.obs_bytes, noise_level, cfg_.noise_seed);
        const auto bytes = transport_.roundtrip(wire::encode_request(req));
        const wire::Response resp = wire::decode_response(bytes.data(), bytes.size());
        if (resp.status != wire::Status::ok)
            throw ProtocolError("service rejected request, status " +
                                std::to_string(static_cast<int>(resp.status)));
        if (resp.sequence != seq)
            throw ProtocolError("response sequence " + std::to_string(resp.sequence) +
                                " != request " + std::to_string(seq));
        res.chunk.sequence = seq;
        res.chunk.origin_step = step;
        res.chunk.horizon = resp.horizon;
        res.chunk.joints = resp.joints;
        res.chunk.bins = resp.bins;
        res.chunk.source = ChunkSource::cloud;
        res.chunk.actions = resp.actions;
        res.chunk.logits = resp.logits;
        res.chunk.validate();
        res.ok = true;
        res.latency_ms = spent_ms + lat;
        return res;
    }
    res.ok = false;
    res.latency_ms = spent_ms;
    return res;
}

}  // namespace rapid
