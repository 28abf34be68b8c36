#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "rapid/chunk_queue.hpp"
#include "rapid/wire.hpp"

namespace rapid {

// Deterministic latency synthesis: base + uniform jitter + transfer time.
// bandwidth_mbps == 0 means an infinite pipe (no transfer term). Draws are a
// pure function of (seed, call_index), so replays reproduce bit-identically.
struct LatencyModel {
    double base_ms = 121.5;
    double jitter_ms = 0.0;
    double bandwidth_mbps = 0.0;
    std::uint64_t seed = 0;

    double sample(std::uint64_t call_index, std::size_t payload_bytes) const;
};

// Observation payloads are a pure function of (obs_seed, step). noise_level
// in [0, 1] corrupts the leading floor(noise_level * size) bytes with seeded
// nonzero XOR masks, so the corrupted fraction equals noise_level up to one
// byte of rounding and a receiver holding the same obs_seed can measure it.
std::vector<std::uint8_t> make_observation(std::uint64_t obs_seed, std::uint64_t step,
                                           std::size_t size, double noise_level,
                                           std::uint64_t noise_seed);

double measure_corruption(std::uint64_t obs_seed, std::uint64_t step,
                          const std::vector<std::uint8_t>& payload);

// Shared synthetic model head for both inference sites. Actions depend only
// on (seed, step); corruption flattens the logits (scale shrinks), raising
// the entropy of the per-row categorical distribution, which is how visual
// degradation shows up to confidence probes.
struct ModelParams {
    std::uint64_t seed = 1;
    std::size_t horizon = 8;
    std::size_t joints = 6;
    std::size_t bins = 256;
    double logit_scale = 12.5;      // sharpness with a clean observation
    double logit_noise_gain = 3.4;  // sharpness decay per unit corruption
    double logit_jitter = 0.18;     // per-row multiplicative spread, [0, 1)
};

ActionChunk synthesize_chunk(const ModelParams& params, std::uint64_t step, double corruption,
                             ChunkSource source);

// Entropy in bits of a categorical distribution. Requires p_i >= 0 and
// sum(p) within 1e-9 of 1.
double shannon_entropy_bits(const std::vector<double>& probs);

std::vector<double> softmax(const std::vector<double>& logits);

inline double row_entropy_bits(const std::vector<double>& logits) {
    return shannon_entropy_bits(softmax(logits));
}

// Mock action-chunk service: parses request frames, measures observation
// corruption, answers with a synthesized chunk. Wire-layer problems come
// back as error frames, never exceptions.
class MockVlaService {
  public:
    MockVlaService(const ModelParams& params, std::uint64_t obs_seed)
        : params_(params), obs_seed_(obs_seed) {}

    wire::Response handle(const wire::Request& req) const;
    std::vector<std::uint8_t> handle_bytes(const std::uint8_t* data, std::size_t size) const;

    const ModelParams& params() const { return params_; }

  private:
    ModelParams params_;
    std::uint64_t obs_seed_;
};

class Transport {
  public:
    virtual ~Transport() = default;
    virtual std::vector<std::uint8_t> roundtrip(const std::vector<std::uint8_t>& frame) = 0;
};

// Same codec path as the socket transport, service invoked in-process.
class LocalTransport : public Transport {
  public:
    explicit LocalTransport(const MockVlaService& svc) : svc_(svc) {}
    std::vector<std::uint8_t> roundtrip(const std::vector<std::uint8_t>& frame) override {
        return svc_.handle_bytes(frame.data(), frame.size());
    }

  private:
    const MockVlaService& svc_;
};

// Blocking TCP client; one persistent connection, one frame in flight.
class SocketTransport : public Transport {
  public:
    SocketTransport(const std::string& host, std::uint16_t port);
    ~SocketTransport() override;
    std::vector<std::uint8_t> roundtrip(const std::vector<std::uint8_t>& frame) override;

  private:
    int fd_ = -1;
};

// Serves a MockVlaService over TCP. Port 0 binds an ephemeral port,
// readable via port() once constructed.
class WireServer {
  public:
    WireServer(const MockVlaService& svc, const std::string& host, std::uint16_t port);
    ~WireServer();
    std::uint16_t port() const { return port_; }
    void stop();

  private:
    void serve_loop();
    void serve_connection(int fd);

    const MockVlaService& svc_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stop_{false};
    std::thread thread_;
};

struct ClientConfig {
    std::size_t obs_bytes = 8192;
    std::uint64_t obs_seed = 42;
    std::uint64_t noise_seed = 7;
    double timeout_ms = 2000.0;  // per attempt; one retry, then fail
    LatencyModel latency;
};

struct FetchResult {
    bool ok = false;
    ActionChunk chunk;
    double latency_ms = 0.0;  // virtual cost including timed-out attempts
    int attempts = 1;
    std::uint64_t sequence = 0;
};

// Cloud-side inference client. Latency is drawn from the model (virtual
// time); the physical roundtrip is only performed for attempts the virtual
// clock says completed, so simulated and socket-backed runs agree exactly.
class CloudClient {
  public:
    CloudClient(Transport& transport, const ClientConfig& cfg) : transport_(transport), cfg_(cfg) {}

    FetchResult fetch(std::uint64_t step, double noise_level);

    const ClientConfig& config() const { return cfg_; }

  private:
    Transport& transport_;
    ClientConfig cfg_;
    std::uint64_t next_sequence_ = 1;
    std::uint64_t calls_ = 0;
};

}  // namespace rapid
