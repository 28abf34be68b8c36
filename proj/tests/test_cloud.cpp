#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rapid/cloud.hpp"
#include "rapid/rng.hpp"

using namespace rapid;

TEST_CASE("latency model is pure in (seed, call_index)") {
    LatencyModel m;
    m.base_ms = 121.5;
    CHECK(m.sample(0, 8192) == 121.5);
    CHECK(m.sample(7, 0) == 121.5);

    m.bandwidth_mbps = 100.0;
    // transfer term: bytes * 8 / (mbps * 1000) ms
    CHECK(m.sample(0, 125000) == doctest::Approx(121.5 + 10.0).epsilon(1e-12));

    m.bandwidth_mbps = 0.0;
    m.jitter_ms = 5.0;
    m.seed = 3;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const double v = m.sample(i, 0);
        CHECK(v >= 121.5 - 5.0);
        CHECK(v <= 121.5 + 5.0);
        CHECK(m.sample(i, 0) == v);
    }

    LatencyModel neg;
    neg.base_ms = -3.0;
    CHECK(neg.sample(0, 0) == 0.0);
}

TEST_CASE("observation corruption measures back to the requested level") {
    const std::size_t size = 4096;
    for (double lvl : {0.0, 0.1, 0.37, 0.5, 0.8, 1.0}) {
        const auto obs = make_observation(42, 17, size, lvl, 7);
        REQUIRE(obs.size() == size);
        const double measured = measure_corruption(42, 17, obs);
        const double expect =
            std::floor(lvl * static_cast<double>(size)) / static_cast<double>(size);
        CHECK(measured == doctest::Approx(expect).epsilon(1e-12));
    }
    // deterministic in every coordinate
    CHECK(make_observation(42, 17, 128, 0.3, 7) == make_observation(42, 17, 128, 0.3, 7));
    CHECK(make_observation(42, 18, 128, 0.3, 7) != make_observation(42, 17, 128, 0.3, 7));
    CHECK_THROWS_AS(make_observation(42, 0, 64, 1.5, 7), ConfigError);
    CHECK_THROWS_AS(make_observation(42, 0, 64, -0.1, 7), ConfigError);
}

TEST_CASE("entropy of categorical distributions") {
    std::vector<double> uniform(256, 1.0 / 256.0);
    CHECK(shannon_entropy_bits(uniform) == doctest::Approx(8.0).epsilon(1e-12));

    std::vector<double> certain(16, 0.0);
    certain[5] = 1.0;
    CHECK(shannon_entropy_bits(certain) == 0.0);

    CHECK_THROWS_AS(shannon_entropy_bits({0.5, 0.4}), ConfigError);
    CHECK_THROWS_AS(shannon_entropy_bits({1.5, -0.5}), ConfigError);
    CHECK_THROWS_AS(shannon_entropy_bits({}), ConfigError);

    // softmax of equal logits is uniform
    const auto p = softmax(std::vector<double>(64, 3.25));
    CHECK(shannon_entropy_bits(p) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("chunk synthesis: actions stable, confidence decays with corruption") {
    ModelParams mp;
    mp.seed = 9;
    mp.horizon = 8;
    mp.joints = 6;
    mp.bins = 256;

    const auto clean = synthesize_chunk(mp, 100, 0.0, ChunkSource::cloud);
    const auto noisy = synthesize_chunk(mp, 100, 0.8, ChunkSource::cloud);
    REQUIRE(clean.actions.size() == mp.horizon * mp.joints);
    CHECK(clean.actions == noisy.actions);  // corruption touches logits only
    CHECK(clean.logits != noisy.logits);
    CHECK(synthesize_chunk(mp, 100, 0.0, ChunkSource::cloud).logits == clean.logits);

    auto mean_entropy = [&](double corruption) {
        double acc = 0.0;
        int rows = 0;
        for (std::uint64_t step = 0; step < 20; ++step) {
            const auto c = synthesize_chunk(mp, step, corruption, ChunkSource::cloud);
            for (std::size_t r = 0; r < c.horizon; ++r) {
                std::vector<double> row(c.logits.begin() + static_cast<std::ptrdiff_t>(r * c.bins),
                                        c.logits.begin() +
                                            static_cast<std::ptrdiff_t>((r + 1) * c.bins));
                acc += row_entropy_bits(row);
                ++rows;
            }
        }
        return acc / rows;
    };
    const double h0 = mean_entropy(0.0);
    const double h4 = mean_entropy(0.4);
    const double h8 = mean_entropy(0.8);
    CHECK(h0 < h4);
    CHECK(h4 < h8);
    CHECK(h8 <= std::log2(static_cast<double>(mp.bins)));

    CHECK_THROWS_AS(synthesize_chunk(mp, 0, 1.2, ChunkSource::cloud), ConfigError);
}

TEST_CASE("service echoes sequence and reflects measured corruption") {
    ModelParams mp;
    mp.seed = 4;
    MockVlaService svc(mp, 42);

    wire::Request req;
    req.sequence = 9001;
    req.step = 55;
    req.observation = make_observation(42, 55, 2048, 0.4, 7);
    const auto resp = svc.handle(req);
    CHECK(resp.status == wire::Status::ok);
    CHECK(resp.sequence == 9001);
    CHECK(resp.horizon == mp.horizon);
    CHECK(resp.joints == mp.joints);
    CHECK(resp.bins == mp.bins);

    const double d = measure_corruption(42, 55, req.observation);
    const auto want = synthesize_chunk(mp, 55, d, ChunkSource::cloud);
    CHECK(resp.actions == want.actions);
    CHECK(resp.logits == want.logits);

    // byte-level entry point is the same code path
    const auto frame = wire::encode_request(req);
    const auto bytes = svc.handle_bytes(frame.data(), frame.size());
    const auto resp2 = wire::decode_response(bytes);
    CHECK(resp2.actions == resp.actions);
}

TEST_CASE("service answers garbage with error frames, not exceptions") {
    ModelParams mp;
    MockVlaService svc(mp, 42);

    const std::vector<std::uint8_t> junk = {0xDE, 0xAD, 0xBE, 0xEF, 0x00, 0x00};
    const auto r1 = wire::decode_response(svc.handle_bytes(junk.data(), junk.size()));
    CHECK(r1.status == wire::Status::protocol_error);
    CHECK(r1.sequence == 0);

    wire::Request req;
    req.sequence = 123;
    req.step = 1;
    auto frame = wire::encode_request(req);
    frame[4] = 9;  // bogus version
    const auto r2 = wire::decode_response(svc.handle_bytes(frame.data(), frame.size()));
    CHECK(r2.status == wire::Status::version_mismatch);
    CHECK(r2.sequence == 123);

    frame = wire::encode_request(req);
    frame[22] = 77;  // declared payload larger than the frame
    const auto r3 = wire::decode_response(svc.handle_bytes(frame.data(), frame.size()));
    CHECK(r3.status == wire::Status::malformed);
    CHECK(r3.sequence == 123);
}

TEST_CASE("client fetch over local transport") {
    ModelParams mp;
    mp.seed = 6;
    MockVlaService svc(mp, 42);
    LocalTransport transport(svc);

    ClientConfig cfg;
    cfg.obs_bytes = 1024;
    cfg.latency.base_ms = 121.5;
    CloudClient client(transport, cfg);

    const auto res = client.fetch(10, 0.0);
    REQUIRE(res.ok);
    CHECK(res.attempts == 1);
    CHECK(res.sequence == 1);
    CHECK(res.latency_ms == 121.5);
    CHECK(res.chunk.source == ChunkSource::cloud);
    CHECK(res.chunk.origin_step == 10);
    CHECK(res.chunk.actions == synthesize_chunk(mp, 10, 0.0, ChunkSource::cloud).actions);

    // sequence numbers advance per fetch
    const auto res2 = client.fetch(11, 0.0);
    CHECK(res2.sequence == 2);
}

TEST_CASE("client gives up after two virtual timeouts") {
    ModelParams mp;
    MockVlaService svc(mp, 42);
    LocalTransport transport(svc);

    ClientConfig cfg;
    cfg.timeout_ms = 100.0;
    cfg.latency.base_ms = 250.0;  // every draw exceeds the timeout
    CloudClient client(transport, cfg);

    const auto res = client.fetch(5, 0.0);
    CHECK(!res.ok);
    CHECK(res.attempts == 2);
    CHECK(res.latency_ms == doctest::Approx(200.0).epsilon(1e-12));
}

TEST_CASE("socket loopback produces byte-identical chunks") {
    ModelParams mp;
    mp.seed = 8;
    MockVlaService svc(mp, 42);
    WireServer server(svc, "127.0.0.1", 0);
    REQUIRE(server.port() != 0);

    SocketTransport socket_t("127.0.0.1", server.port());
    LocalTransport local_t(svc);

    ClientConfig cfg;
    cfg.obs_bytes = 4096;
    cfg.latency.base_ms = 50.0;
    CloudClient remote(socket_t, cfg);
    CloudClient local(local_t, cfg);

    for (std::uint64_t step : {0ull, 3ull, 17ull}) {
        const auto a = remote.fetch(step, 0.4);
        const auto b = local.fetch(step, 0.4);
        REQUIRE(a.ok);
        REQUIRE(b.ok);
        CHECK(a.chunk.actions == b.chunk.actions);
        CHECK(a.chunk.logits == b.chunk.logits);
        CHECK(a.latency_ms == b.latency_ms);
    }
    server.stop();
}
