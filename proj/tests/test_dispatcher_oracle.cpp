#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rapid/trigger.hpp"
#include "reference_dispatcher.hpp"
#include "stream_gen.hpp"

using namespace rapid;
using namespace rapid::testing;

namespace {

// Normalized scores pass through z = (x - mu) / (sigma + eps), which is
// ill conditioned where the window is nearly flat. The tolerance is the
// forward error of that map under 1e-9-relative inputs; the decision bits
// themselves must match exactly.
void check_z(double got, double want, double x, double sigma, double eps) {
    const double budget =
        1e-9 * (1.0 + std::fabs(want) + std::max(1.0, std::fabs(x)) / (sigma + eps));
    REQUIRE(std::fabs(got - want) <= budget);
}

void check_equivalent(const Decision& a, const Decision& b, const ReferenceDispatcher& ref,
                      double eps) {
    REQUIRE(a.t == b.t);
    REQUIRE(a.control_boundary == b.control_boundary);
    REQUIRE(a.control_tick == b.control_tick);
    REQUIRE(a.trigger == b.trigger);
    REQUIRE(a.dispatch == b.dispatch);
    REQUIRE(a.depletion == b.depletion);
    REQUIRE(a.warmup == b.warmup);
    REQUIRE(a.cooldown_remaining == b.cooldown_remaining);
    REQUIRE(a.m_acc == doctest::Approx(b.m_acc).epsilon(1e-9));
    REQUIRE(a.m_tau == doctest::Approx(b.m_tau).epsilon(1e-9));
    check_z(a.m_acc_hat, b.m_acc_hat, b.m_acc, ref.acc_sigma(), eps);
    check_z(a.m_tau_hat, b.m_tau_hat, b.m_tau, ref.tau_sigma(), eps);
    REQUIRE(a.omega_a == doctest::Approx(b.omega_a).epsilon(1e-12));
}

}  // namespace

TEST_CASE("incremental dispatcher matches the naive reference") {
    // Smaller sibling of the acceptance-suite sweep; same machinery.
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const StreamCase sc = make_stream_case(seed, 1200);
        Dispatcher fast(sc.cfg, sc.n);
        ReferenceDispatcher slow(sc.cfg, sc.n);
        for (std::size_t i = 0; i < sc.samples.size(); ++i) {
            const Decision a = fast.step(sc.samples[i], sc.queue_empty[i]);
            const Decision b = slow.step(sc.samples[i], sc.queue_empty[i]);
            check_equivalent(a, b, slow, sc.cfg.eps);
        }
    }
}

TEST_CASE("dispatcher is deterministic across instances") {
    const StreamCase sc = make_stream_case(99, 2000);
    Dispatcher a(sc.cfg, sc.n), b(sc.cfg, sc.n);
    for (std::size_t i = 0; i < sc.samples.size(); ++i) {
        const Decision da = a.step(sc.samples[i], sc.queue_empty[i]);
        const Decision db = b.step(sc.samples[i], sc.queue_empty[i]);
        REQUIRE(da.trigger == db.trigger);
        REQUIRE(da.dispatch == db.dispatch);
        REQUIRE(da.m_acc_hat == db.m_acc_hat);
        REQUIRE(da.m_tau_hat == db.m_tau_hat);
    }
}
