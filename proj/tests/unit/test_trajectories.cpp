#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tlc/errors.hpp"
#include "tlc/trajectories.hpp"

using namespace tlc;

namespace {

OscillatorParams gain_only()
{
    OscillatorParams p;
    p.gamma = {1.0, 0.0, 0.0, 0.0};
    return p;
}

}  // namespace

TEST_CASE("same seed, same record")
{
    OscillatorParams p;
    p.gamma = {1.0, 2.5, 1.04, 0.096};
    const FockSpace s(20);
    const auto a = run_trajectory(p, s, fock_state(s, 1), 30.0, 17);
    const auto b = run_trajectory(p, s, fock_state(s, 1), 30.0, 17);
    const auto c = run_trajectory(p, s, fock_state(s, 1), 30.0, 18);
    CHECK(a.radius == b.radius);
    CHECK(a.jumps.size() == b.jumps.size());
    CHECK(a.channel_counts == b.channel_counts);
    CHECK((a.final_state - b.final_state).norm() == 0.0);
    CHECK(a.radius != c.radius);
    CHECK(trajectory_seed(5, 0) != trajectory_seed(5, 1));
    CHECK(trajectory_seed(5, 3) == trajectory_seed(5, 3));
}

TEST_CASE("pure gain grows as exp(t) - 1")
{
    // d<n>/dt = gamma1 (<n> + 1); photon number is geometric with variance n (n + 1).
    const FockSpace s(40);
    const int n = 4000;
    const double t = 0.5;
    const auto recs = run_ensemble(gain_only(), s, fock_state(s, 0), t, n, 11);
    double mean = 0.0;
    for (const auto& r : recs) {
        mean += r.radius.back() * r.radius.back();
    }
    mean /= n;
    const double expect = std::exp(t) - 1.0;
    const double se = std::sqrt(expect * (expect + 1.0) / n);
    CHECK(std::abs(mean - expect) < 4.0 * se);
}

TEST_CASE("first waiting time is exponential")
{
    // From |2> with gain only the first jump happens at rate 3 gamma1.
    const FockSpace s(30);
    const int n = 4000;
    TrajectoryOptions opts;
    opts.sample_interval = 1.0;
    const auto recs = run_ensemble(gain_only(), s, fock_state(s, 2), 5.0, n, 23, opts);
    double mean = 0.0;
    for (const auto& r : recs) {
        REQUIRE_FALSE(r.jumps.empty());
        CHECK(r.jumps.front().channel == 0);
        mean += r.jumps.front().time;
    }
    mean /= n;
    CHECK(std::abs(mean - 1.0 / 3.0) < 4.0 * (1.0 / 3.0) / std::sqrt(double(n)));
}

TEST_CASE("ensemble and record bookkeeping")
{
    OscillatorParams p;
    p.gamma = {1.0, 2.5, 1.04, 0.096};
    const FockSpace s(15);
    const auto recs = run_ensemble(p, s, fock_state(s, 0), 10.0, 6, 3, {}, 2);
    REQUIRE(recs.size() == 6);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(recs[i].seed == trajectory_seed(3, i));
        CHECK(recs[i].times.size() == recs[i].radius.size());
        CHECK(recs[i].final_state.norm() == doctest::Approx(1.0));
        std::uint64_t total = 0;
        for (auto c : recs[i].channel_counts) {
            total += c;
        }
        CHECK(total == recs[i].jumps.size());
    }
    const auto rho = ensemble_state(p, s, fock_state(s, 0), 10.0, 6, 3);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
}

TEST_CASE("driven trajectories use the stepped scheme")
{
    OscillatorParams p;
    p.gamma = {1.0, 2.5, 1.04, 0.096};
    p.drive = 0.5;
    const FockSpace s(12);
    TrajectoryOptions opts;
    // Rates on the upper levels reach ~1e3, so the step has to stay well below 1e-4.
    opts.dt = 2e-5;
    const auto rec = run_trajectory(p, s, coherent_state(s, 1.0), 0.2, 4, opts);
    CHECK(rec.final_state.norm() == doctest::Approx(1.0));
    opts.dt = 0.1;
    CHECK_THROWS_AS(run_trajectory(p, s, coherent_state(s, 1.0), 0.2, 4, opts), ParameterError);
}

TEST_CASE("residence statistics")
{
    TrajectoryRecord rec;
    rec.times = {0, 1, 2, 3, 4, 5};
    rec.radius = {1.0, 1.2, 3.0, 3.1, 1.0, 2.0};
    const auto st = residence_stats(rec, 2.0, 0.5);
    CHECK(st.fraction_inner == doctest::Approx(3.0 / 6.0));
    CHECK(st.fraction_outer == doctest::Approx(2.0 / 6.0));
    CHECK(st.crossings == 2);
}

TEST_CASE("no rates, no jumps")
{
    OscillatorParams p;
    p.gamma = {0.0, 0.0, 0.0, 0.0};
    const FockSpace s(10);
    const Vector psi0 = coherent_state(s, cplx(1.0, 0.5));
    const auto rec = run_trajectory(p, s, psi0, 20.0, 1);
    CHECK(rec.jumps.empty());
    CHECK((rec.final_state - psi0).norm() < 1e-14);
    for (double r : rec.radius) {
        CHECK(r == doctest::Approx(rec.radius.front()).epsilon(1e-14));
    }
}

TEST_CASE("residence of a constant radius")
{
    TrajectoryRecord rec;
    rec.times = {0, 1, 2, 3};
    rec.radius.assign(4, 1.0);
    const auto st = residence_stats(rec, 4.0);
    CHECK(st.fraction_inner == 1.0);
    CHECK(st.fraction_outer == 0.0);
    CHECK(st.crossings == 0);
}

TEST_CASE("inner start, outer end gives an odd crossing count")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        TrajectoryRecord rec;
        rec.radius.push_back(1.0);
        for (int i = 0; i < 40; ++i) {
            rec.radius.push_back(1.0 + 7.0 * uniform_open(rng));
        }
        rec.radius.push_back(8.0);
        rec.times.resize(rec.radius.size());
        CHECK(residence_stats(rec, 4.0, 0.5).crossings % 2 == 1);
    }
}
