#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tlc/errors.hpp"
#include "tlc/meanfield.hpp"
#include "tlc/sweep.hpp"

using namespace tlc;

namespace {

CoupledParams pair()
{
    CoupledParams p;
    p.osc_a.gamma = {1.0, 2.5, 1.04, 0.096};
    p.osc_b = p.osc_a;
    p.coupling = 1.0;
    return p;
}

SweepSpec coupled_spec()
{
    SweepSpec s;
    s.fixed = pair();
    s.coupled = true;
    s.cutoff_a = s.cutoff_b = 6;
    s.sector_boundary_a = s.sector_boundary_b = 2;
    s.axis1 = {"delta", {0.0, 0.5}};
    s.axis2 = Axis{"kerr", {0.0, 1.0}};
    s.measures = {"p2", "p2.in,in", "mi", "coherence.out,out", "population"};
    s.grid = 90;
    s.threads = 2;
    return s;
}

}  // namespace

TEST_CASE("parameter names")
{
    auto p = pair();
    apply_parameter(p, "delta", 0.7);
    CHECK(p.relative_detuning() == doctest::Approx(0.7));
    apply_parameter(p, "kerr", 0.3);
    CHECK(p.osc_a.kerr == 0.3);
    CHECK(p.osc_b.kerr == 0.3);
    apply_parameter(p, "b.gamma3", 2.0);
    CHECK(p.osc_b.gamma[2] == 2.0);
    CHECK(p.osc_a.gamma[2] == 1.04);
    apply_parameter(p, "coupling", 0.1);
    CHECK(p.coupling == 0.1);
    CHECK_THROWS_AS(apply_parameter(p, "b.gamma5", 1.0), ConfigError);
    CHECK(is_measure_name("p2.in,out", true));
    CHECK_FALSE(is_measure_name("p2", false));
    CHECK(is_measure_name("p1.out", false));
}

TEST_CASE("spec validation")
{
    auto s = coupled_spec();
    s.validate();
    s.axis1.values = {0.5, 0.5};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = coupled_spec();
    s.measures.push_back("entropy");
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("one-point sweep equals the direct computation")
{
    SweepSpec s;
    s.fixed.osc_a.gamma = {1.0, 2.5, 1.04, 0.096};
    s.cutoff_a = 20;
    s.axis1 = {"drive", {0.4}};
    s.measures = {"p1", "p1.out", "population"};
    s.grid = 180;
    const auto res = run_sweep(s);
    REQUIRE(res.rows.size() == 3);

    auto p = s.fixed.osc_a;
    p.drive = 0.4;
    const FockSpace space(20, sector_boundary(p));
    const auto ss = steady_state(build_single(p, space));
    const auto full = sync_strength(p1(ss.state, 180));
    const auto out = sync_strength(p1_sector(ss.state, space, Sector::out, 180));
    CHECK(res.rows[0].measure == "p1");
    CHECK(res.rows[0].max_value == full.max_value);
    CHECK(res.rows[0].argmax == full.argmax);
    CHECK(res.rows[0].n_maxima == full.n_maxima);
    CHECK(res.rows[1].max_value == out.max_value);
    CHECK(res.rows[1].argmax == out.argmax);
    CHECK(res.rows[2].value == ss.state.expect(number(space)).real());
    CHECK(std::isnan(res.rows[0].x2));
    CHECK(res.rows[0].x1 == 0.4);
}

TEST_CASE("sweeps are deterministic and ordered")
{
    const auto s = coupled_spec();
    const auto a = run_sweep(s);
    auto s1 = s;
    s1.threads = 1;
    const auto b = run_sweep(s1);
    REQUIRE(a.rows.size() == 2 * 2 * 5);
    REQUIRE(b.rows.size() == a.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].x1 == b.rows[i].x1);
        CHECK(a.rows[i].x2 == b.rows[i].x2);
        CHECK(a.rows[i].measure == b.rows[i].measure);
        CHECK(a.rows[i].value == b.rows[i].value);
        CHECK(a.rows[i].max_value == b.rows[i].max_value);
        CHECK(a.rows[i].ok);
    }
    CHECK(a.spec_hash == b.spec_hash);
    CHECK(a.rows[0].x1 == 0.0);
    CHECK(a.rows[5].x2 == 1.0);
    CHECK(a.rows[10].x1 == 0.5);
    CHECK(a.spec_hash != run_sweep([&] {
                             auto t = s;
                             t.grid = 91;
                             return t;
                         }()).spec_hash);
}

TEST_CASE("identical oscillators give a symmetric P2")
{
    const auto p = pair();
    const FockSpace s(6, 2);
    const auto ss = steady_state(build_coupled(p, s, s));
    // Swap A and B: rho'_{(i,k),(j,l)} = rho_{(k,i),(l,j)}.
    const int d = 7;
    double err = 0.0;
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            for (int j = 0; j < d; ++j)
                for (int l = 0; l < d; ++l)
                    err = std::max(err, std::abs(ss.state.rho(i * d + k, j * d + l) - ss.state.rho(k * d + i, l * d + j)));
    CHECK(err < 1e-10);
    const auto dist = p2(ss.state, 64);
    for (int j = 1; j < 32; ++j) {
        CHECK(dist.values[j] == doctest::Approx(dist.values[64 - j]).epsilon(1e-9));
    }
}

TEST_CASE("per-point failures are recorded")
{
    SweepSpec s;
    s.fixed.osc_a.gamma = {1.0, 2.5, 1.04, 0.096};
    s.cutoff_a = 10;
    s.axis1 = {"a.gamma2", {0.5, 2.5}};
    s.measures = {"p1.in"};
    s.grid = 90;
    const auto res = run_sweep(s);
    REQUIRE(res.rows.size() == 2);
    // gamma2 = 0.5 leaves a single limit cycle, so no sector boundary exists.
    CHECK_FALSE(res.rows[0].ok);
    CHECK_FALSE(res.rows[0].error.empty());
    CHECK(res.rows[1].ok);
}

TEST_CASE("cutoff selection doubles until converged")
{
    OscillatorParams p;
    p.gamma = {1.0, 2.5, 1.04, 0.096};
    const int n = select_cutoff(p, 5, 1e-6, 80);
    CHECK(n >= 5);
    const auto ss = steady_state(build_single(p, FockSpace(n)));
    CHECK(top_level_population(ss.state) < 1e-6);
    if (n > 5) {
        const auto coarse = steady_state(build_single(p, FockSpace(n / 2)));
        CHECK(top_level_population(coarse.state) >= 1e-6);
    }
    CHECK_THROWS_AS(select_cutoff(p, 5, 1e-30, 10), NonConvergenceError);
}

TEST_CASE("drive tongue: locking vanishes as the drive goes to zero")
{
    SweepSpec s;
    s.fixed.osc_a.gamma = {1.0, 2.5, 1.04, 0.096};
    s.cutoff_a = 30;
    s.axis1 = {"detuning", {0.0, 1.0}};
    s.axis2 = Axis{"drive", {0.01, 0.1, 0.5, 2.0}};
    s.measures = {"p1.in", "p1.out"};
    s.grid = 180;
    const auto res = run_sweep(s);
    REQUIRE(res.rows.size() == 16);
    for (int d = 0; d < 2; ++d) {
        for (int m = 0; m < 2; ++m) {
            double prev = 0.0;
            for (int w = 0; w < 4; ++w) {
                const auto& row = res.rows[d * 8 + w * 2 + m];
                REQUIRE(row.ok);
                CHECK(row.max_value > prev);
                prev = row.max_value;
            }
            CHECK(res.rows[d * 8 + m].max_value < 0.01 * prev);
        }
    }
}

TEST_CASE("same-cycle correlations are suppressed at zero Kerr")
{
    SweepSpec s;
    s.fixed = pair();
    s.coupled = true;
    s.cutoff_a = s.cutoff_b = 22;
    s.sector_boundary_a = s.sector_boundary_b = 2;
    s.axis1 = {"coupling", {3.0, 8.0}};
    s.axis2 = Axis{"kerr", {0.0, 4.0}};
    s.measures = {"p2.in,in", "p2.out,out", "p2.in,out"};
    s.grid = 360;
    const auto res = run_sweep(s);
    REQUIRE(res.rows.size() == 12);
    for (int g = 0; g < 2; ++g) {
        const auto* k0 = &res.rows[g * 6];
        const auto* k4 = &res.rows[g * 6 + 3];
        CHECK(k0[0].max_value < 0.2 * k4[0].max_value);
        CHECK(k0[1].max_value < 0.2 * k4[1].max_value);
        CHECK(k0[2].max_value > 0.5 * k4[2].max_value);
    }
}
