#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tlc/errors.hpp"
#include "tlc/measures.hpp"
#include "tlc/trajectories.hpp"

using namespace tlc;

namespace {

DensityMatrix random_state(std::vector<int> dims, unsigned seed)
{
    int d = 1;
    for (int x : dims) {
        d *= x;
    }
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    DenseMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m(i, j) = cplx(n(rng), n(rng));
    DenseMatrix rho = m * m.adjoint();
    return DensityMatrix(std::move(dims), rho / rho.trace());
}

}  // namespace

TEST_CASE("P1 equals the off-diagonal double sum")
{
    const auto rho = random_state({7}, 3);
    const auto dist = p1(rho, 64);
    double err = 0.0;
    for (std::size_t j = 0; j < dist.phases.size(); ++j) {
        const double phi = dist.phases[j];
        cplx acc = 0.0;
        for (int m = 0; m < 7; ++m)
            for (int n = 0; n < 7; ++n)
                if (m != n)
                    acc += rho.rho(m, n) * std::exp(cplx(0.0, -(m - n) * phi));
        err = std::max(err, std::abs(acc.real() / (2.0 * M_PI) - dist.values[j]));
    }
    CHECK(err < 1e-13);
    CHECK(std::abs(dist.integral()) < 1e-12);
}

TEST_CASE("sector distributions split the chain")
{
    const FockSpace s(6, 2);
    const auto rho = random_state({7}, 4);
    const auto din = p1_sector(rho, s, Sector::in, 32);
    const auto dout = p1_sector(rho, s, Sector::out, 32);
    double win = 0.0;
    for (int n = 0; n <= 2; ++n) {
        win += rho.rho(n, n).real();
    }
    // Moments: inner chain couples n in [0, n_c], outer chain n in [n_c, N].
    for (std::size_t j = 0; j < din.phases.size(); ++j) {
        const double phi = din.phases[j];
        cplx ai = 0.0;
        cplx ao = 0.0;
        for (int m = 0; m < 7; ++m) {
            for (int n = 0; n < 7; ++n) {
                if (m == n) {
                    continue;
                }
                const cplx t = rho.rho(m, n) * std::exp(cplx(0.0, -(m - n) * phi));
                if (m <= 2 && n <= 2) {
                    ai += t;
                }
                if (m >= 2 && n >= 2) {
                    ao += t;
                }
            }
        }
        CHECK(din.values[j] == doctest::Approx(ai.real() / (2.0 * M_PI * win)).epsilon(1e-12));
        CHECK(dout.values[j] == doctest::Approx(ao.real() / (2.0 * M_PI * (1.0 - win))).epsilon(1e-12));
    }
    const auto fock = DensityMatrix::pure({7}, fock_state(s, 1));
    CHECK_THROWS_AS(p1_sector(fock, s, Sector::out), EmptySectorError);
}

TEST_CASE("P2 of a product of coherent states peaks at the relative phase")
{
    const FockSpace sa(25);
    const FockSpace sb(25);
    const Vector a = coherent_state(sa, std::polar(1.5, 0.2));
    const Vector b = coherent_state(sb, std::polar(1.5, 1.1));
    Vector ab(26 * 26);
    for (int i = 0; i < 26; ++i)
        for (int k = 0; k < 26; ++k)
            ab(i * 26 + k) = a(i) * b(k);
    const auto rho = DensityMatrix::pure({26, 26}, ab);
    const auto s = sync_strength(p2(rho, 720));
    CHECK(s.n_maxima == 1);
    CHECK(phase_distance(s.argmax, 0.9) < 1e-3);
}

TEST_CASE("sync strength counts prominent maxima")
{
    PhaseDistribution d;
    d.phases = phase_grid(360);
    for (double phi : d.phases) {
        d.values.push_back(std::exp(-8.0 * (1.0 - std::cos(phi - 1.0))) + 0.5 * std::exp(-8.0 * (1.0 - std::cos(phi + 2.0))) +
                           0.001 * std::cos(40.0 * (phi - 1.0)));
    }
    const auto s = sync_strength(d);
    CHECK(s.n_maxima == 2);
    CHECK(std::abs(s.argmax - 1.0) < 1e-3);

    PhaseDistribution flat;
    flat.phases = phase_grid(16);
    flat.values.assign(16, 0.0);
    const auto f = sync_strength(flat);
    CHECK(f.n_maxima == 0);
    CHECK(std::isnan(f.argmax));
}

TEST_CASE("Wigner function closed forms")
{
    const FockSpace s(30);
    const auto vac = DensityMatrix::pure({31}, fock_state(s, 0));
    const auto one = DensityMatrix::pure({31}, fock_state(s, 1));
    const cplx beta(0.7, -0.4);
    const auto coh = DensityMatrix::pure({31}, coherent_state(s, beta));
    for (cplx al : {cplx(0.0, 0.0), cplx(0.3, 0.1), cplx(-1.2, 0.8), cplx(0.5, -2.0)}) {
        const double r2 = std::norm(al);
        CHECK(std::abs(wigner_at(vac, al) - 2.0 / M_PI * std::exp(-2.0 * r2)) < 1e-12);
        CHECK(std::abs(wigner_at(one, al) + 2.0 / M_PI * (1.0 - 4.0 * r2) * std::exp(-2.0 * r2)) < 1e-12);
        CHECK(std::abs(wigner_at(coh, al) - 2.0 / M_PI * std::exp(-2.0 * std::norm(al - beta))) < 1e-10);
    }
    std::vector<double> xs;
    for (int i = 0; i <= 80; ++i) {
        xs.push_back(-4.0 + 0.1 * i);
    }
    const auto w = wigner(coh, xs, xs);
    CHECK(w.integral == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(w.truncated);
}

TEST_CASE("ring radii of a Fock state")
{
    const FockSpace s(30);
    const auto rho = DensityMatrix::pure({31}, fock_state(s, 9));
    const auto rings = ring_radii(rho, 5.0);
    REQUIRE_FALSE(rings.empty());
    // The outermost ring of |n> sits just inside sqrt(n + 1/2).
    CHECK(rings.back() == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("mutual information")
{
    const FockSpace q(1);
    Vector bell = Vector::Zero(4);
    bell(0) = 1.0;
    bell(3) = 1.0;
    const auto rho = DensityMatrix::pure({2, 2}, bell);
    CHECK(mutual_information(rho, q, q) == doctest::Approx(2.0 * std::log(2.0)));
    CHECK(von_neumann_entropy(partial_trace(rho, 0)) == doctest::Approx(std::log(2.0)));

    const auto a = random_state({3}, 5);
    const auto b = random_state({4}, 6);
    DenseMatrix prod(12, 12);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            prod.block(i * 4, j * 4, 4, 4) = a.rho(i, j) * b.rho;
    const DensityMatrix pr({3, 4}, prod);
    CHECK(std::abs(mutual_information(pr, FockSpace(2), FockSpace(3))) < 1e-10);
    CHECK((partial_trace(pr, 1).rho - b.rho).cwiseAbs().maxCoeff() < 1e-14);

    const auto mixed = random_state({3, 4}, 7);
    CHECK(mutual_information(mixed, FockSpace(2, 1), FockSpace(3, 1)) > -1e-10);
    CHECK(mutual_information(mixed, FockSpace(2, 1), FockSpace(3, 1), std::pair{Sector::in, Sector::out}) > -1e-10);
}

TEST_CASE("first-order coherence is the first pair moment")
{
    const FockSpace sa(3, 1);
    const FockSpace sb(3, 1);
    const auto rho = random_state({4, 4}, 8);
    const auto la = truncated_lowering(sa, Sector::out);
    const auto lb = truncated_lowering(sb, Sector::in);
    const auto op = tensor(la.adjoint(), lb);
    CHECK(std::abs(first_order_coherence(rho, sa, sb, Sector::out, Sector::in) - rho.expect(op)) < 1e-14);
}

TEST_CASE("P1 special cases")
{
    DenseMatrix diag = DenseMatrix::Zero(5, 5);
    diag.diagonal() << 0.1, 0.2, 0.3, 0.25, 0.15;
    const auto flat = p1(DensityMatrix({5}, diag), 64);
    for (double v : flat.values) {
        CHECK(v == 0.0);
    }
    const FockSpace s(4, 2);
    for (Sector sec : {Sector::in, Sector::out}) {
        for (double v : p1_sector(DensityMatrix({5}, diag), s, sec, 64).values) {
            CHECK(v == 0.0);
        }
    }

    Vector plus = Vector::Zero(2);
    plus << 1.0, 1.0;
    const auto d = p1(DensityMatrix::pure({2}, plus), 360);
    for (std::size_t j = 0; j < d.phases.size(); ++j) {
        CHECK(d.values[j] == doctest::Approx(std::cos(d.phases[j]) / (2.0 * M_PI)));
    }
    const auto st = sync_strength(d);
    CHECK(st.max_value == doctest::Approx(1.0 / (2.0 * M_PI)));
    CHECK(std::abs(st.argmax) < 1e-12);
    CHECK(st.n_maxima == 1);
}

TEST_CASE("P1 moment and double-sum forms agree on random states")
{
    double worst = 0.0;
    for (unsigned k = 0; k < 20; ++k) {
        const auto rho = random_state({6}, 100 + k);
        const auto dist = p1(rho, 48);
        for (std::size_t j = 0; j < dist.phases.size(); ++j) {
            cplx acc = 0.0;
            for (int m = 0; m < 6; ++m)
                for (int n = 0; n < 6; ++n)
                    if (m != n)
                        acc += rho.rho(m, n) * std::exp(cplx(0.0, -(m - n) * dist.phases[j]));
            worst = std::max(worst, std::abs(acc.real() / (2.0 * M_PI) - dist.values[j]));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("P2 special cases")
{
    DenseMatrix da = DenseMatrix::Zero(4, 4);
    da.diagonal() << 0.4, 0.3, 0.2, 0.1;
    DenseMatrix prod(16, 16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            prod.block(i * 4, j * 4, 4, 4) = da(i, j) * da;
    const DensityMatrix pr({4, 4}, prod);
    for (double v : p2(pr, 32).values) {
        CHECK(v == 0.0);
    }
    const FockSpace s(3, 1);
    for (Sector a : {Sector::in, Sector::out})
        for (Sector b : {Sector::in, Sector::out})
            for (double v : p2_sector(pr, s, s, a, b, 32).values)
                CHECK(v == 0.0);

    // Relabeling A <-> B reverses the relative phase.
    const auto rho = random_state({4, 4}, 31);
    DenseMatrix sw(16, 16);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j)
                for (int l = 0; l < 4; ++l)
                    sw(i * 4 + k, j * 4 + l) = rho.rho(k * 4 + i, l * 4 + j);
    const auto d = p2(rho, 64);
    const auto e = p2(DensityMatrix({4, 4}, sw), 64);
    for (int j = 1; j < 64; ++j) {
        CHECK(std::abs(e.values[j] - d.values[64 - j]) < 1e-10);
    }
    CHECK(std::abs(e.values[0] - d.values[0]) < 1e-10);
}

TEST_CASE("vacuum Wigner value at the origin")
{
    const FockSpace s(5);
    CHECK(wigner_at(DensityMatrix::pure({6}, fock_state(s, 0)), 0.0) == doctest::Approx(2.0 / M_PI).epsilon(1e-14));
}

TEST_CASE("mutual information dips at zero Kerr")
{
    // Identical pair at g = 3 gamma1; the sector-truncated MI is smallest at K = 0 but stays positive.
    CoupledParams p;
    p.osc_a.gamma = {1.0, 2.5, 1.04, 0.096};
    p.osc_b = p.osc_a;
    p.coupling = 3.0;
    const FockSpace s(22, 2);
    std::vector<double> in;
    std::vector<double> out;
    for (double k : {0.0, 2.0}) {
        p.osc_a.kerr = p.osc_b.kerr = k;
        const auto ss = steady_state(build_coupled(p, s, s));
        in.push_back(mutual_information(ss.state, s, s, std::pair{Sector::in, Sector::in}));
        out.push_back(mutual_information(ss.state, s, s, std::pair{Sector::out, Sector::out}));
    }
    CHECK(in[0] > 0.0);
    CHECK(out[0] > 0.0);
    CHECK(in[0] < in[1]);
    CHECK(out[0] < out[1]);
}
