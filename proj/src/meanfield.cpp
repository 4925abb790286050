#include "tlc/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/Polynomials>

#include "tlc/angles.hpp"
#include "tlc/errors.hpp"

namespace tlc {

namespace {

const double nan_value = std::numeric_limits<double>::quiet_NaN();

// Bracket of the radial equation as a polynomial in u = r^2, ascending powers.
std::array<double, 4> bracket_coefficients(const std::array<double, 4>& g)
{
    return {0.5 * g[0], -g[1], 1.5 * g[2], -2.0 * g[3]};
}

double eval_poly(const std::array<double, 4>& c, double u)
{
    return ((c[3] * u + c[2]) * u + c[1]) * u + c[0];
}

double eval_dpoly(const std::array<double, 4>& c, double u)
{
    return (3.0 * c[3] * u + 2.0 * c[2]) * u + c[1];
}

const MeanFieldRadii& require_tlc(const MeanFieldRadii& r)
{
    if (r.degenerate) {
        throw DegenerateRadiiError("rates do not give three distinct positive radii");
    }
    return r;
}

void require_identical(const CoupledParams& p)
{
    if (p.osc_a.gamma != p.osc_b.gamma) {
        throw PreconditionError("expansion assumes identical rates for both oscillators");
    }
    if (p.osc_a.kerr != p.osc_b.kerr) {
        throw PreconditionError("expansion assumes equal Kerr coefficients");
    }
}

void require_undriven(const CoupledParams& p)
{
    if (p.osc_a.drive != cplx(0.0) || p.osc_b.drive != cplx(0.0)) {
        throw PreconditionError("relative-phase reduction needs both drives off");
    }
}

std::pair<double, double> pick(const MeanFieldRadii& r, int x)
{
    if (x == 1) {
        return {r.r1, r.r2};
    }
    if (x == 2) {
        return {r.r2, r.r1};
    }
    throw ParameterError("limit-cycle index must be 1 or 2");
}

}  // namespace

double radial_velocity(double r, const OscillatorParams& p)
{
    const double u = r * r;
    return r * eval_poly(bracket_coefficients(p.gamma), u);
}

PolarRates rhs_single(double r, double phi, const OscillatorParams& p)
{
    const double omega = std::abs(p.drive);
    if (r < 0.0) {
        throw ParameterError("negative radius");
    }
    if (r == 0.0 && omega != 0.0) {
        throw SingularityError("phase equation is singular at r = 0 with a drive");
    }
    const double phase = phi - (omega != 0.0 ? std::arg(p.drive) : 0.0);
    PolarRates out;
    out.dr = radial_velocity(r, p) - omega * std::sin(phase);
    out.dphi = -p.delta - 2.0 * p.kerr * r * r - (omega != 0.0 ? omega / r * std::cos(phase) : 0.0);
    return out;
}

MeanFieldRadii radii(const OscillatorParams& p)
{
    p.validate();
    const auto c = bracket_coefficients(p.gamma);
    int degree = 3;
    while (degree > 0 && c[degree] == 0.0) {
        --degree;
    }
    std::vector<double> us;
    if (degree == 1) {
        us.push_back(-c[0] / c[1]);
    } else if (degree > 1) {
        Eigen::VectorXd coeffs(degree + 1);
        for (int k = 0; k <= degree; ++k) {
            coeffs[k] = c[k];
        }
        Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
        for (Eigen::Index k = 0; k < solver.roots().size(); ++k) {
            const cplx z = solver.roots()[k];
            if (std::abs(z.imag()) <= 1e-8 * std::max(1.0, std::abs(z))) {
                us.push_back(z.real());
            }
        }
    }
    MeanFieldRadii out;
    for (double u : us) {
        for (int it = 0; it < 4; ++it) {
            const double d = eval_dpoly(c, u);
            if (d == 0.0) {
                break;
            }
            u -= eval_poly(c, u) / d;
        }
        if (u > 0.0) {
            out.roots.push_back(std::sqrt(u));
        }
    }
    std::sort(out.roots.begin(), out.roots.end());
    for (double r : out.roots) {
        out.stable.push_back(2.0 * r * r * eval_dpoly(c, r * r) < 0.0);
    }
    bool distinct = true;
    for (std::size_t k = 0; k + 1 < out.roots.size(); ++k) {
        if (out.roots[k + 1] - out.roots[k] <= 1e-9 * out.roots[k + 1]) {
            distinct = false;
        }
    }
    out.degenerate = out.roots.size() != 3 || !distinct;
    if (!out.degenerate) {
        out.r1 = out.roots[0];
        out.rc = out.roots[1];
        out.r2 = out.roots[2];
    } else {
        out.r1 = out.rc = out.r2 = nan_value;
    }
    return out;
}

int sector_boundary(const OscillatorParams& p)
{
    const auto r = require_tlc(radii(p));
    return static_cast<int>(std::lround(r.rc * r.rc));
}

std::array<double, 3> rates_from_radii(double r1, double rc, double r2, double gamma4)
{
    const double u1 = r1 * r1, uc = rc * rc, u2 = r2 * r2;
    // -2 g4 (u - u1)(u - uc)(u - u2) expanded against the bracket coefficients.
    return {4.0 * gamma4 * u1 * uc * u2, 2.0 * gamma4 * (u1 * uc + u1 * u2 + uc * u2),
            4.0 / 3.0 * gamma4 * (u1 + uc + u2)};
}

EffectivePotential::EffectivePotential(const OscillatorParams& p) : gamma_(p.gamma), radii_(tlc::radii(p)) {}

double EffectivePotential::operator()(double r) const
{
    const double u = r * r;
    return -0.25 * u * (gamma_[0] + u * (-gamma_[1] + u * (gamma_[2] - u * gamma_[3])));
}

double EffectivePotential::derivative(double r) const
{
    OscillatorParams p;
    p.gamma = gamma_;
    return -radial_velocity(r, p);
}

std::pair<double, double> EffectivePotential::barriers() const
{
    const auto& r = require_tlc(radii_);
    const double vc = (*this)(r.rc);
    return {vc - (*this)(r.r1), vc - (*this)(r.r2)};
}

EffectivePotential potential(const OscillatorParams& p)
{
    return EffectivePotential(p);
}

CoupledState rhs_coupled(const CoupledState& s, const CoupledParams& p)
{
    const auto [ra, pa, rb, pb] = s;
    if (ra <= 0.0 || rb <= 0.0) {
        throw SingularityError("coupled phase equations are singular at zero radius");
    }
    const auto a = rhs_single(ra, pa, p.osc_a);
    const auto b = rhs_single(rb, pb, p.osc_b);
    const double g = p.coupling;
    return {a.dr + g * rb * std::sin(pb - pa), a.dphi - g * rb / ra * std::cos(pb - pa),
            b.dr + g * ra * std::sin(pa - pb), b.dphi - g * ra / rb * std::cos(pa - pb)};
}

std::array<double, 3> rhs_relative(double r_a, double r_b, double phi_ba, const CoupledParams& p)
{
    require_undriven(p);
    const auto d = rhs_coupled({r_a, 0.0, r_b, phi_ba}, p);
    return {d[0], d[2], d[3] - d[1]};
}

double relative_phase_rhs_full(double r_a, double r_b, double phi_ba, const CoupledParams& p)
{
    if (r_a <= 0.0 || r_b <= 0.0) {
        throw SingularityError("relative phase equation is singular at zero radius");
    }
    return -p.relative_detuning() + 2.0 * p.osc_a.kerr * r_a * r_a - 2.0 * p.osc_b.kerr * r_b * r_b
           + p.coupling * (r_b * r_b - r_a * r_a) / (r_a * r_b) * std::cos(phi_ba);
}

double relative_phase_rhs_same(double phi_ba, int x, const CoupledParams& p)
{
    require_identical(p);
    const auto r = require_tlc(radii(p.osc_a));
    const auto [rx, ry] = pick(r, x);
    const double g = p.coupling;
    const double k = p.osc_a.kerr;
    const double rx2 = rx * rx, ry2 = ry * ry, rc2 = r.rc * r.rc;
    const double denom = 2.0 * rx2 * (rx2 - ry2) * (rx2 - rc2) * p.osc_a.gamma[3];
    return -p.relative_detuning() + (4.0 * g * k * rx2 * std::sin(phi_ba) - g * g * std::sin(2.0 * phi_ba)) / denom;
}

double relative_phase_rhs_diff(double phi_ba, int x, int y, const CoupledParams& p)
{
    require_identical(p);
    if (x == y) {
        throw ParameterError("different-radius reduction needs x != y");
    }
    const auto r = require_tlc(radii(p.osc_a));
    const double rx = pick(r, x).first;
    const double ry = pick(r, y).first;
    const double g = p.coupling;
    const double k = p.osc_a.kerr;
    const double r1 = r.r1, r2 = r.r2, rc = r.rc;
    const double r12 = r1 * r1, r22 = r2 * r2, rc2 = rc * rc;
    return -p.relative_detuning() + 2.0 * k * (rx * rx - ry * ry)
           + g * (ry * ry - rx * rx) / (r1 * r2) * std::cos(phi_ba)
           + g * k * (r12 + r22 - rc2) / (r1 * r2 * (rc2 - r12) * (r22 - rc2) * p.osc_a.gamma[3]) * std::sin(phi_ba);
}

PerturbativeRadii perturbative_radii(const CoupledParams& p, int x, int y, double phi_ba)
{
    require_identical(p);
    const auto r = require_tlc(radii(p.osc_a));
    const double ratio = p.osc_a.gamma[0] / p.osc_a.gamma[3];
    const double rc2 = r.rc * r.rc;
    const double s = std::sin(phi_ba);
    PerturbativeRadii out;
    if (x == y) {
        const auto [rx, ry] = pick(r, x);
        const double rx2 = rx * rx, ry2 = ry * ry;
        out.r_a0 = out.r_b0 = rx;
        out.r_a1 = s / (4.0 * rx * (rx2 - ry2) * (rx2 - rc2)) * ratio;
        out.r_b1 = -out.r_a1;
        out.r_a2 = s * s * (9.0 * rx2 * (ry2 + rc2) - 5.0 * ry2 * rc2 - 13.0 * rx2 * rx2)
                   / (32.0 * std::pow(rx, 3) * std::pow(rx2 - ry2, 3) * std::pow(rx2 - rc2, 3)) * ratio * ratio;
        out.r_b2 = out.r_a2;
        out.second_order = true;
        return out;
    }
    const double rx = pick(r, x).first;
    const double ry = pick(r, y).first;
    const double rx2 = rx * rx, ry2 = ry * ry;
    out.r_a0 = rx;
    out.r_b0 = ry;
    out.r_a1 = ry * s / (4.0 * rx2 * (rx2 - ry2) * (rx2 - rc2)) * ratio;
    out.r_b1 = rx * s / (4.0 * ry2 * (rx2 - ry2) * (ry2 - rc2)) * ratio;
    return out;
}

namespace {

enum class StandardPattern { low_order, high_order };

StandardPattern standard_pattern(const OscillatorParams& p)
{
    const auto& g = p.gamma;
    if (g[2] == 0.0 && g[3] == 0.0 && g[0] > 0.0 && g[1] > 0.0) {
        return StandardPattern::low_order;
    }
    if (g[0] == 0.0 && g[1] == 0.0 && g[2] > 0.0 && g[3] > 0.0) {
        return StandardPattern::high_order;
    }
    throw PreconditionError("standard limit cycle needs gamma3 = gamma4 = 0 or gamma1 = gamma2 = 0");
}

}  // namespace

double standard_lc_phase_rhs(double phi, const OscillatorParams& p)
{
    const auto& g = p.gamma;
    const double omega = std::abs(p.drive);
    const double ph = phi - (omega != 0.0 ? std::arg(p.drive) : 0.0);
    const double k = p.kerr;
    if (standard_pattern(p) == StandardPattern::low_order) {
        return -p.delta - k * g[0] / g[1] - omega * std::sqrt(2.0 * g[1] / g[0]) * std::cos(ph)
               + 2.0 * omega * k * std::sqrt(2.0 / (g[0] * g[1])) * std::sin(ph);
    }
    return -p.delta - k * 3.0 * g[2] / (2.0 * g[3]) - omega * std::sqrt(4.0 * g[3] / (3.0 * g[2])) * std::cos(ph)
           + 16.0 / 9.0 * omega * k * std::sqrt(4.0 * std::pow(g[3], 3) / (3.0 * std::pow(g[2], 5))) * std::sin(ph);
}

std::pair<double, double> standard_lc_radius(double phi, const OscillatorParams& p)
{
    const auto& g = p.gamma;
    const double ph = phi - (p.drive != cplx(0.0) ? std::arg(p.drive) : 0.0);
    if (standard_pattern(p) == StandardPattern::low_order) {
        return {std::sqrt(g[0] / (2.0 * g[1])), -std::sin(ph)};
    }
    return {std::sqrt(3.0 * g[2] / (4.0 * g[3])), -16.0 / 27.0 * std::pow(g[3] / g[2], 2) * std::sin(ph)};
}

namespace {

void require_standard_pair(const CoupledParams& p)
{
    if (standard_pattern(p.osc_a) != StandardPattern::low_order
        || standard_pattern(p.osc_b) != StandardPattern::low_order) {
        throw PreconditionError("coupled standard limit cycles need gamma3 = gamma4 = 0");
    }
    if (p.osc_a.gamma[0] != p.osc_b.gamma[0]) {
        throw PreconditionError("coupled standard limit cycles need equal gamma1");
    }
    if (p.osc_a.kerr != p.osc_b.kerr) {
        throw PreconditionError("coupled standard limit cycles need equal Kerr coefficients");
    }
}

}  // namespace

double standard_lc_relative_phase_rhs(double phi_ba, const CoupledParams& p)
{
    require_standard_pair(p);
    const double g1 = p.osc_a.gamma[0];
    const double ga = p.osc_a.gamma[1];
    const double gb = p.osc_b.gamma[1];
    const double g = p.coupling;
    const double k = p.osc_a.kerr;
    return -p.relative_detuning() + k * (g1 / ga - g1 / gb)
           + g * std::cos(phi_ba) * (std::sqrt(ga / gb) - std::sqrt(gb / ga))
           + 4.0 * g * k / std::sqrt(ga * gb) * std::sin(phi_ba)
           - g * g / g1 * std::sin(2.0 * phi_ba) * (1.0 + ga / (2.0 * gb) + gb / (2.0 * ga));
}

PerturbativeRadii standard_lc_perturbative_radii(const CoupledParams& p, double phi_ba)
{
    require_standard_pair(p);
    const double g1 = p.osc_a.gamma[0];
    const double ga = p.osc_a.gamma[1];
    const double gb = p.osc_b.gamma[1];
    const double s = std::sin(phi_ba);
    PerturbativeRadii out;
    out.r_a0 = std::sqrt(g1 / (2.0 * ga));
    out.r_b0 = std::sqrt(g1 / (2.0 * gb));
    out.r_a1 = std::sqrt(g1 / (2.0 * gb)) * s;
    out.r_b1 = -std::sqrt(gb / ga) * out.r_a1;
    out.r_a2 = -std::sqrt(g1 / (2.0 * ga)) * (3.0 * ga + 2.0 * gb) / (2.0 * gb) * s * s;
    out.r_b2 = -std::sqrt(g1 / (2.0 * gb)) * (2.0 * ga + 3.0 * gb) / (2.0 * ga) * s * s;
    out.second_order = true;
    return out;
}

std::pair<double, double> locking_slopes(double r, double omega)
{
    if (omega == 0.0) {
        throw SingularityError("locking slopes diverge without a drive");
    }
    return {-r / omega, -2.0 * r * r * r / omega};
}

std::vector<PhaseFixedPoint> phase_fixed_points(const std::function<double(double)>& f, int samples)
{
    if (samples < 8) {
        throw ParameterError("too few phase samples");
    }
    const double h = 2.0 * M_PI / samples;
    std::vector<double> grid(samples), vals(samples);
    for (int k = 0; k < samples; ++k) {
        grid[k] = -M_PI + h * k;
        vals[k] = f(grid[k]);
    }
    std::vector<double> roots;
    for (int k = 0; k < samples; ++k) {
        const double a = grid[k];
        const double fa = vals[k];
        const double fb = vals[(k + 1) % samples];
        if (fa == 0.0) {
            roots.push_back(a);
        } else if (fa * fb < 0.0) {
            boost::uintmax_t iters = 200;
            const auto tol = boost::math::tools::eps_tolerance<double>(50);
            const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, a + h, fa, fb, tol, iters);
            roots.push_back(0.5 * (lo + hi));
        }
    }
    std::vector<PhaseFixedPoint> out;
    for (double r : roots) {
        const double w = wrap_phase(r);
        const bool dup = std::any_of(out.begin(), out.end(),
                                     [&](const PhaseFixedPoint& q) { return phase_distance(q.phi, w) < 1e-9; });
        if (dup) {
            continue;
        }
        const double d = 1e-6;
        const double slope = (f(w + d) - f(w - d)) / (2.0 * d);
        out.push_back({w, slope < 0.0, slope});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.phi < b.phi; });
    return out;
}

FixedPoint newton_fixed_point(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                              std::vector<double> x0, double tol, int max_iter)
{
    const auto n = static_cast<Eigen::Index>(x0.size());
    const auto to_vec = [](const std::vector<double>& v) {
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
    };
    const auto jacobian = [&](const std::vector<double>& x) {
        Eigen::MatrixXd j(n, n);
        for (Eigen::Index c = 0; c < n; ++c) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[c]));
            auto xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            j.col(c) = (to_vec(f(xp)) - to_vec(f(xm))) / (2.0 * h);
        }
        return j;
    };
    FixedPoint out;
    std::vector<double> x = std::move(x0);
    Eigen::VectorXd fx = to_vec(f(x));
    double res = fx.cwiseAbs().maxCoeff();
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::MatrixXd j = jacobian(x);
        const Eigen::VectorXd dx = j.fullPivLu().solve(-fx);
        if (!dx.allFinite()) {
            break;
        }
        // Backtrack until the residual does not grow.
        double lambda = 1.0;
        std::vector<double> trial(x.size());
        Eigen::VectorXd ft;
        double rt = std::numeric_limits<double>::infinity();
        for (int b = 0; b < 30; ++b) {
            for (Eigen::Index c = 0; c < n; ++c) {
                trial[c] = x[c] + lambda * dx[c];
            }
            try {
                ft = to_vec(f(trial));
                rt = ft.cwiseAbs().maxCoeff();
            } catch (const SingularityError&) {
                rt = std::numeric_limits<double>::infinity();
            }
            if (rt <= res || rt < tol) {
                break;
            }
            lambda *= 0.5;
        }
        if (!(rt <= res) && !(rt < tol)) {
            break;
        }
        const double step = lambda * dx.cwiseAbs().maxCoeff();
        x = trial;
        fx = ft;
        res = rt;
        double scale = 1.0;
        for (double v : x) {
            scale = std::max(scale, std::abs(v));
        }
        if (step <= 1e-15 * scale) {
            break;
        }
    }
    out.x = x;
    out.residual = res;
    out.converged = res <= tol;
    Eigen::EigenSolver<Eigen::MatrixXd> es(jacobian(x), false);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues.push_back(es.eigenvalues()[k].real());
    }
    return out;
}

FixedPoint single_fixed_point(const OscillatorParams& p, double r0, double phi0)
{
    auto fp = newton_fixed_point(
        [&](const std::vector<double>& x) {
            const auto d = rhs_single(x[0], x[1], p);
            return std::vector<double>{d.dr, d.dphi};
        },
        {r0, phi0}, 1e-11);
    fp.x[1] = wrap_phase(fp.x[1]);
    return fp;
}

FixedPoint coupled_fixed_point(const CoupledParams& p, double r_a0, double r_b0, double phi_ba0)
{
    require_undriven(p);
    auto fp = newton_fixed_point(
        [&](const std::vector<double>& x) {
            const auto d = rhs_relative(x[0], x[1], x[2], p);
            return std::vector<double>(d.begin(), d.end());
        },
        {r_a0, r_b0, phi_ba0}, 1e-11);
    fp.x[2] = wrap_phase(fp.x[2]);
    return fp;
}

std::pair<double, double> integrate_single(const OscillatorParams& p, double r0, double phi0, double t_final,
                                           double rtol)
{
    using State = std::array<double, 2>;
    namespace ode = boost::numeric::odeint;
    State s{r0, phi0};
    auto stepper = ode::make_controlled(rtol * 1e-3, rtol, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(
        stepper,
        [&](const State& x, State& dx, double) {
            const auto d = rhs_single(x[0], x[1], p);
            dx = {d.dr, d.dphi};
        },
        s, 0.0, t_final, 1e-3);
    return {s[0], wrap_phase(s[1])};
}

CoupledState integrate_coupled(const CoupledParams& p, const CoupledState& s0, double t_final, double rtol)
{
    namespace ode = boost::numeric::odeint;
    CoupledState s = s0;
    auto stepper = ode::make_controlled(rtol * 1e-3, rtol, ode::runge_kutta_dopri5<CoupledState>());
    ode::integrate_adaptive(
        stepper, [&](const CoupledState& x, CoupledState& dx, double) { dx = rhs_coupled(x, p); }, s, 0.0, t_final,
        1e-3);
    return s;
}

}  // namespace tlc
