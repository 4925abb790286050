#pragma once

// Classical mean-field (Lienard) picture of single and coupled twin limit
// cycles: radial/phase equations, radii, effective potential, relative-phase
// reductions and their perturbative expansions in eps = g / gamma1.

#include <array>
#include <functional>
#include <vector>

#include "tlc/liouvillian.hpp"

namespace tlc {

struct PolarRates {
    double dr;
    double dphi;
};

/// Radial and phase velocity of <a> = r e^{i phi}. The drive enters through
/// |Omega| and phi - arg(Omega). Throws SingularityError for r <= 0 with a drive.
PolarRates rhs_single(double r, double phi, const OscillatorParams& p);

/// r (gamma1/2 - gamma2 r^2 + 3/2 gamma3 r^4 - 2 gamma4 r^6), the undriven radial velocity.
double radial_velocity(double r, const OscillatorParams& p);

struct MeanFieldRadii {
    double r1 = 0.0;
    double rc = 0.0;
    double r2 = 0.0;
    /// Fewer than three distinct positive roots; r1/rc/r2 are then meaningless.
    bool degenerate = true;
    /// Every positive stationary radius, ascending.
    std::vector<double> roots;
    /// Stability of each entry of `roots` (negative slope of the radial velocity).
    std::vector<bool> stable;
};

/// Roots of the cubic in u = r^2 via companion-matrix eigenvalues, polished by Newton.
MeanFieldRadii radii(const OscillatorParams& p);

/// n_c = round(rc^2). Throws DegenerateRadiiError outside the twin-limit-cycle regime.
int sector_boundary(const OscillatorParams& p);

/// Rates (gamma1, gamma2, gamma3) whose radii are (r1, rc, r2) for the given gamma4.
std::array<double, 3> rates_from_radii(double r1, double rc, double r2, double gamma4);

/// V(r) = -int_0^r radial_velocity, a degree-8 polynomial with V(0) = 0.
class EffectivePotential {
public:
    explicit EffectivePotential(const OscillatorParams& p);

    double operator()(double r) const;
    double derivative(double r) const;

    /// (V(rc) - V(r1), V(rc) - V(r2)). Throws DegenerateRadiiError when undefined.
    std::pair<double, double> barriers() const;
    const MeanFieldRadii& radii() const { return radii_; }

private:
    std::array<double, 4> gamma_;
    MeanFieldRadii radii_;
};

EffectivePotential potential(const OscillatorParams& p);

/// Coupled state (rA, phiA, rB, phiB).
using CoupledState = std::array<double, 4>;

/// Four mean-field equations of two coupled oscillators.
CoupledState rhs_coupled(const CoupledState& s, const CoupledParams& p);

/// (drA, drB, dphiBA) of the undriven coupled flow, which only depends on phiBA.
/// Throws PreconditionError if either drive is nonzero.
std::array<double, 3> rhs_relative(double r_a, double r_b, double phi_ba, const CoupledParams& p);

/// Relative-phase velocity of the full flow, -delta + 2K(rA^2 - rB^2) + g (rB^2 - rA^2)/(rA rB) cos phiBA.
double relative_phase_rhs_full(double r_a, double r_b, double phi_ba, const CoupledParams& p);

/// Equal-radius reduction about r_x (x = 1 or 2) for identical oscillators.
double relative_phase_rhs_same(double phi_ba, int x, const CoupledParams& p);

/// Different-radius reduction with r_A near r_x and r_B near r_y.
double relative_phase_rhs_diff(double phi_ba, int x, int y, const CoupledParams& p);

/// Radius corrections r_j = r_j0 + eps r_j1 + eps^2 r_j2 with eps = g / gamma1.
struct PerturbativeRadii {
    double r_a0 = 0.0, r_b0 = 0.0;
    double r_a1 = 0.0, r_b1 = 0.0;
    double r_a2 = 0.0, r_b2 = 0.0;
    /// Whether r_a2/r_b2 are available (only for the equal-radius case).
    bool second_order = false;

    double r_a(double eps) const { return r_a0 + eps * r_a1 + eps * eps * r_a2; }
    double r_b(double eps) const { return r_b0 + eps * r_b1 + eps * eps * r_b2; }
};

/// x == y selects the equal-radius expansion, x != y the first-order different-radius one.
PerturbativeRadii perturbative_radii(const CoupledParams& p, int x, int y, double phi_ba);

/// Phase velocity of a weakly driven standard limit cycle. Accepts the rate
/// patterns gamma3 = gamma4 = 0 or gamma1 = gamma2 = 0; throws PreconditionError otherwise.
double standard_lc_phase_rhs(double phi, const OscillatorParams& p);

/// Unperturbed radius and first-order coefficient (in eps = |Omega|/rate) for the same patterns.
std::pair<double, double> standard_lc_radius(double phi, const OscillatorParams& p);

/// Relative-phase velocity of two coupled standard limit cycles (gamma3 = gamma4 = 0,
/// equal gamma1 and K).
double standard_lc_relative_phase_rhs(double phi_ba, const CoupledParams& p);

/// Radius corrections for two coupled standard limit cycles.
PerturbativeRadii standard_lc_perturbative_radii(const CoupledParams& p, double phi_ba);

/// d phi_max / d Delta and d phi_max / d K at the locked point for Delta = K = 0.
std::pair<double, double> locking_slopes(double r, double omega);

struct PhaseFixedPoint {
    double phi;
    bool stable;
    double slope;
};

/// Zeros of a 2pi-periodic phase velocity located by sign changes on a grid of
/// `samples` points and refined by bracketing. Stable when the slope is negative.
std::vector<PhaseFixedPoint> phase_fixed_points(const std::function<double(double)>& f, int samples = 3600);

struct FixedPoint {
    std::vector<double> x;
    double residual = 0.0;
    bool converged = false;
    /// Real parts of the Jacobian eigenvalues at x.
    std::vector<double> eigenvalues;
};

/// Newton iteration with a central-difference Jacobian.
FixedPoint newton_fixed_point(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                              std::vector<double> x0, double tol = 1e-13, int max_iter = 100);

/// Fixed point (r, phi) of rhs_single near the guess.
FixedPoint single_fixed_point(const OscillatorParams& p, double r0, double phi0);

/// Fixed point (rA, rB, phiBA) of rhs_relative near the guess.
FixedPoint coupled_fixed_point(const CoupledParams& p, double r_a0, double r_b0, double phi_ba0);

/// Adaptive Dormand-Prince integration of rhs_single / rhs_coupled.
std::pair<double, double> integrate_single(const OscillatorParams& p, double r0, double phi0, double t_final,
                                           double rtol = 1e-10);
CoupledState integrate_coupled(const CoupledParams& p, const CoupledState& s0, double t_final, double rtol = 1e-10);

}  // namespace tlc
