#pragma once

// Synchronization diagnostics: phase distributions, Wigner function and
// mutual information.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tlc/angles.hpp"
#include "tlc/evolve.hpp"

namespace tlc {

/// Background-subtracted phase quasi-distribution on a uniform grid over [-pi, pi).
struct PhaseDistribution {
    std::vector<double> phases;
    std::vector<double> values;
    std::string sector = "full";

    /// Riemann sum of values * 2pi/M.
    double integral() const;
};

/// M equally spaced phases starting at -pi.
std::vector<double> phase_grid(int m);

/// (1/2pi norm) sum_k exp(-i k phi) c_k + c.c. with moments[k-1] = c_k.
PhaseDistribution distribution_from_moments(const std::vector<cplx>& moments, double norm, int m,
                                            std::string sector);

/// P1 from <a~^k> with a~ the unweighted lowering operator.
PhaseDistribution p1(const DensityMatrix& rho, int m = 720);

/// P1 restricted to one Fock sector and normalized by the sector weight.
/// Throws EmptySectorError when <I^alpha> < 1e-12.
PhaseDistribution p1_sector(const DensityMatrix& rho, const FockSpace& space, Sector sector, int m = 720);

/// Relative-phase distribution from <(a~_A^dag a~_B)^k>.
PhaseDistribution p2(const DensityMatrix& rho, int m = 720);

/// Joint-sector relative-phase distribution P2^{alpha,beta}.
PhaseDistribution p2_sector(const DensityMatrix& rho, const FockSpace& space_a, const FockSpace& space_b,
                            Sector alpha, Sector beta, int m = 720);

/// <a~_{A,alpha}^dag a~_{B,beta}>, the first-order relative-phase coherence.
cplx first_order_coherence(const DensityMatrix& rho, const FockSpace& space_a, const FockSpace& space_b,
                           Sector alpha, Sector beta);

struct SyncStrength {
    double max_value = 0.0;
    /// NaN for a flat distribution.
    double argmax = 0.0;
    int n_maxima = 0;
    /// Phases of the counted maxima, parabolically refined, in (-pi, pi].
    std::vector<double> maxima;
};

/// Global maximum and the number of local maxima whose topographic
/// prominence on the periodic grid reaches `prominence * max_value`.
/// A distribution whose total range is below flat_tol is reported as flat.
SyncStrength sync_strength(const PhaseDistribution& dist, double prominence = 0.1, double flat_tol = 1e-12);

struct WignerField {
    std::vector<double> xs;
    std::vector<double> ps;
    /// values(i, j) = W(xs[i] + i ps[j]).
    Eigen::MatrixXd values;
    /// Trapezoidal integral over the grid.
    double integral = 0.0;
    /// Set when |integral - 1| > 1e-4, i.e. the grid misses part of the support.
    bool truncated = false;
};

/// W(alpha) from the Fock-basis Laguerre kernel, normalized to unit integral
/// over the whole plane.
double wigner_at(const DensityMatrix& rho, cplx alpha);
WignerField wigner(const DensityMatrix& rho, const std::vector<double>& xs, const std::vector<double>& ps);

/// Radii of local maxima of the angle-averaged Wigner function on (0, r_max].
std::vector<double> ring_radii(const DensityMatrix& rho, double r_max, int n_radial = 400, int n_angles = 32);

/// Reduced state of one subsystem of a two-oscillator state.
DensityMatrix partial_trace(const DensityMatrix& rho, int keep);

/// -sum lambda ln lambda over positive eigenvalues.
double von_neumann_entropy(const DensityMatrix& rho);

/// S(rho_A) + S(rho_B) - S(rho). With a truncation (alpha, beta) the state is
/// first projected with I_A^alpha I_B^beta on both sides and renormalized.
double mutual_information(const DensityMatrix& rho, const FockSpace& space_a, const FockSpace& space_b,
                          std::optional<std::pair<Sector, Sector>> truncation = std::nullopt);

}  // namespace tlc
