#pragma once

// Quantum-jump unraveling of the single-oscillator master equation.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "tlc/evolve.hpp"

namespace tlc {

struct JumpEvent {
    double time;
    /// 0..3 for the a^dag, a^2, a^dag^3, a^4 channels.
    int channel;
};

struct TrajectoryOptions {
    /// Step of the dense propagator used when a drive is present.
    double dt = 1e-3;
    double sample_interval = 0.5;
    /// Largest jump probability tolerated within one step of the dense propagator.
    double max_step_probability = 0.1;
    /// Keep the individual jump events (long runs may produce millions).
    bool record_jumps = true;
};

struct TrajectoryRecord {
    std::vector<double> times;
    /// |<psi(t)|a|psi(t)>| on the sample grid.
    std::vector<double> amplitude;
    /// sqrt(<psi(t)|a^dag a|psi(t)>) on the sample grid. Without a drive the
    /// jumps resolve the photon number and |<a>| decays to zero within a few
    /// jumps, so this is the radius used for dwell statistics.
    std::vector<double> radius;
    std::vector<JumpEvent> jumps;
    std::array<std::uint64_t, 4> channel_counts{};
    std::uint64_t seed = 0;
    /// Normalized state at t_final.
    Vector final_state;
};

/// Coherent state truncated to the space and renormalized.
Vector coherent_state(const FockSpace& space, cplx alpha);
Vector fock_state(const FockSpace& space, int n);

/// One trajectory from psi0 up to t_final. Without a drive the effective
/// Hamiltonian is diagonal and waiting times are sampled exactly; with a
/// drive a first-order scheme with step opts.dt is used. Identical seeds give
/// identical records. Throws ParameterError when a step would exceed
/// opts.max_step_probability and NumericalError on norm underflow.
TrajectoryRecord run_trajectory(const OscillatorParams& p, const FockSpace& space, const Vector& psi0,
                                double t_final, std::uint64_t seed, const TrajectoryOptions& opts = {});

/// Seed of trajectory `index` in an ensemble started from `master`.
std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index);

/// Uniform double in (0, 1) from the generator.
double uniform_open(std::mt19937_64& rng);

enum class RadiusObservable { number, coherence };

struct ResidenceStats {
    double fraction_inner = 0.0;
    double fraction_outer = 0.0;
    int crossings = 0;
};

/// Sample fractions below and above r_c and the number of transitions
/// between the regions r < r_c - band and r > r_c + band. `number` uses the
/// radius series, `coherence` the amplitude series.
ResidenceStats residence_stats(const TrajectoryRecord& rec, double r_c, double band = 0.5,
                               RadiusObservable which = RadiusObservable::number);

/// Records of n trajectories with seeds trajectory_seed(master, i), in index order.
std::vector<TrajectoryRecord> run_ensemble(const OscillatorParams& p, const FockSpace& space, const Vector& psi0,
                                           double t_final, int n, std::uint64_t master_seed,
                                           const TrajectoryOptions& opts = {}, int threads = 0);

/// Average of |psi><psi| over the final states of n trajectories.
DensityMatrix ensemble_state(const OscillatorParams& p, const FockSpace& space, const Vector& psi0, double t_final,
                             int n, std::uint64_t master_seed, const TrajectoryOptions& opts = {}, int threads = 0);

}  // namespace tlc
