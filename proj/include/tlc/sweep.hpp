#pragma once

// Parameter sweeps over one or two axes and blockade scans over rate ratios.

#include <optional>
#include <string>
#include <vector>

#include "tlc/evolve.hpp"
#include "tlc/measures.hpp"

namespace tlc {

/// A named parameter and its grid. Names: coupling, kerr (both oscillators),
/// delta (relative detuning, moves oscillator B), detuning and drive (oscillator
/// A), or "<a|b>.<delta|kerr|drive|gamma1..gamma4>".
struct Axis {
    std::string name;
    std::vector<double> values;
};

/// Throws ConfigError for names that do not resolve.
void apply_parameter(CoupledParams& p, const std::string& name, double value);
bool is_parameter_name(const std::string& name);

/// Diagnostic names: p1, p1.in, p1.out, p2, p2.<in|out>,<in|out>,
/// coherence.<in|out>,<in|out> (|<a~_A^dag a~_B>|), mi, mi.<in|out>,<in|out>,
/// population (mean photon number of A), top_population.
bool is_measure_name(const std::string& name, bool coupled);

struct SweepSpec {
    Axis axis1;
    std::optional<Axis> axis2;
    CoupledParams fixed;
    /// Two oscillators when set; otherwise only fixed.osc_a is used.
    bool coupled = false;
    std::vector<std::string> measures;
    int cutoff_a = 20;
    int cutoff_b = 20;
    /// Explicit sector boundaries; derived per point from the radii when unset.
    std::optional<int> sector_boundary_a;
    std::optional<int> sector_boundary_b;
    int grid = 720;
    int threads = 0;
    SteadyStateOptions solver;
    /// Re-solve at doubled cutoffs and flag rows whose scalars move by more than convergence_tol.
    bool check_convergence = false;
    double convergence_tol = 1e-4;

    /// Throws ConfigError on non-monotone grids or unknown names.
    void validate() const;
};

struct SweepRow {
    double x1 = 0.0;
    /// NaN for one-axis sweeps.
    double x2 = 0.0;
    std::string measure;
    /// Scalar measures report `value`; distributions report max/argmax/n_maxima.
    double value = 0.0;
    double max_value = 0.0;
    double argmax = 0.0;
    int n_maxima = 0;
    bool ok = true;
    bool converged = true;
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    /// FNV-1a hash of the canonical spec text.
    std::string spec_hash;
    int cutoff_a = 0;
    int cutoff_b = 0;
    double residual_tol = 0.0;
};

/// Solves every grid point independently on a worker pool; rows come out in
/// axis order (axis1 outer, axis2 inner, then measure order). Per-point
/// failures are recorded in the rows and do not stop the sweep.
SweepResult run_sweep(const SweepSpec& spec);

/// Canonical text form of a spec, used for hashing and metadata.
std::string describe(const SweepSpec& spec);

/// Evaluate the named diagnostics on one state.
std::vector<SweepRow> evaluate_measures(const DensityMatrix& rho, const FockSpace& space_a,
                                        const std::optional<FockSpace>& space_b,
                                        const std::vector<std::string>& measures, int grid);

struct BlockadeSpec {
    CoupledParams base;
    /// Index 0..3 of the rate of oscillator A that is scaled, gamma_A = ratio * gamma_B.
    int rate_index = 1;
    std::vector<double> ratios;
    /// p2 or p2.<alpha>,<alpha>.
    std::string measure = "p2";
    int cutoff_a = 12;
    int cutoff_b = 12;
    std::optional<int> sector_boundary;
    int grid = 720;
    int threads = 0;
    SteadyStateOptions solver;
};

struct BlockadePoint {
    double ratio = 0.0;
    SyncStrength strength;
    bool ok = true;
    std::string error;
};

struct BlockadeResult {
    std::vector<BlockadePoint> points;
    /// Contiguous run of two-maxima points around the ratio closest to 1.
    std::optional<std::pair<double, double>> window;
    /// Whether the run touches either end of the scanned range.
    bool window_open = false;
};

BlockadeResult blockade_scan(const BlockadeSpec& spec);

/// Smallest cutoff, doubling from `start`, whose steady state has top-level
/// population below tol. Throws NonConvergenceError past max_cutoff.
int select_cutoff(const OscillatorParams& p, int start = 10, double tol = 1e-6, int max_cutoff = 160);

}  // namespace tlc
