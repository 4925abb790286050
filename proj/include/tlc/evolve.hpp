#pragma once

// Stationary states, time propagation and two-time correlations of a
// Lindblad generator.

#include <optional>
#include <vector>

#include "tlc/liouvillian.hpp"

namespace tlc {

/// Dense density matrix with subsystem dimension metadata.
struct DensityMatrix {
    std::vector<int> dims;
    DenseMatrix rho;

    DensityMatrix() = default;
    DensityMatrix(std::vector<int> dims, DenseMatrix rho);

    int dimension() const { return static_cast<int>(rho.rows()); }
    cplx trace() const { return rho.trace(); }
    double hermiticity_error() const;
    double min_eigenvalue() const;
    /// <op> = Tr[op rho].
    cplx expect(const Operator& op) const;

    /// Pure state |psi><psi| (psi normalized here).
    static DensityMatrix pure(std::vector<int> dims, const Vector& psi);
    static DensityMatrix maximally_mixed(std::vector<int> dims);
};

/// Trace distance 0.5 * ||a - b||_1.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Largest population found in the top `levels` Fock levels of any subsystem.
double top_level_population(const DensityMatrix& state, int levels = 2);

/// Relative residual ||L v||_inf / (||L||_inf ||v||_inf).
double stationarity_residual(const Liouvillian& gen, const DensityMatrix& state);

struct SteadyStateOptions {
    double residual_tol = 1e-10;
    /// Restrict the solve to the zero-charge block when the generator
    /// conserves the total excitation-number difference.
    bool use_charge_symmetry = true;
    /// Population of the top two Fock levels above which the cutoff is flagged.
    double cutoff_tol = 1e-6;
    /// Propagation time of the fallback when the direct solve fails.
    double fallback_time = 400.0;
};

struct SteadyState {
    DensityMatrix state;
    double residual = 0.0;
    double top_population = 0.0;
    bool cutoff_converged = true;
    bool used_charge_symmetry = false;
    bool used_fallback = false;
};

/// Direct sparse solve with one generator row replaced by the trace
/// constraint; the residual is checked against the untouched generator.
/// Throws NonConvergenceError when neither the solve nor the fallback
/// propagation reaches residual_tol.
SteadyState steady_state(const Liouvillian& gen, const SteadyStateOptions& opts = {});

/// Whether every generator entry links vec(rho) components with equal
/// excitation-number difference.
bool conserves_excitation_difference(const Liouvillian& gen);

/// Second-smallest singular value of the dense generator. Only computed for
/// generators with d^2 <= max_vector_dim.
std::optional<double> spectral_gap(const Liouvillian& gen, int max_vector_dim = 2500);

enum class PropagationMethod { automatic, runge_kutta, exponential };

struct PropagateOptions {
    PropagationMethod method = PropagationMethod::runge_kutta;
    double rtol = 1e-10;
    double atol = 1e-13;
    /// `automatic` uses a dense matrix exponential up to this vector length.
    int dense_limit = 2500;
};

/// rho(t_final) for d rho/dt = L rho. `dt` is the initial step of the
/// adaptive Dormand-Prince integrator. Throws StiffnessError when the step
/// size underflows.
DensityMatrix propagate(const Liouvillian& gen, const DensityMatrix& rho0, double t_final, double dt,
                        const PropagateOptions& opts = {});

/// Fixed-interval propagator x -> exp(L * interval) x, either as a dense
/// exponential or by adaptive integration.
class Propagator {
public:
    Propagator(const Liouvillian& gen, double interval, const PropagateOptions& opts = {});

    Vector step(const Vector& x) const;
    double interval() const { return interval_; }

private:
    const Liouvillian* gen_;
    double interval_;
    PropagateOptions opts_;
    std::optional<DenseMatrix> dense_;
};

/// Vector-level adaptive integration used by propagate and Propagator.
Vector integrate(const SparseMatrix& gen, Vector x, double t_final, double dt, double rtol, double atol);

struct CorrelationSeries {
    std::vector<double> lags;
    std::vector<cplx> values;
    /// Stationary limit Tr[A rho] Tr[B rho] approached for a unique steady state.
    cplx coherent = 0.0;
};

/// g(tau) = Tr[A exp(L tau)(B rho_ss)] on a non-decreasing lag grid.
/// Throws PreconditionError if rho_ss is not stationary for L.
CorrelationSeries two_time_correlation(const Liouvillian& gen, const DensityMatrix& rho_ss, const Operator& a,
                                       const Operator& b, const std::vector<double>& lags,
                                       const PropagateOptions& opts = {PropagationMethod::automatic});

/// Uniform lag grid extended in blocks until the connected part
/// |g - coherent| stays below decay_tol * |g(0) - coherent| for a full block.
CorrelationSeries two_time_correlation_adaptive(const Liouvillian& gen, const DensityMatrix& rho_ss,
                                                const Operator& a, const Operator& b, double dtau = 0.02,
                                                double decay_tol = 1e-6, double max_tau = 400.0);

/// Same with a caller-owned propagator whose interval is the lag step, so one
/// exponential can serve several operator pairs.
CorrelationSeries two_time_correlation_adaptive(const Liouvillian& gen, const DensityMatrix& rho_ss,
                                                const Operator& a, const Operator& b, const Propagator& prop,
                                                double decay_tol = 1e-6, double max_tau = 400.0);

struct Spectrum {
    std::vector<double> omegas;
    std::vector<double> values;
    /// Weight 2 pi |coherent| of the delta peak at omega = 0 removed before
    /// the transform (zero when nothing was subtracted).
    double coherent_weight = 0.0;
    /// Set when the correlation had not decayed at the last lag.
    bool truncated = false;
};

/// S(omega) = 2 Re int_0^inf g(tau) exp(-i omega tau) d tau with g linearly
/// interpolated between lags. With subtract_coherent the stationary limit is
/// removed first and reported as coherent_weight.
Spectrum power_spectrum(const CorrelationSeries& corr, const std::vector<double>& omegas,
                        bool subtract_coherent = true, double decay_tol = 1e-6);

}  // namespace tlc
