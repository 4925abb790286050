#include "tlc/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include "tlc/errors.hpp"

namespace tlc {

namespace {

int product(const std::vector<int>& dims)
{
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

// Fock occupation of subsystem k for joint basis index i (first factor slowest).
int occupation(int i, const std::vector<int>& dims, std::size_t k)
{
    int stride = 1;
    for (std::size_t m = dims.size(); m-- > k + 1;) {
        stride *= dims[m];
    }
    return (i / stride) % dims[k];
}

std::vector<int> total_excitations(const std::vector<int>& dims)
{
    const int d = product(dims);
    std::vector<int> q(d, 0);
    for (int i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < dims.size(); ++k) {
            q[i] += occupation(i, dims, k);
        }
    }
    return q;
}

double inf_norm(const SparseMatrix& m)
{
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(m.rows());
    for (int c = 0; c < m.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
            row_sums[it.row()] += std::abs(it.value());
        }
    }
    return row_sums.size() ? row_sums.maxCoeff() : 0.0;
}

DenseMatrix hermitian_part(const DenseMatrix& m)
{
    return 0.5 * (m + m.adjoint());
}

}  // namespace

DensityMatrix::DensityMatrix(std::vector<int> d, DenseMatrix r) : dims(std::move(d)), rho(std::move(r))
{
    const int n = product(dims);
    if (rho.rows() != n || rho.cols() != n) {
        throw ParameterError("density matrix does not match dims");
    }
}

double DensityMatrix::hermiticity_error() const
{
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const
{
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(rho), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

cplx DensityMatrix::expect(const Operator& op) const
{
    if (op.dimension() != dimension()) {
        throw ParameterError("operator does not act on this state");
    }
    cplx acc = 0.0;
    for (int c = 0; c < op.mat.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(op.mat, c); it; ++it) {
            acc += it.value() * rho(it.col(), it.row());
        }
    }
    return acc;
}

DensityMatrix DensityMatrix::pure(std::vector<int> dims, const Vector& psi)
{
    const Vector v = psi.normalized();
    return DensityMatrix(std::move(dims), v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::vector<int> dims)
{
    const int n = product(dims);
    return DensityMatrix(std::move(dims), DenseMatrix::Identity(n, n) / static_cast<double>(n));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b)
{
    if (a.dimension() != b.dimension()) {
        throw ParameterError("trace distance between states of different dimension");
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(a.rho - b.rho), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double top_level_population(const DensityMatrix& state, int levels)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < state.dims.size(); ++k) {
        double p = 0.0;
        for (int i = 0; i < state.dimension(); ++i) {
            if (occupation(i, state.dims, k) >= state.dims[k] - levels) {
                p += state.rho(i, i).real();
            }
        }
        worst = std::max(worst, p);
    }
    return worst;
}

double stationarity_residual(const Liouvillian& gen, const DensityMatrix& state)
{
    const Vector v = vectorize(state.rho);
    const Vector r = gen.matrix * v;
    const double scale = inf_norm(gen.matrix) * v.cwiseAbs().maxCoeff();
    return scale > 0.0 ? r.cwiseAbs().maxCoeff() / scale : r.cwiseAbs().maxCoeff();
}

bool conserves_excitation_difference(const Liouvillian& gen)
{
    const int d = gen.hilbert_dim();
    const std::vector<int> q = total_excitations(gen.dims);
    for (int c = 0; c < gen.matrix.outerSize(); ++c) {
        const int qc = q[c % d] - q[c / d];
        for (SparseMatrix::InnerIterator it(gen.matrix, c); it; ++it) {
            const int r = static_cast<int>(it.row());
            if (q[r % d] - q[r / d] != qc) {
                return false;
            }
        }
    }
    return true;
}

namespace {

// Solve the trace-constrained system restricted to `keep` (vec indices).
// Returns the full-length vector, or nullopt when the factorization fails.
std::optional<Vector> constrained_solve(const Liouvillian& gen, const std::vector<int>& keep)
{
    const int d = gen.hilbert_dim();
    const int n = d * d;
    std::vector<int> pos(n, -1);
    for (std::size_t k = 0; k < keep.size(); ++k) {
        pos[keep[k]] = static_cast<int>(k);
    }
    const int m = static_cast<int>(keep.size());
    const int replaced = pos[0];

    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(gen.matrix.nonZeros());
    for (int k = 0; k < m; ++k) {
        for (SparseMatrix::InnerIterator it(gen.matrix, keep[k]); it; ++it) {
            const int r = pos[it.row()];
            if (r < 0 || r == replaced) {
                continue;
            }
            trip.emplace_back(r, k, it.value());
        }
    }
    for (int i = 0; i < d; ++i) {
        trip.emplace_back(replaced, pos[i + d * i], 1.0);
    }
    SparseMatrix sys(m, m);
    sys.setFromTriplets(trip.begin(), trip.end());
    sys.makeCompressed();

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(sys);
    lu.factorize(sys);
    if (lu.info() != Eigen::Success) {
        return std::nullopt;
    }
    Vector rhs = Vector::Zero(m);
    rhs[replaced] = 1.0;
    Vector x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) {
        return std::nullopt;
    }
    // Two rounds of iterative refinement against the same factorization.
    for (int round = 0; round < 2; ++round) {
        const Vector r = rhs - sys * x;
        x += lu.solve(r);
    }
    Vector full = Vector::Zero(n);
    for (int k = 0; k < m; ++k) {
        full[keep[k]] = x[k];
    }
    return full;
}

DensityMatrix to_state(const Liouvillian& gen, const Vector& v)
{
    const int d = gen.hilbert_dim();
    DenseMatrix rho = hermitian_part(unvectorize(v, d));
    rho /= rho.trace();
    return DensityMatrix(gen.dims, std::move(rho));
}

}  // namespace

SteadyState steady_state(const Liouvillian& gen, const SteadyStateOptions& opts)
{
    const int d = gen.hilbert_dim();
    const int n = d * d;
    SteadyState out;

    std::vector<int> keep;
    if (opts.use_charge_symmetry && conserves_excitation_difference(gen)) {
        const std::vector<int> q = total_excitations(gen.dims);
        for (int j = 0; j < d; ++j) {
            for (int i = 0; i < d; ++i) {
                if (q[i] == q[j]) {
                    keep.push_back(i + d * j);
                }
            }
        }
        out.used_charge_symmetry = true;
    } else {
        keep.resize(n);
        std::iota(keep.begin(), keep.end(), 0);
    }

    bool solved = false;
    if (auto v = constrained_solve(gen, keep)) {
        out.state = to_state(gen, *v);
        out.residual = stationarity_residual(gen, out.state);
        solved = out.residual <= opts.residual_tol;
    }
    if (!solved) {
        out.used_fallback = true;
        const DensityMatrix mixed = DensityMatrix::maximally_mixed(gen.dims);
        DensityMatrix rho = propagate(gen, mixed, opts.fallback_time, 1e-3);
        out.state = DensityMatrix(gen.dims, hermitian_part(rho.rho) / rho.rho.trace());
        out.residual = stationarity_residual(gen, out.state);
        if (out.residual > opts.residual_tol) {
            throw NonConvergenceError("steady state not reached: residual " + std::to_string(out.residual),
                                      out.residual);
        }
    }
    out.top_population = top_level_population(out.state, 2);
    out.cutoff_converged = out.top_population < opts.cutoff_tol;
    return out;
}

std::optional<double> spectral_gap(const Liouvillian& gen, int max_vector_dim)
{
    if (gen.matrix.rows() > max_vector_dim) {
        return std::nullopt;
    }
    const DenseMatrix dense(gen.matrix);
    Eigen::BDCSVD<DenseMatrix> svd(dense);
    const auto& sv = svd.singularValues();
    if (sv.size() < 2) {
        return std::nullopt;
    }
    return sv[sv.size() - 2];
}

Vector integrate(const SparseMatrix& gen, Vector y, double t_final, double dt, double rtol, double atol)
{
    if (!(dt > 0.0)) {
        throw ParameterError("initial step must be positive");
    }
    if (t_final <= 0.0) {
        return y;
    }
    // Dormand-Prince 5(4), first-same-as-last.
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = 0.0;
    double h = std::min(dt, t_final);
    Vector k1 = gen * y;
    Vector k2, k3, k4, k5, k6, k7, y_new, err;
    while (t < t_final) {
        if (t + h > t_final) {
            h = t_final - t;
        }
        k2 = gen * (y + h * a21 * k1);
        k3 = gen * (y + h * (a31 * k1 + a32 * k2));
        k4 = gen * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = gen * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = gen * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = gen * y_new;
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err_norm = std::max(err_norm, std::abs(err[i]) / scale);
        }
        if (!std::isfinite(err_norm)) {
            err_norm = 1e10;
        }
        if (err_norm <= 1.0) {
            t += h;
            y.swap(y_new);
            k1.swap(k7);
        }
        const double factor = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (t < t_final && h < 1e-14 * std::max(1.0, t)) {
            throw StiffnessError("step size underflow at t = " + std::to_string(t) + " (h = " + std::to_string(h)
                                 + ")");
        }
    }
    return y;
}

DensityMatrix propagate(const Liouvillian& gen, const DensityMatrix& rho0, double t_final, double dt,
                        const PropagateOptions& opts)
{
    if (!(dt > 0.0)) {
        throw ParameterError("dt must be positive");
    }
    if (rho0.dimension() != gen.hilbert_dim()) {
        throw ParameterError("initial state does not match generator dimension");
    }
    const Vector x0 = vectorize(rho0.rho);
    const bool dense = opts.method == PropagationMethod::exponential
                       || (opts.method == PropagationMethod::automatic && gen.matrix.rows() <= opts.dense_limit);
    Vector x;
    if (dense) {
        const DenseMatrix expo = (DenseMatrix(gen.matrix) * t_final).exp();
        x = expo * x0;
    } else {
        x = integrate(gen.matrix, x0, t_final, dt, opts.rtol, opts.atol);
    }
    return DensityMatrix(rho0.dims, unvectorize(x, gen.hilbert_dim()));
}

Propagator::Propagator(const Liouvillian& gen, double interval, const PropagateOptions& opts)
    : gen_(&gen), interval_(interval), opts_(opts)
{
    if (interval < 0.0) {
        throw ParameterError("negative propagation interval");
    }
    const bool dense = opts.method == PropagationMethod::exponential
                       || (opts.method == PropagationMethod::automatic && gen.matrix.rows() <= opts.dense_limit);
    if (dense) {
        dense_ = (DenseMatrix(gen.matrix) * interval).exp();
    }
}

Vector Propagator::step(const Vector& x) const
{
    if (dense_) {
        return *dense_ * x;
    }
    return integrate(gen_->matrix, x, interval_, std::min(interval_, 1e-3), opts_.rtol, opts_.atol);
}

namespace {

cplx trace_product(const Operator& a, const Vector& x, int d)
{
    // Tr[A X] with X column-stacked.
    cplx acc = 0.0;
    for (int c = 0; c < a.mat.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(a.mat, c); it; ++it) {
            acc += it.value() * x[it.col() + static_cast<Eigen::Index>(d) * it.row()];
        }
    }
    return acc;
}

void require_stationary(const Liouvillian& gen, const DensityMatrix& rho_ss)
{
    if (rho_ss.dimension() != gen.hilbert_dim()) {
        throw PreconditionError("state does not match generator dimension");
    }
    const double res = stationarity_residual(gen, rho_ss);
    if (res > 1e-8) {
        throw PreconditionError("correlation requires a stationary state (residual " + std::to_string(res) + ")");
    }
}

}  // namespace

CorrelationSeries two_time_correlation(const Liouvillian& gen, const DensityMatrix& rho_ss, const Operator& a,
                                       const Operator& b, const std::vector<double>& lags,
                                       const PropagateOptions& opts)
{
    require_stationary(gen, rho_ss);
    const int d = gen.hilbert_dim();
    CorrelationSeries out;
    out.lags = lags;
    out.coherent = rho_ss.expect(a) * rho_ss.expect(b);

    Vector x = vectorize(DenseMatrix(b.mat * rho_ss.rho));
    std::map<long long, Propagator> cache;
    double t = 0.0;
    for (double tau : lags) {
        if (tau < t - 1e-12) {
            throw ParameterError("lags must be non-negative and non-decreasing");
        }
        const double step = tau - t;
        if (step > 1e-12) {
            const long long key = std::llround(step * 1e9);
            auto it = cache.find(key);
            if (it == cache.end()) {
                it = cache.emplace(key, Propagator(gen, step, opts)).first;
            }
            x = it->second.step(x);
        }
        t = tau;
        out.values.push_back(trace_product(a, x, d));
    }
    return out;
}

CorrelationSeries two_time_correlation_adaptive(const Liouvillian& gen, const DensityMatrix& rho_ss,
                                                const Operator& a, const Operator& b, double dtau,
                                                double decay_tol, double max_tau)
{
    if (!(dtau > 0.0)) {
        throw ParameterError("lag step must be positive");
    }
    require_stationary(gen, rho_ss);
    const Propagator prop(gen, dtau, {PropagationMethod::automatic});
    return two_time_correlation_adaptive(gen, rho_ss, a, b, prop, decay_tol, max_tau);
}

CorrelationSeries two_time_correlation_adaptive(const Liouvillian& gen, const DensityMatrix& rho_ss,
                                                const Operator& a, const Operator& b, const Propagator& prop,
                                                double decay_tol, double max_tau)
{
    require_stationary(gen, rho_ss);
    const double dtau = prop.interval();
    if (!(dtau > 0.0)) {
        throw ParameterError("lag step must be positive");
    }
    const int d = gen.hilbert_dim();
    CorrelationSeries out;
    out.coherent = rho_ss.expect(a) * rho_ss.expect(b);
    Vector x = vectorize(DenseMatrix(b.mat * rho_ss.rho));
    out.lags.push_back(0.0);
    out.values.push_back(trace_product(a, x, d));
    const double g0 = std::abs(out.values.front() - out.coherent);
    const int block = std::max(50, static_cast<int>(std::ceil(2.0 / dtau)));
    const auto max_steps = static_cast<long>(std::ceil(max_tau / dtau));
    long step = 0;
    while (step < max_steps) {
        bool decayed = true;
        for (int k = 0; k < block && step < max_steps; ++k) {
            x = prop.step(x);
            ++step;
            out.lags.push_back(step * dtau);
            out.values.push_back(trace_product(a, x, d));
            if (std::abs(out.values.back() - out.coherent) > decay_tol * g0) {
                decayed = false;
            }
        }
        if (decayed) {
            break;
        }
    }
    return out;
}

namespace {

// int_0^h (g0 + s (g1 - g0)/h) exp(-i w s) ds
cplx segment_integral(cplx g0, cplx g1, double h, double w)
{
    const double theta = w * h;
    cplx i0, i1;
    if (std::abs(theta) < 1e-2) {
        // Series of int_0^1 u^p exp(-i theta u) du for p = 0, 1.
        const cplx z(0.0, -theta);
        cplx term = 1.0;
        i0 = 0.0;
        i1 = 0.0;
        double fact = 1.0;
        for (int n = 0; n < 8; ++n) {
            if (n > 0) {
                term *= z;
                fact *= n;
            }
            i0 += term / (fact * (n + 1));
            i1 += term / (fact * (n + 2));
        }
        i0 *= h;
        i1 *= h * h;
    } else {
        const cplx e = std::exp(cplx(0.0, -theta));
        const cplx iw(0.0, w);
        i0 = (1.0 - e) / iw;
        i1 = cplx(0.0, h) * e / w + (e - 1.0) / (w * w);
    }
    return g0 * i0 + (g1 - g0) / h * i1;
}

}  // namespace

Spectrum power_spectrum(const CorrelationSeries& corr, const std::vector<double>& omegas, bool subtract_coherent,
                        double decay_tol)
{
    if (corr.lags.size() != corr.values.size() || corr.lags.size() < 2) {
        throw ParameterError("correlation series needs at least two lags");
    }
    if (corr.lags.front() != 0.0) {
        throw ParameterError("correlation series must start at zero lag");
    }
    Spectrum out;
    out.omegas = omegas;
    std::vector<cplx> g(corr.values);
    if (subtract_coherent) {
        for (auto& v : g) {
            v -= corr.coherent;
        }
        out.coherent_weight = 2.0 * M_PI * std::abs(corr.coherent);
    }
    out.truncated = std::abs(g.back()) > decay_tol * std::abs(g.front());

    out.values.reserve(omegas.size());
    for (double w : omegas) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k + 1 < g.size(); ++k) {
            const double h = corr.lags[k + 1] - corr.lags[k];
            if (h <= 0.0) {
                continue;
            }
            acc += std::exp(cplx(0.0, -w * corr.lags[k])) * segment_integral(g[k], g[k + 1], h, w);
        }
        out.values.push_back(2.0 * acc.real());
    }
    return out;
}

}  // namespace tlc
