#include "tlc/trajectories.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "tlc/errors.hpp"
#include "tlc/parallel.hpp"

namespace tlc {

namespace {

// Populations below this are dropped after every jump.
constexpr double flush_threshold = 1e-40;

struct JumpMap {
    double rate;
    int shift;
    /// coef[n] = <n + shift|L|n>, zero where the target is outside the space.
    std::vector<double> coef;
};

std::vector<JumpMap> jump_maps(const OscillatorParams& p, const FockSpace& space)
{
    std::vector<JumpMap> out;
    for (const auto& ch : jump_channels(p, space)) {
        JumpMap m{ch.rate, 0, std::vector<double>(space.dimension(), 0.0)};
        bool shift_set = false;
        for (int c = 0; c < ch.op.mat.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(ch.op.mat, c); it; ++it) {
                m.coef[c] = it.value().real();
                if (!shift_set) {
                    m.shift = static_cast<int>(it.row()) - c;
                    shift_set = true;
                }
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

double radius_of(const Vector& psi)
{
    double acc = 0.0;
    for (Eigen::Index n = 1; n < psi.size(); ++n) {
        acc += n * std::norm(psi[n]);
    }
    return std::sqrt(acc);
}

double amplitude_of(const Vector& psi)
{
    cplx acc = 0.0;
    for (Eigen::Index n = 0; n + 1 < psi.size(); ++n) {
        acc += std::conj(psi[n]) * std::sqrt(static_cast<double>(n + 1)) * psi[n + 1];
    }
    return std::abs(acc);
}

std::vector<double> sample_times(double t_final, double interval)
{
    if (!(interval > 0.0)) {
        throw ParameterError("sample interval must be positive");
    }
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor(t_final / interval + 1e-9));
    for (long k = 0; k <= count; ++k) {
        out.push_back(k * interval);
    }
    return out;
}

struct Window {
    int lo;
    int hi;
};

Window support(const Vector& psi)
{
    int lo = 0;
    int hi = static_cast<int>(psi.size()) - 1;
    while (lo < hi && psi[lo] == cplx(0.0)) {
        ++lo;
    }
    while (hi > lo && psi[hi] == cplx(0.0)) {
        --hi;
    }
    return {lo, hi};
}

int choose_channel(const std::vector<JumpMap>& maps, const Vector& psi, Window win, double u)
{
    std::array<double, 4> w{};
    double total = 0.0;
    for (std::size_t j = 0; j < maps.size(); ++j) {
        if (maps[j].rate == 0.0) {
            continue;
        }
        double acc = 0.0;
        for (int n = win.lo; n <= win.hi; ++n) {
            const double c = maps[j].coef[n];
            if (c != 0.0) {
                acc += c * c * std::norm(psi[n]);
            }
        }
        w[j] = maps[j].rate * acc;
        total += w[j];
    }
    if (!(total > 0.0)) {
        throw NumericalError("jump requested but every channel has zero weight");
    }
    double target = u * total;
    int last = -1;
    for (std::size_t j = 0; j < maps.size(); ++j) {
        if (w[j] <= 0.0) {
            continue;
        }
        last = static_cast<int>(j);
        if (target < w[j]) {
            return last;
        }
        target -= w[j];
    }
    return last;
}

Vector apply_jump(const JumpMap& m, const Vector& psi, Window win)
{
    Vector out = Vector::Zero(psi.size());
    for (int n = win.lo; n <= win.hi; ++n) {
        if (m.coef[n] != 0.0) {
            out[n + m.shift] = m.coef[n] * psi[n];
        }
    }
    const double norm = out.norm();
    if (!(norm > 0.0)) {
        throw NumericalError("jump annihilated the state");
    }
    out /= norm;
    for (Eigen::Index n = 0; n < out.size(); ++n) {
        if (std::norm(out[n]) < flush_threshold) {
            out[n] = 0.0;
        }
    }
    return out / out.norm();
}

// Smallest tau with sum_n p_n exp(-gamma_n tau) = u, or +inf.
double waiting_time(const std::vector<double>& pops, const std::vector<double>& gamma, int lo, int hi, double log_u)
{
    double stuck = 0.0;
    for (int n = lo; n <= hi; ++n) {
        if (gamma[n] == 0.0) {
            stuck += pops[n];
        }
    }
    if (stuck > 0.0 && std::log(stuck) >= log_u) {
        return std::numeric_limits<double>::infinity();
    }
    if (lo == hi) {
        return -log_u / gamma[lo];
    }
    // F(tau) = ln sum p e^{-g tau} - ln u is convex and decreasing, so Newton
    // from tau = 0 increases monotonically towards the root.
    double tau = 0.0;
    for (int it = 0; it < 200; ++it) {
        double s = 0.0, sg = 0.0;
        for (int n = lo; n <= hi; ++n) {
            if (pops[n] == 0.0) {
                continue;
            }
            const double w = pops[n] * std::exp(-gamma[n] * tau);
            s += w;
            sg += w * gamma[n];
        }
        const double f = std::log(s) - log_u;
        if (!(sg > 0.0)) {
            return std::numeric_limits<double>::infinity();
        }
        const double step = f * s / sg;
        tau += step;
        if (std::abs(f) < 1e-14 || step <= 1e-15 * tau) {
            break;
        }
    }
    return tau;
}

TrajectoryRecord run_diagonal(const OscillatorParams& p, const FockSpace& space, Vector psi, double t_final,
                              std::mt19937_64& rng, const TrajectoryOptions& opts, TrajectoryRecord rec)
{
    const auto maps = jump_maps(p, space);
    const int d = space.dimension();
    const Operator h = hamiltonian(p, space);
    std::vector<double> omega(d, 0.0), gamma(d, 0.0);
    for (int n = 0; n < d; ++n) {
        omega[n] = h.mat.coeff(n, n).real();
        for (const auto& m : maps) {
            gamma[n] += m.rate * m.coef[n] * m.coef[n];
        }
    }
    const auto evolve = [&](const Vector& x, double tau, Window w) {
        Vector y = Vector::Zero(d);
        double norm2 = 0.0;
        for (int n = w.lo; n <= w.hi; ++n) {
            if (x[n] != cplx(0.0)) {
                y[n] = x[n] * std::exp(cplx(-0.5 * gamma[n] * tau, -omega[n] * tau));
                norm2 += std::norm(y[n]);
            }
        }
        if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
            throw NumericalError("state norm underflow after free evolution of " + std::to_string(tau));
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (int n = w.lo; n <= w.hi; ++n) {
            y[n] *= inv;
        }
        return y;
    };

    const auto samples = sample_times(t_final, opts.sample_interval);
    std::size_t next_sample = 0;
    std::vector<double> pops(d, 0.0);
    double t = 0.0;
    for (;;) {
        const Window w = support(psi);
        for (int n = w.lo; n <= w.hi; ++n) {
            pops[n] = std::norm(psi[n]);
        }
        const double tau = waiting_time(pops, gamma, w.lo, w.hi, std::log(uniform_open(rng)));
        const double t_jump = t + tau;
        const double t_stop = std::min(t_jump, t_final);
        while (next_sample < samples.size() && samples[next_sample] <= t_stop) {
            const Vector at = evolve(psi, samples[next_sample] - t, w);
            rec.amplitude.push_back(amplitude_of(at));
            rec.radius.push_back(radius_of(at));
            ++next_sample;
        }
        if (t_jump > t_final) {
            psi = evolve(psi, t_final - t, w);
            break;
        }
        psi = evolve(psi, tau, w);
        t = t_jump;
        const int ch = choose_channel(maps, psi, w, uniform_open(rng));
        psi = apply_jump(maps[ch], psi, w);
        ++rec.channel_counts[ch];
        if (opts.record_jumps) {
            rec.jumps.push_back({t, ch});
        }
    }
    rec.times.assign(samples.begin(), samples.begin() + static_cast<long>(rec.amplitude.size()));
    rec.final_state = psi;
    return rec;
}

TrajectoryRecord run_dense(const OscillatorParams& p, const FockSpace& space, Vector psi, double t_final,
                           std::mt19937_64& rng, const TrajectoryOptions& opts, TrajectoryRecord rec)
{
    if (!(opts.dt > 0.0)) {
        throw ParameterError("trajectory step must be positive");
    }
    const auto maps = jump_maps(p, space);
    const int d = space.dimension();
    DenseMatrix heff = hamiltonian(p, space).dense();
    for (int n = 0; n < d; ++n) {
        double g = 0.0;
        for (const auto& m : maps) {
            g += m.rate * m.coef[n] * m.coef[n];
        }
        heff(n, n) -= cplx(0.0, 0.5 * g);
    }
    const DenseMatrix u_step = (heff * cplx(0.0, -opts.dt)).exp();
    const auto steps = static_cast<long>(std::llround(t_final / opts.dt));
    const auto sample_every = std::max<long>(1, std::llround(opts.sample_interval / opts.dt));

    double threshold = uniform_open(rng);
    rec.times.push_back(0.0);
    rec.amplitude.push_back(amplitude_of(psi / psi.norm()));
    rec.radius.push_back(radius_of(psi / psi.norm()));
    for (long s = 1; s <= steps; ++s) {
        const double before = psi.squaredNorm();
        psi = u_step * psi;
        const double after = psi.squaredNorm();
        if (!(after > 1e-300)) {
            throw NumericalError("state norm underflow at step " + std::to_string(s));
        }
        if (1.0 - after / before > opts.max_step_probability) {
            throw ParameterError("jump probability per step " + std::to_string(1.0 - after / before)
                                 + " exceeds the limit; reduce dt");
        }
        if (after <= threshold) {
            const Vector normalized = psi / std::sqrt(after);
            const Window all{0, d - 1};
            const int ch = choose_channel(maps, normalized, all, uniform_open(rng));
            psi = apply_jump(maps[ch], normalized, all);
            ++rec.channel_counts[ch];
            if (opts.record_jumps) {
                rec.jumps.push_back({s * opts.dt, ch});
            }
            threshold = uniform_open(rng);
        }
        if (s % sample_every == 0) {
            rec.times.push_back(s * opts.dt);
            rec.amplitude.push_back(amplitude_of(psi / psi.norm()));
            rec.radius.push_back(radius_of(psi / psi.norm()));
        }
    }
    rec.final_state = psi / psi.norm();
    return rec;
}

}  // namespace

Vector coherent_state(const FockSpace& space, cplx alpha)
{
    const int d = space.dimension();
    Vector psi(d);
    // Log-domain amplitudes avoid overflow of alpha^n / sqrt(n!).
    const double r = std::abs(alpha);
    const double theta = std::arg(alpha);
    for (int n = 0; n < d; ++n) {
        const double log_mag = r > 0.0 ? n * std::log(r) - 0.5 * std::lgamma(n + 1.0) - 0.5 * r * r
                                       : (n == 0 ? 0.0 : -std::numeric_limits<double>::infinity());
        psi[n] = std::polar(std::exp(log_mag), n * theta);
    }
    return psi / psi.norm();
}

Vector fock_state(const FockSpace& space, int n)
{
    if (n < 0 || n >= space.dimension()) {
        throw ParameterError("Fock level outside the space");
    }
    Vector psi = Vector::Zero(space.dimension());
    psi[n] = 1.0;
    return psi;
}

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index)
{
    // splitmix64 finalizer over the (master, index) counter.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform_open(std::mt19937_64& rng)
{
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

TrajectoryRecord run_trajectory(const OscillatorParams& p, const FockSpace& space, const Vector& psi0,
                                double t_final, std::uint64_t seed, const TrajectoryOptions& opts)
{
    p.validate();
    if (psi0.size() != space.dimension()) {
        throw ParameterError("initial state does not match the Fock space");
    }
    if (t_final < 0.0) {
        throw ParameterError("negative final time");
    }
    const double norm = psi0.norm();
    if (!(norm > 0.0)) {
        throw ParameterError("initial state has zero norm");
    }
    std::mt19937_64 rng(seed);
    TrajectoryRecord rec;
    rec.seed = seed;
    const Vector psi = psi0 / norm;
    if (p.drive == cplx(0.0)) {
        return run_diagonal(p, space, psi, t_final, rng, opts, std::move(rec));
    }
    return run_dense(p, space, psi, t_final, rng, opts, std::move(rec));
}

ResidenceStats residence_stats(const TrajectoryRecord& rec, double r_c, double band, RadiusObservable which)
{
    const auto& series = which == RadiusObservable::number ? rec.radius : rec.amplitude;
    if (series.empty()) {
        throw PreconditionError("empty trajectory record");
    }
    ResidenceStats out;
    std::size_t inner = 0, outer = 0;
    int region = 0;  // -1 inner, +1 outer, 0 not yet assigned
    for (double r : series) {
        if (r < r_c) {
            ++inner;
        } else if (r > r_c) {
            ++outer;
        }
        const int now = r < r_c - band ? -1 : (r > r_c + band ? 1 : 0);
        if (now != 0) {
            if (region != 0 && now != region) {
                ++out.crossings;
            }
            region = now;
        }
    }
    const auto total = static_cast<double>(series.size());
    out.fraction_inner = inner / total;
    out.fraction_outer = outer / total;
    return out;
}

std::vector<TrajectoryRecord> run_ensemble(const OscillatorParams& p, const FockSpace& space, const Vector& psi0,
                                           double t_final, int n, std::uint64_t master_seed,
                                           const TrajectoryOptions& opts, int threads)
{
    std::vector<TrajectoryRecord> out(n);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        out[i] = run_trajectory(p, space, psi0, t_final, trajectory_seed(master_seed, i), opts);
    });
    return out;
}

DensityMatrix ensemble_state(const OscillatorParams& p, const FockSpace& space, const Vector& psi0, double t_final,
                             int n, std::uint64_t master_seed, const TrajectoryOptions& opts, int threads)
{
    if (n < 1) {
        throw ParameterError("ensemble needs at least one trajectory");
    }
    TrajectoryOptions light = opts;
    light.record_jumps = false;
    std::vector<Vector> finals(n);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        finals[i] = run_trajectory(p, space, psi0, t_final, trajectory_seed(master_seed, i), light).final_state;
    });
    const int d = space.dimension();
    DenseMatrix rho = DenseMatrix::Zero(d, d);
    for (const auto& psi : finals) {
        rho += psi * psi.adjoint();
    }
    return DensityMatrix({d}, rho / static_cast<double>(n));
}

}  // namespace tlc
