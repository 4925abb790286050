#include "tlc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "tlc/errors.hpp"

namespace tlc {

namespace {

constexpr double two_pi = 2.0 * M_PI;

// Index range of a lowering chain |n><n+1|, n = lo .. top-1.
struct Chain {
    int lo;
    int top;
};

Chain full_chain(int cutoff)
{
    return {0, cutoff};
}

Chain sector_chain(const FockSpace& space, Sector s)
{
    const int n_c = space.require_sector_boundary();
    return s == Sector::in ? Chain{0, n_c} : Chain{n_c, space.cutoff()};
}

std::pair<int, int> identity_range(const FockSpace& space, Sector s)
{
    const int n_c = space.require_sector_boundary();
    return s == Sector::in ? std::make_pair(0, n_c) : std::make_pair(n_c + 1, space.cutoff());
}

void require_single(const DensityMatrix& rho)
{
    if (rho.dims.size() != 1) {
        throw PreconditionError("single-oscillator state required");
    }
}

void require_pair(const DensityMatrix& rho)
{
    if (rho.dims.size() != 2) {
        throw PreconditionError("two-oscillator state required");
    }
}

void require_space(const FockSpace& space, int dim)
{
    if (space.dimension() != dim) {
        throw ParameterError("Fock space does not match state dimension");
    }
}

std::vector<cplx> single_moments(const DensityMatrix& rho, Chain c)
{
    std::vector<cplx> out;
    for (int k = 1; k <= c.top - c.lo; ++k) {
        cplx acc = 0.0;
        for (int n = c.lo; n + k <= c.top; ++n) {
            acc += rho.rho(n + k, n);
        }
        out.push_back(acc);
    }
    return out;
}

// <(a~_A^dag)^k (a~_B)^k> for k = 1..
std::vector<cplx> pair_moments(const DensityMatrix& rho, Chain ca, Chain cb)
{
    const int db = rho.dims[1];
    std::vector<cplx> out;
    const int kmax = std::min(ca.top - ca.lo, cb.top - cb.lo);
    for (int k = 1; k <= kmax; ++k) {
        cplx acc = 0.0;
        for (int n = ca.lo; n + k <= ca.top; ++n) {
            for (int m = cb.lo; m + k <= cb.top; ++m) {
                acc += rho.rho(n * db + m + k, (n + k) * db + m);
            }
        }
        out.push_back(acc);
    }
    return out;
}

double parabolic_offset(double ym, double y0, double yp)
{
    const double denom = ym - 2.0 * y0 + yp;
    if (denom >= 0.0) {
        return 0.0;
    }
    return std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
}

// Scaled generalized Laguerre values sqrt(m!/(m+d)!) x^{d/2} e^{-x/2} L_m^d(x), m = 0..count-1.
void scaled_laguerre(int d, double x, int count, std::vector<double>& out)
{
    out.assign(count, 0.0);
    if (count == 0) {
        return;
    }
    double l0;
    if (x == 0.0) {
        l0 = d == 0 ? 1.0 : 0.0;
    } else {
        l0 = std::exp(-0.5 * x + 0.5 * (d * std::log(x) - std::lgamma(d + 1.0)));
    }
    out[0] = l0;
    if (count > 1) {
        out[1] = l0 * (1.0 + d - x) / std::sqrt(d + 1.0);
    }
    for (int m = 1; m + 1 < count; ++m) {
        const double norm = std::sqrt((m + 1.0) * (m + d + 1.0));
        out[m + 1] = ((2.0 * m + 1.0 + d - x) * out[m] - std::sqrt(m * (m + static_cast<double>(d))) * out[m - 1])
                     / norm;
    }
}

}  // namespace

double PhaseDistribution::integral() const
{
    if (values.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (double v : values) {
        acc += v;
    }
    return acc * two_pi / static_cast<double>(values.size());
}

std::vector<double> phase_grid(int m)
{
    if (m < 3) {
        throw ParameterError("phase grid needs at least 3 points");
    }
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) {
        out[j] = -M_PI + two_pi * j / m;
    }
    return out;
}

PhaseDistribution distribution_from_moments(const std::vector<cplx>& moments, double norm, int m,
                                            std::string sector)
{
    PhaseDistribution out;
    out.phases = phase_grid(m);
    out.values.assign(m, 0.0);
    out.sector = std::move(sector);
    for (int j = 0; j < m; ++j) {
        const cplx step = std::exp(cplx(0.0, -out.phases[j]));
        cplx e = 1.0;
        double acc = 0.0;
        for (const cplx& c : moments) {
            e *= step;
            acc += 2.0 * (e * c).real();
        }
        out.values[j] = acc / (two_pi * norm);
    }
    return out;
}

PhaseDistribution p1(const DensityMatrix& rho, int m)
{
    require_single(rho);
    return distribution_from_moments(single_moments(rho, full_chain(rho.dimension() - 1)), 1.0, m, "full");
}

PhaseDistribution p1_sector(const DensityMatrix& rho, const FockSpace& space, Sector sector, int m)
{
    require_single(rho);
    require_space(space, rho.dimension());
    const auto [lo, hi] = identity_range(space, sector);
    double weight = 0.0;
    for (int n = lo; n <= hi; ++n) {
        weight += rho.rho(n, n).real();
    }
    if (weight < 1e-12) {
        throw EmptySectorError(std::string("sector '") + to_string(sector) + "' has no weight");
    }
    return distribution_from_moments(single_moments(rho, sector_chain(space, sector)), weight, m,
                                     to_string(sector));
}

PhaseDistribution p2(const DensityMatrix& rho, int m)
{
    require_pair(rho);
    const auto moments = pair_moments(rho, full_chain(rho.dims[0] - 1), full_chain(rho.dims[1] - 1));
    return distribution_from_moments(moments, 1.0, m, "full");
}

PhaseDistribution p2_sector(const DensityMatrix& rho, const FockSpace& space_a, const FockSpace& space_b,
                            Sector alpha, Sector beta, int m)
{
    require_pair(rho);
    require_space(space_a, rho.dims[0]);
    require_space(space_b, rho.dims[1]);
    const auto [la, ha] = identity_range(space_a, alpha);
    const auto [lb, hb] = identity_range(space_b, beta);
    const int db = rho.dims[1];
    double weight = 0.0;
    for (int n = la; n <= ha; ++n) {
        for (int k = lb; k <= hb; ++k) {
            weight += rho.rho(n * db + k, n * db + k).real();
        }
    }
    const std::string label = std::string(to_string(alpha)) + "," + to_string(beta);
    if (weight < 1e-12) {
        throw EmptySectorError("joint sector (" + label + ") has no weight");
    }
    const auto moments = pair_moments(rho, sector_chain(space_a, alpha), sector_chain(space_b, beta));
    return distribution_from_moments(moments, weight, m, label);
}

cplx first_order_coherence(const DensityMatrix& rho, const FockSpace& space_a, const FockSpace& space_b,
                           Sector alpha, Sector beta)
{
    require_pair(rho);
    require_space(space_a, rho.dims[0]);
    require_space(space_b, rho.dims[1]);
    const auto moments = pair_moments(rho, sector_chain(space_a, alpha), sector_chain(space_b, beta));
    return moments.empty() ? cplx(0.0) : moments.front();
}

SyncStrength sync_strength(const PhaseDistribution& dist, double prominence, double flat_tol)
{
    SyncStrength out;
    const auto& v = dist.values;
    const int m = static_cast<int>(v.size());
    if (m < 3) {
        throw ParameterError("distribution too short");
    }
    const auto [min_it, max_it] = std::minmax_element(v.begin(), v.end());
    const double vmin = *min_it;
    const double vmax = *max_it;
    if (vmax - vmin <= flat_tol) {
        out.argmax = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const auto at = [&](int j) { return v[((j % m) + m) % m]; };
    // Strict order with index tie-break so plateaus yield a single peak.
    const auto higher = [&](int j, int i) {
        const double a = at(j), b = at(i);
        return a > b || (a == b && ((j % m) + m) % m < i);
    };
    const double dphi = two_pi / m;
    const int imax = static_cast<int>(max_it - v.begin());
    out.max_value = vmax;
    out.argmax = wrap_phase(dist.phases[imax] + dphi * parabolic_offset(at(imax - 1), vmax, at(imax + 1)));

    const double threshold = prominence * vmax;
    for (int i = 0; i < m; ++i) {
        if (!(higher(i, i - 1) && higher(i, i + 1))) {
            continue;
        }
        double prom;
        if (i == imax) {
            prom = vmax - vmin;
        } else {
            double left_min = v[i];
            for (int s = 1; s < m; ++s) {
                if (higher(i - s, i)) {
                    break;
                }
                left_min = std::min(left_min, at(i - s));
            }
            double right_min = v[i];
            for (int s = 1; s < m; ++s) {
                if (higher(i + s, i)) {
                    break;
                }
                right_min = std::min(right_min, at(i + s));
            }
            prom = v[i] - std::max(left_min, right_min);
        }
        if (prom >= threshold && prom > 0.0) {
            ++out.n_maxima;
            out.maxima.push_back(
                wrap_phase(dist.phases[i] + dphi * parabolic_offset(at(i - 1), v[i], at(i + 1))));
        }
    }
    return out;
}

double wigner_at(const DensityMatrix& rho, cplx alpha)
{
    require_single(rho);
    const int dim = rho.dimension();
    const double x = 4.0 * std::norm(alpha);
    const double theta = std::arg(alpha);
    std::vector<double> ell;
    double w = 0.0;
    for (int d = 0; d < dim; ++d) {
        scaled_laguerre(d, x, dim - d, ell);
        if (d == 0) {
            for (int mm = 0; mm < dim; ++mm) {
                w += (mm % 2 == 0 ? 1.0 : -1.0) * ell[mm] * rho.rho(mm, mm).real();
            }
        } else {
            cplx acc = 0.0;
            for (int mm = 0; mm + d < dim; ++mm) {
                acc += (mm % 2 == 0 ? 1.0 : -1.0) * ell[mm] * rho.rho(mm, mm + d);
            }
            w += 2.0 * (std::exp(cplx(0.0, d * theta)) * acc).real();
        }
    }
    return 2.0 / M_PI * w;
}

WignerField wigner(const DensityMatrix& rho, const std::vector<double>& xs, const std::vector<double>& ps)
{
    require_single(rho);
    WignerField out;
    out.xs = xs;
    out.ps = ps;
    out.values.resize(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ps.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ps.size(); ++j) {
            out.values(i, j) = wigner_at(rho, cplx(xs[i], ps[j]));
        }
    }
    const auto trapezoid_weights = [](const std::vector<double>& g) {
        std::vector<double> w(g.size(), 0.0);
        for (std::size_t k = 0; k + 1 < g.size(); ++k) {
            const double h = 0.5 * (g[k + 1] - g[k]);
            w[k] += h;
            w[k + 1] += h;
        }
        return w;
    };
    const auto wx = trapezoid_weights(xs);
    const auto wp = trapezoid_weights(ps);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ps.size(); ++j) {
            acc += wx[i] * wp[j] * out.values(i, j);
        }
    }
    out.integral = acc;
    out.truncated = std::abs(acc - 1.0) > 1e-4;
    return out;
}

std::vector<double> ring_radii(const DensityMatrix& rho, double r_max, int n_radial, int n_angles)
{
    if (!(r_max > 0.0) || n_radial < 3 || n_angles < 1) {
        throw ParameterError("invalid radial grid");
    }
    std::vector<double> rs(n_radial + 1), w(n_radial + 1);
    for (int i = 0; i <= n_radial; ++i) {
        rs[i] = r_max * i / n_radial;
        double acc = 0.0;
        for (int j = 0; j < n_angles; ++j) {
            acc += wigner_at(rho, std::polar(rs[i], two_pi * j / n_angles));
        }
        w[i] = acc / n_angles;
    }
    std::vector<double> out;
    const double h = r_max / n_radial;
    for (int i = 1; i < n_radial; ++i) {
        if (w[i] > w[i - 1] && w[i] >= w[i + 1]) {
            out.push_back(rs[i] + h * parabolic_offset(w[i - 1], w[i], w[i + 1]));
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep)
{
    require_pair(rho);
    if (keep != 0 && keep != 1) {
        throw ParameterError("subsystem index must be 0 or 1");
    }
    const int da = rho.dims[0];
    const int db = rho.dims[1];
    if (keep == 0) {
        DenseMatrix out = DenseMatrix::Zero(da, da);
        for (int i = 0; i < da; ++i) {
            for (int j = 0; j < da; ++j) {
                cplx acc = 0.0;
                for (int k = 0; k < db; ++k) {
                    acc += rho.rho(i * db + k, j * db + k);
                }
                out(i, j) = acc;
            }
        }
        return DensityMatrix({da}, std::move(out));
    }
    DenseMatrix out = DenseMatrix::Zero(db, db);
    for (int i = 0; i < db; ++i) {
        for (int j = 0; j < db; ++j) {
            cplx acc = 0.0;
            for (int k = 0; k < da; ++k) {
                acc += rho.rho(k * db + i, k * db + j);
            }
            out(i, j) = acc;
        }
    }
    return DensityMatrix({db}, std::move(out));
}

double von_neumann_entropy(const DensityMatrix& rho)
{
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (rho.rho + rho.rho.adjoint()), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lambda = es.eigenvalues()[i];
        if (lambda > 0.0) {
            s -= lambda * std::log(lambda);
        }
    }
    return s;
}

double mutual_information(const DensityMatrix& rho, const FockSpace& space_a, const FockSpace& space_b,
                          std::optional<std::pair<Sector, Sector>> truncation)
{
    require_pair(rho);
    require_space(space_a, rho.dims[0]);
    require_space(space_b, rho.dims[1]);
    DensityMatrix state = rho;
    if (truncation) {
        const auto [la, ha] = identity_range(space_a, truncation->first);
        const auto [lb, hb] = identity_range(space_b, truncation->second);
        const int db = rho.dims[1];
        Eigen::VectorXd mask = Eigen::VectorXd::Zero(rho.dimension());
        for (int n = la; n <= ha; ++n) {
            for (int k = lb; k <= hb; ++k) {
                mask[n * db + k] = 1.0;
            }
        }
        DenseMatrix projected = mask.asDiagonal() * rho.rho * mask.asDiagonal();
        const double weight = projected.trace().real();
        if (weight < 1e-12) {
            throw EmptySectorError("truncated state has no weight");
        }
        state = DensityMatrix(rho.dims, projected / weight);
    }
    return von_neumann_entropy(partial_trace(state, 0)) + von_neumann_entropy(partial_trace(state, 1))
           - von_neumann_entropy(state);
}

}  // namespace tlc
