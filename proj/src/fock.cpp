#include "tlc/fock.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "tlc/errors.hpp"

namespace tlc {

namespace {

int product(const std::vector<int>& dims)
{
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

using Triplet = Eigen::Triplet<cplx>;

Operator from_triplets(int dim, const std::vector<Triplet>& triplets)
{
    SparseMatrix m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return Operator({dim}, std::move(m));
}

void require_same_dims(const Operator& a, const Operator& b)
{
    if (a.dims != b.dims) {
        throw ParameterError("operator dimension mismatch");
    }
}

}  // namespace

const char* to_string(Sector s)
{
    return s == Sector::in ? "in" : "out";
}

FockSpace::FockSpace(int cutoff, std::optional<int> sector_boundary)
    : cutoff_(cutoff), sector_boundary_(sector_boundary)
{
    if (cutoff < 1) {
        throw ParameterError("Fock cutoff must be >= 1, got " + std::to_string(cutoff));
    }
    if (sector_boundary && (*sector_boundary < 1 || *sector_boundary > cutoff)) {
        throw ParameterError("sector boundary n_c must satisfy 0 < n_c <= N, got "
                             + std::to_string(*sector_boundary));
    }
}

int FockSpace::require_sector_boundary() const
{
    if (!sector_boundary_) {
        throw ConfigurationError("sector boundary n_c is not set");
    }
    return *sector_boundary_;
}

Operator::Operator(std::vector<int> d, SparseMatrix m) : dims(std::move(d)), mat(std::move(m))
{
    const int n = product(dims);
    if (mat.rows() != n || mat.cols() != n) {
        throw ParameterError("operator matrix does not match dims");
    }
    mat.makeCompressed();
}

Operator Operator::adjoint() const
{
    SparseMatrix adj = mat.adjoint();
    return Operator(dims, std::move(adj));
}

Operator& Operator::operator+=(const Operator& rhs)
{
    require_same_dims(*this, rhs);
    mat += rhs.mat;
    return *this;
}

Operator& Operator::operator-=(const Operator& rhs)
{
    require_same_dims(*this, rhs);
    mat -= rhs.mat;
    return *this;
}

Operator& Operator::operator*=(cplx s)
{
    mat *= s;
    return *this;
}

Operator operator+(Operator lhs, const Operator& rhs)
{
    return lhs += rhs;
}

Operator operator-(Operator lhs, const Operator& rhs)
{
    return lhs -= rhs;
}

Operator operator*(const Operator& lhs, const Operator& rhs)
{
    require_same_dims(lhs, rhs);
    SparseMatrix m = lhs.mat * rhs.mat;
    m.prune(cplx(0.0));
    return Operator(lhs.dims, std::move(m));
}

Operator operator*(cplx s, Operator op)
{
    return op *= s;
}

Operator identity(const std::vector<int>& dims)
{
    const int n = product(dims);
    SparseMatrix m(n, n);
    m.setIdentity();
    return Operator(dims, std::move(m));
}

Operator zero_operator(const std::vector<int>& dims)
{
    const int n = product(dims);
    return Operator(dims, SparseMatrix(n, n));
}

Operator annihilation(const FockSpace& space)
{
    std::vector<Triplet> t;
    for (int n = 0; n < space.cutoff(); ++n) {
        t.emplace_back(n, n + 1, std::sqrt(static_cast<double>(n + 1)));
    }
    return from_triplets(space.dimension(), t);
}

Operator creation(const FockSpace& space)
{
    return annihilation(space).adjoint();
}

Operator number(const FockSpace& space)
{
    std::vector<Triplet> t;
    for (int n = 1; n <= space.cutoff(); ++n) {
        t.emplace_back(n, n, static_cast<double>(n));
    }
    return from_triplets(space.dimension(), t);
}

Operator power(const Operator& op, int k)
{
    if (k < 0) {
        throw ParameterError("negative operator power");
    }
    Operator result = identity(op.dims);
    for (int i = 0; i < k; ++i) {
        result = result * op;
    }
    return result;
}

namespace {

Operator lowering_in_sector(const FockSpace& space, Sector sector, bool weighted)
{
    const int n_c = space.require_sector_boundary();
    const int lo = sector == Sector::in ? 0 : n_c;
    const int hi = sector == Sector::in ? n_c - 1 : space.cutoff() - 1;
    std::vector<Triplet> t;
    for (int n = lo; n <= hi; ++n) {
        const double w = weighted ? std::sqrt(static_cast<double>(n + 1)) : 1.0;
        t.emplace_back(n, n + 1, w);
    }
    return from_triplets(space.dimension(), t);
}

}  // namespace

Operator truncated_lowering(const FockSpace& space, Sector sector)
{
    return lowering_in_sector(space, sector, false);
}

Operator weighted_truncated_annihilation(const FockSpace& space, Sector sector)
{
    return lowering_in_sector(space, sector, true);
}

Operator sector_identity(const FockSpace& space, Sector sector)
{
    const int n_c = space.require_sector_boundary();
    const int lo = sector == Sector::in ? 0 : n_c + 1;
    const int hi = sector == Sector::in ? n_c : space.cutoff();
    std::vector<Triplet> t;
    for (int n = lo; n <= hi; ++n) {
        t.emplace_back(n, n, 1.0);
    }
    return from_triplets(space.dimension(), t);
}

Operator tensor(const Operator& a, const Operator& b)
{
    std::vector<int> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    SparseMatrix m = Eigen::kroneckerProduct(a.mat, b.mat);
    return Operator(std::move(dims), std::move(m));
}

Operator embed(const Operator& op, int which, const std::vector<int>& dims)
{
    if (dims.size() != 2 || (which != 0 && which != 1)) {
        throw ParameterError("embed supports two-oscillator spaces only");
    }
    if (op.dims.size() != 1 || op.dims[0] != dims[which]) {
        throw ParameterError("embedded operator does not match its slot");
    }
    const Operator other = identity({dims[1 - which]});
    return which == 0 ? tensor(op, other) : tensor(other, op);
}

}  // namespace tlc
