#include "tlc/liouvillian.hpp"

#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "tlc/errors.hpp"

namespace tlc {

namespace {

SparseMatrix sparse_identity(int n)
{
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
}

}  // namespace

void OscillatorParams::validate() const
{
    for (std::size_t j = 0; j < gamma.size(); ++j) {
        if (!(gamma[j] >= 0.0)) {
            throw ParameterError("gamma" + std::to_string(j + 1) + " must be non-negative");
        }
    }
}

bool OscillatorParams::has_dissipation() const
{
    for (double g : gamma) {
        if (g > 0.0) {
            return true;
        }
    }
    return false;
}

void CoupledParams::validate() const
{
    osc_a.validate();
    osc_b.validate();
}

int Liouvillian::hilbert_dim() const
{
    int d = 1;
    for (int n : dims) {
        d *= n;
    }
    return d;
}

DenseMatrix Liouvillian::apply(const DenseMatrix& rho) const
{
    const int d = hilbert_dim();
    if (rho.rows() != d || rho.cols() != d) {
        throw ParameterError("density matrix does not match generator dimension");
    }
    return unvectorize(matrix * vectorize(rho), d);
}

Vector vectorize(const DenseMatrix& rho)
{
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

DenseMatrix unvectorize(const Vector& v, int dim)
{
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
        throw ParameterError("vector length is not dim^2");
    }
    return Eigen::Map<const DenseMatrix>(v.data(), dim, dim);
}

Operator hamiltonian(const OscillatorParams& p, const FockSpace& space)
{
    const Operator a = annihilation(space);
    const Operator ad = a.adjoint();
    Operator h = zero_operator(a.dims);
    if (p.delta != 0.0) {
        h += cplx(p.delta) * (ad * a);
    }
    if (p.kerr != 0.0) {
        h += cplx(p.kerr) * (ad * ad * a * a);
    }
    if (p.drive != cplx(0.0)) {
        h += p.drive * ad;
        h += std::conj(p.drive) * a;
    }
    return h;
}

std::vector<JumpChannel> jump_channels(const OscillatorParams& p, const FockSpace& space)
{
    p.validate();
    const Operator a = annihilation(space);
    const Operator ad = a.adjoint();
    return {
        {p.gamma[0], ad},
        {p.gamma[1], power(a, 2)},
        {p.gamma[2], power(ad, 3)},
        {p.gamma[3], power(a, 4)},
    };
}

SparseMatrix commutator_superop(const Operator& h)
{
    const int d = h.dimension();
    const SparseMatrix id = sparse_identity(d);
    const SparseMatrix ht = h.mat.transpose();
    SparseMatrix left = Eigen::kroneckerProduct(id, h.mat);
    SparseMatrix right = Eigen::kroneckerProduct(ht, id);
    SparseMatrix out = cplx(0.0, -1.0) * (left - right);
    return out;
}

Liouvillian dissipator_superop(const Operator& jump, double rate)
{
    if (rate < 0.0) {
        throw ParameterError("dissipator rate must be non-negative");
    }
    const int d = jump.dimension();
    if (rate == 0.0) {
        return {jump.dims, SparseMatrix(d * d, d * d)};
    }
    const SparseMatrix id = sparse_identity(d);
    const SparseMatrix ldl = jump.mat.adjoint() * jump.mat;
    const SparseMatrix lconj = jump.mat.conjugate();
    const SparseMatrix ldlt = ldl.transpose();
    SparseMatrix sandwich = Eigen::kroneckerProduct(lconj, jump.mat);
    SparseMatrix left = Eigen::kroneckerProduct(id, ldl);
    SparseMatrix right = Eigen::kroneckerProduct(ldlt, id);
    SparseMatrix out = rate * (sandwich - 0.5 * left - 0.5 * right);
    out.prune(cplx(0.0));
    return {jump.dims, std::move(out)};
}

Liouvillian assemble(const Operator& h, const std::vector<JumpChannel>& channels)
{
    SparseMatrix gen = commutator_superop(h);
    for (const auto& c : channels) {
        if (c.rate == 0.0) {
            continue;
        }
        gen += dissipator_superop(c.op, c.rate).matrix;
    }
    gen.prune(cplx(0.0));
    gen.makeCompressed();
    return {h.dims, std::move(gen)};
}

Liouvillian build_single(const OscillatorParams& p, const FockSpace& space)
{
    return assemble(hamiltonian(p, space), jump_channels(p, space));
}

Operator coupled_hamiltonian(const CoupledParams& p, const FockSpace& space_a, const FockSpace& space_b)
{
    const std::vector<int> dims{space_a.dimension(), space_b.dimension()};
    Operator h = embed(hamiltonian(p.osc_a, space_a), 0, dims) + embed(hamiltonian(p.osc_b, space_b), 1, dims);
    if (p.coupling != 0.0) {
        const Operator a_a = embed(annihilation(space_a), 0, dims);
        const Operator a_b = embed(annihilation(space_b), 1, dims);
        const Operator hop = a_a.adjoint() * a_b;
        h += cplx(p.coupling) * (hop + hop.adjoint());
    }
    return h;
}

std::vector<JumpChannel> coupled_jump_channels(const CoupledParams& p, const FockSpace& space_a,
                                               const FockSpace& space_b)
{
    const std::vector<int> dims{space_a.dimension(), space_b.dimension()};
    std::vector<JumpChannel> out;
    for (auto& c : jump_channels(p.osc_a, space_a)) {
        out.push_back({c.rate, embed(c.op, 0, dims)});
    }
    for (auto& c : jump_channels(p.osc_b, space_b)) {
        out.push_back({c.rate, embed(c.op, 1, dims)});
    }
    return out;
}

Liouvillian build_coupled(const CoupledParams& p, const FockSpace& space_a, const FockSpace& space_b)
{
    p.validate();
    return assemble(coupled_hamiltonian(p, space_a, space_b), coupled_jump_channels(p, space_a, space_b));
}

}  // namespace tlc
