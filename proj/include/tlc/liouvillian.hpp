#pragma once

// Master-equation generators for one driven twin-limit-cycle oscillator and
// for two coherently coupled oscillators. All rates are in units of the
// first-order gain rate of oscillator A.

#include <array>
#include <vector>

#include "tlc/fock.hpp"

namespace tlc {

struct OscillatorParams {
    double delta = 0.0;  ///< detuning from the drive
    double kerr = 0.0;   ///< K in K a^dag^2 a^2
    cplx drive = 0.0;    ///< Omega; the locked phase is arg(Omega) - pi/2
    /// gamma[0..3] multiply D[a^dag], D[a^2], D[a^dag^3], D[a^4].
    std::array<double, 4> gamma{1.0, 0.0, 0.0, 0.0};

    /// Throws ParameterError on negative rates.
    void validate() const;
    bool has_dissipation() const;
};

struct CoupledParams {
    OscillatorParams osc_a;
    OscillatorParams osc_b;
    double coupling = 0.0;  ///< g in g a_A^dag a_B + h.c.

    /// Relative detuning delta = Delta_B - Delta_A.
    double relative_detuning() const { return osc_b.delta - osc_a.delta; }
    void validate() const;
};

/// Lindblad channel rate * D[op].
struct JumpChannel {
    double rate;
    Operator op;
};

/// Sparse generator acting on column-stacked density matrices,
/// vec(rho)[i + d*j] = rho(i, j).
struct Liouvillian {
    std::vector<int> dims;
    SparseMatrix matrix;

    int hilbert_dim() const;
    /// L(rho) for a dense d x d matrix.
    DenseMatrix apply(const DenseMatrix& rho) const;
};

Vector vectorize(const DenseMatrix& rho);
DenseMatrix unvectorize(const Vector& v, int dim);

/// Delta a^dag a + K a^dag^2 a^2 + Omega a^dag + conj(Omega) a.
Operator hamiltonian(const OscillatorParams& p, const FockSpace& space);

/// The four incoherent channels a^dag, a^2, a^dag^3, a^4 with their rates.
/// Channels with zero rate are kept so indices match the gamma array.
std::vector<JumpChannel> jump_channels(const OscillatorParams& p, const FockSpace& space);

/// -i[H, .] as a superoperator.
SparseMatrix commutator_superop(const Operator& h);

/// rate * D[L] as a superoperator. Throws ParameterError for negative rates.
Liouvillian dissipator_superop(const Operator& jump, double rate);

Liouvillian build_single(const OscillatorParams& p, const FockSpace& space);

/// -i[g a_A^dag a_B + h.c., .] + L_A (x) 1 + 1 (x) L_B.
Liouvillian build_coupled(const CoupledParams& p, const FockSpace& space_a, const FockSpace& space_b);

/// Hamiltonian and channels of the coupled system, in the joint space.
Operator coupled_hamiltonian(const CoupledParams& p, const FockSpace& space_a, const FockSpace& space_b);
std::vector<JumpChannel> coupled_jump_channels(const CoupledParams& p, const FockSpace& space_a,
                                               const FockSpace& space_b);

/// Assemble -i[H, .] + sum_j rate_j D[L_j].
Liouvillian assemble(const Operator& h, const std::vector<JumpChannel>& channels);

}  // namespace tlc
