#pragma once

// Fock-space operators on a truncated oscillator basis {|0>, ..., |N>} and
// tensor products of such spaces.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace tlc {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Sector { in, out };

const char* to_string(Sector s);

/// Truncated single-oscillator Fock space. The sector boundary n_c splits the
/// basis into an inner (n <= n_c) and an outer (n > n_c) part.
class FockSpace {
public:
    explicit FockSpace(int cutoff, std::optional<int> sector_boundary = std::nullopt);

    int cutoff() const { return cutoff_; }
    int dimension() const { return cutoff_ + 1; }
    bool has_sector_boundary() const { return sector_boundary_.has_value(); }
    std::optional<int> sector_boundary() const { return sector_boundary_; }

    /// Throws ConfigurationError when the boundary was never set.
    int require_sector_boundary() const;

    FockSpace with_sector_boundary(int n_c) const { return FockSpace(cutoff_, n_c); }

private:
    int cutoff_;
    std::optional<int> sector_boundary_;
};

/// Complex matrix on a (tensor product of) truncated Fock space(s).
/// `dims` lists subsystem dimensions, first factor is the slowest index.
struct Operator {
    std::vector<int> dims;
    SparseMatrix mat;

    Operator() = default;
    Operator(std::vector<int> dims, SparseMatrix mat);

    int dimension() const { return static_cast<int>(mat.rows()); }
    Operator adjoint() const;
    DenseMatrix dense() const { return DenseMatrix(mat); }

    Operator& operator+=(const Operator& rhs);
    Operator& operator-=(const Operator& rhs);
    Operator& operator*=(cplx s);
};

Operator operator+(Operator lhs, const Operator& rhs);
Operator operator-(Operator lhs, const Operator& rhs);
Operator operator*(const Operator& lhs, const Operator& rhs);
Operator operator*(cplx s, Operator op);

Operator identity(const std::vector<int>& dims);
Operator zero_operator(const std::vector<int>& dims);

Operator annihilation(const FockSpace& space);
Operator creation(const FockSpace& space);
Operator number(const FockSpace& space);

/// Integer power of a square operator; power 0 gives the identity.
Operator power(const Operator& op, int k);

/// Unweighted lowering restricted to one sector:
/// in  -> sum_{n=0}^{n_c-1} |n><n+1|,  out -> sum_{n=n_c}^{N-1} |n><n+1|.
Operator truncated_lowering(const FockSpace& space, Sector sector);

/// Same index ranges as truncated_lowering but with the ladder weight sqrt(n+1).
Operator weighted_truncated_annihilation(const FockSpace& space, Sector sector);

/// Projector onto a sector: in -> n in [0, n_c], out -> n in [n_c+1, N].
/// Note the inner projector includes n_c while the inner lowering stops at n_c-1.
Operator sector_identity(const FockSpace& space, Sector sector);

/// Kronecker product with concatenated dims.
Operator tensor(const Operator& a, const Operator& b);

/// Lift a single-oscillator operator into slot `which` of a two-oscillator space.
Operator embed(const Operator& op, int which, const std::vector<int>& dims);

}  // namespace tlc
