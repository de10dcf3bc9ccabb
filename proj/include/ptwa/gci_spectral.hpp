#ifndef PTWA_GCI_SPECTRAL_HPP
#define PTWA_GCI_SPECTRAL_HPP

#include "ptwa/equilibrium.hpp"
#include "ptwa/kinetic_grid.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace ptwa {

using Complex = std::complex<double>;

class SingularSystemError : public std::runtime_error
{
public:
    SingularSystemError(const std::string& what, double condition)
        : std::runtime_error(what)
        , condition_(condition)
    {
    }

    double condition_estimate() const noexcept { return condition_; }

private:
    double condition_;
};

/// Raised when a reconstructed value carries a non-negligible imaginary part.
class RealityViolation : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Galerkin space V_{m,n}: Fourier modes |j| <= m, Hermite degrees
/// 0..n.
class SpectralParams
{
public:
    SpectralParams(int m, int n, ModelParams model);

    int m() const noexcept { return m_; }
    int n() const noexcept { return n_; }
    const ModelParams& model() const noexcept { return model_; }

    Eigen::Index fourier_size() const noexcept { return 2 * m_ + 1; }
    Eigen::Index hermite_size() const noexcept { return n_ + 1; }
    Eigen::Index unknowns() const noexcept { return fourier_size() * hermite_size(); }

    /// Column-major position of coefficient (j, k) in vec(X).
    Eigen::Index flat_index(int j, int k) const noexcept
    {
        return (j + m_) + fourier_size() * k;
    }

private:
    int m_;
    int n_;
    ModelParams model_;
};

/// Coefficients C_j^k of psi in the basis phi_j P_k; row j = -m..m in
/// increasing order, column k = 0..n.
class CoeffMatrix
{
public:
    CoeffMatrix(int m, int n, Eigen::MatrixXcd entries);

    int m() const noexcept { return m_; }
    int n() const noexcept { return n_; }
    const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
    Complex operator()(int j, int k) const { return entries_(j + m_, k); }

    /// max |C_{-j}^k - conj(C_j^k)| (psi real).
    double reality_defect() const;
    /// max |C_{-j}^k + (-1)^k C_j^k| (psi(-theta,-kappa) = -psi(theta,kappa)).
    double parity_defect() const;

    /// Columns j, k, re, im.
    void write_csv(std::ostream& out, const std::string& comment = {}) const;

private:
    int m_;
    int n_;
    Eigen::MatrixXcd entries_;
};

enum class ShiftDirection { Sub, Super };

/// 0/1 matrix with ones on the sub-diagonal (L_{-1}) or super-diagonal (L_{+1}).
Eigen::MatrixXd assemble_shift(Eigen::Index size, ShiftDirection direction);

/// Factors of beta1 M1 X N1 + beta2 M2 X N2 - lambda X D2 = B.
struct SystemMatrices
{
    Eigen::MatrixXcd M1;
    Eigen::MatrixXcd M2;
    Eigen::MatrixXcd N1;
    Eigen::MatrixXcd N2;
    Eigen::MatrixXcd D2;
    Complex beta1;
    Complex beta2;
};

SystemMatrices assemble_system(const SpectralParams& sp);

/// Coefficients of -sin(theta); only column k = 0 is non-zero.
Eigen::MatrixXcd assemble_rhs(const SpectralParams& sp);

/// beta1 (N1^T kron M1) + beta2 (N2^T kron M2) - lambda (D2 kron I), acting on
/// the column-major vec(X).
Eigen::MatrixXcd kronecker_operator(const SpectralParams& sp);

/// The same operator scattered basis function by basis function from the
/// 3x3 stencil expressing L(phi_j P_k) in neighbouring modes.
Eigen::MatrixXcd stencil_galerkin_matrix(const SpectralParams& sp);

/// Left-hand side of the matrix equation evaluated for a given X.
Eigen::MatrixXcd apply_matrix_operator(const SystemMatrices& sys, double lambda,
                                       const Eigen::MatrixXcd& x);

enum class SolveMethod
{
    PartialPivotLU,  ///< square system was well conditioned
    BorderedMinNorm, ///< kernel deflated by bordering with its null vectors
    CompleteOrthogonal, ///< generic rank-revealing least squares
};

std::string to_string(SolveMethod method);

struct GciSolution
{
    CoeffMatrix coeffs;
    double algebraic_residual = 0.0; ///< ||A vec(X) - vec(B)|| / ||vec(B)||
    double condition_estimate = 0.0; ///< 1 / rcond of the factored matrix
    SolveMethod method = SolveMethod::PartialPivotLU;
};

/// Solves the Galerkin system for the generalized collisional invariant.
///
/// The truncated operator is singular: its restriction to the k = 0 column
/// maps into k = 1 through beta1 D1 - beta2 M2, an odd-sized matrix that
/// anticommutes with the reflection j -> -j. When that kernel is present the
/// system is bordered with the right and left null vectors, which yields the
/// minimum-norm least-squares solution; the result is then projected onto
/// <psi>_mu = 0. Throws SingularSystemError when the algebraic residual
/// exceeds 1e-10.
GciSolution solve_gci(const SpectralParams& sp);

/// <1, phi_j>_mu for j = -m..m, the Galerkin image of the constant function.
Eigen::VectorXd constant_coefficients(const SpectralParams& sp);

/// 1 / sqrt(2 pi M(theta)) without overflow for concentrated M.
double inverse_sqrt_density(const ModelParams& params, double theta);

/// psi_{m,n}(theta, kappa). Throws RealityViolation when
/// |Im| > 1e-8 (|Re| + 1).
double reconstruct_psi(const CoeffMatrix& x, const SpectralParams& sp, double theta, double kappa);

/// psi_{m,n} sampled on every node of `grid` (one matrix product).
GridField reconstruct_on_grid(const CoeffMatrix& x, const SpectralParams& sp, const Grid2D& grid);

/// Kappa-average of psi against N: sum_j C_j^0 phi_j(theta).
double theta_marginal(const CoeffMatrix& x, const SpectralParams& sp, double theta);

/// theta_marginal(theta) * M(theta), stable for concentrated M.
double theta_marginal_weighted(const CoeffMatrix& x, const SpectralParams& sp, double theta);

} // namespace ptwa

#endif // PTWA_GCI_SPECTRAL_HPP
