#include "ptwa/gci_spectral.hpp"

#include "ptwa/csv.hpp"
#include "ptwa/special_functions.hpp"

#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <numbers>
#include <ostream>

namespace ptwa {

namespace {

using SparseC = Eigen::SparseMatrix<Complex>;

constexpr double kSingularRcond = 1e-12;
constexpr double kResidualBound = 1e-10;
constexpr double kRealityBound = 1e-8;

SparseC kronecker_sparse(const SpectralParams& sp)
{
    const SystemMatrices sys = assemble_system(sp);
    const SparseC n1t = sys.N1.transpose().sparseView();
    const SparseC n2t = sys.N2.transpose().sparseView();
    const SparseC d2 = sys.D2.sparseView();
    const SparseC m1 = sys.M1.sparseView();
    const SparseC m2 = sys.M2.sparseView();
    SparseC id(sp.fourier_size(), sp.fourier_size());
    id.setIdentity();

    SparseC t1 = Eigen::kroneckerProduct(n1t, m1);
    SparseC t2 = Eigen::kroneckerProduct(n2t, m2);
    SparseC t3 = Eigen::kroneckerProduct(d2, id);
    SparseC a = sys.beta1 * t1 + sys.beta2 * t2 - Complex(sp.model().lambda()) * t3;
    a.makeCompressed();
    return a;
}

// Right singular vector of the smallest singular value, with sigma_min/sigma_max.
std::pair<Eigen::VectorXcd, double> smallest_singular_vector(const Eigen::MatrixXcd& t)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const Eigen::Index last = s.size() - 1;
    const double ratio = s(0) > 0.0 ? s(last) / s(0) : 0.0;
    return {svd.matrixV().col(last), ratio};
}

bool usable(double rcond)
{
    return std::isfinite(rcond) && rcond >= kSingularRcond;
}

Eigen::VectorXcd solve_complete_orthogonal(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b,
                                           double& condition)
{
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
    cod.setThreshold(kSingularRcond);
    cod.compute(a);
    const auto rank = cod.rank();
    const auto& qr = cod.matrixQTZ();
    condition = rank > 0 ? std::abs(qr(0, 0)) / std::abs(qr(rank - 1, rank - 1))
                         : std::numeric_limits<double>::infinity();
    return cod.solve(b);
}

double sqrt_density_over_two_pi(const ModelParams& params, double theta)
{
    // sqrt(M / (2 pi)) = exp(Z (cos - 1) / 2) / (2 pi sqrt(I0~(Z))).
    const double z = params.concentration();
    return std::exp(0.5 * z * (std::cos(theta) - 1.0))
           / (2.0 * std::numbers::pi * std::sqrt(bessel_i_scaled(BesselOrder(0), z)));
}

double checked_real(Complex value, const char* where)
{
    if (std::abs(value.imag()) > kRealityBound * (std::abs(value.real()) + 1.0)) {
        throw RealityViolation(std::string(where) + ": imaginary residue "
                               + std::to_string(value.imag()) + " exceeds bound");
    }
    return value.real();
}

} // namespace

Eigen::MatrixXd assemble_shift(Eigen::Index size, ShiftDirection direction)
{
    if (size < 1) {
        throw std::invalid_argument("assemble_shift: size must be positive");
    }
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index i = 0; i + 1 < size; ++i) {
        if (direction == ShiftDirection::Sub) {
            s(i + 1, i) = 1.0;
        } else {
            s(i, i + 1) = 1.0;
        }
    }
    return s;
}

SpectralParams::SpectralParams(int m, int n, ModelParams model)
    : m_(m)
    , n_(n)
    , model_(model)
{
    if (m < 1) {
        throw std::invalid_argument("SpectralParams: m must be a positive integer");
    }
    if (n < 1) {
        throw std::invalid_argument("SpectralParams: n must be a positive integer");
    }
}

CoeffMatrix::CoeffMatrix(int m, int n, Eigen::MatrixXcd entries)
    : m_(m)
    , n_(n)
    , entries_(std::move(entries))
{
    if (entries_.rows() != 2 * m + 1 || entries_.cols() != n + 1) {
        throw std::invalid_argument("CoeffMatrix: shape must be (2m+1) x (n+1)");
    }
}

double CoeffMatrix::reality_defect() const
{
    double worst = 0.0;
    for (int j = -m_; j <= m_; ++j) {
        for (int k = 0; k <= n_; ++k) {
            worst = std::max(worst, std::abs((*this)(-j, k) - std::conj((*this)(j, k))));
        }
    }
    return worst;
}

double CoeffMatrix::parity_defect() const
{
    double worst = 0.0;
    for (int j = -m_; j <= m_; ++j) {
        for (int k = 0; k <= n_; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            worst = std::max(worst, std::abs((*this)(-j, k) + sign * (*this)(j, k)));
        }
    }
    return worst;
}

void CoeffMatrix::write_csv(std::ostream& out, const std::string& comment) const
{
    if (!comment.empty()) {
        out << "# " << comment << '\n';
    }
    out << "j,k,re,im\n";
    for (int j = -m_; j <= m_; ++j) {
        for (int k = 0; k <= n_; ++k) {
            const Complex c = (*this)(j, k);
            out << j << ',' << k << ',' << format_double(c.real()) << ','
                << format_double(c.imag()) << '\n';
        }
    }
}

SystemMatrices assemble_system(const SpectralParams& sp)
{
    const double lambda = sp.model().lambda();
    const double alpha = sp.model().alpha();
    const Eigen::Index fm = sp.fourier_size();
    const Eigen::Index hn = sp.hermite_size();

    SystemMatrices sys;
    sys.beta1 = Complex(0.0, alpha / std::sqrt(lambda));
    sys.beta2 = Complex(0.0, lambda * std::sqrt(lambda) / (4.0 * alpha));

    sys.M1 = Eigen::MatrixXcd::Zero(fm, fm);
    for (Eigen::Index r = 0; r < fm; ++r) {
        sys.M1(r, r) = static_cast<double>(r - sp.m());
    }
    sys.M2 = (assemble_shift(fm, ShiftDirection::Sub) - assemble_shift(fm, ShiftDirection::Super)).cast<Complex>();

    Eigen::MatrixXcd sqrt_d2 = Eigen::MatrixXcd::Zero(hn, hn);
    sys.D2 = Eigen::MatrixXcd::Zero(hn, hn);
    for (Eigen::Index k = 0; k < hn; ++k) {
        sys.D2(k, k) = static_cast<double>(k);
        sqrt_d2(k, k) = std::sqrt(static_cast<double>(k));
    }
    const Eigen::MatrixXcd lower = assemble_shift(hn, ShiftDirection::Sub).cast<Complex>();
    const Eigen::MatrixXcd upper = assemble_shift(hn, ShiftDirection::Super).cast<Complex>();
    sys.N1 = sqrt_d2 * lower + upper * sqrt_d2;
    sys.N2 = sqrt_d2 * lower - upper * sqrt_d2;
    return sys;
}

Eigen::MatrixXcd assemble_rhs(const SpectralParams& sp)
{
    const int m = sp.m();
    const double z = 0.5 * sp.model().concentration();
    const auto scaled = bessel_i_scaled_sequence(m + 1, z);
    const double norm = 2.0 * std::sqrt(bessel_i_scaled(BesselOrder(0), 2.0 * z));

    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(sp.fourier_size(), sp.hermite_size());
    for (int j = -m; j <= m; ++j) {
        const double diff = scaled[static_cast<std::size_t>(std::abs(j - 1))]
                            - scaled[static_cast<std::size_t>(std::abs(j + 1))];
        b(j + m, 0) = Complex(0.0, diff / norm);
    }
    return b;
}

Eigen::MatrixXcd kronecker_operator(const SpectralParams& sp)
{
    return Eigen::MatrixXcd(kronecker_sparse(sp));
}

Eigen::MatrixXcd stencil_galerkin_matrix(const SpectralParams& sp)
{
    const SystemMatrices sys = assemble_system(sp);
    const Complex b1 = sys.beta1;
    const Complex b2 = sys.beta2;
    const double lambda = sp.model().lambda();
    const int m = sp.m();
    const int n = sp.n();

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(sp.unknowns(), sp.unknowns());
    for (int j = -m; j <= m; ++j) {
        for (int k = 0; k <= n; ++k) {
            const double rk = std::sqrt(static_cast<double>(k));
            const double rk1 = std::sqrt(static_cast<double>(k + 1));
            // stencil(dj + 1, dk + 1): coefficient of phi_{j+dj} P_{k+dk} in L(phi_j P_k)
            const Complex stencil[3][3] = {
                {-b2 * rk, 0.0, b2 * rk1},
                {b1 * double(j) * rk, -lambda * k, b1 * double(j) * rk1},
                {b2 * rk, 0.0, -b2 * rk1},
            };
            const Eigen::Index col = sp.flat_index(j, k);
            for (int dj = -1; dj <= 1; ++dj) {
                for (int dk = -1; dk <= 1; ++dk) {
                    const int tj = j + dj;
                    const int tk = k + dk;
                    if (std::abs(tj) > m || tk < 0 || tk > n) {
                        continue;
                    }
                    a(sp.flat_index(tj, tk), col) += stencil[dj + 1][dk + 1];
                }
            }
        }
    }
    return a;
}

Eigen::MatrixXcd apply_matrix_operator(const SystemMatrices& sys, double lambda,
                                       const Eigen::MatrixXcd& x)
{
    return sys.beta1 * sys.M1 * x * sys.N1 + sys.beta2 * sys.M2 * x * sys.N2
           - Complex(lambda) * x * sys.D2;
}

std::string to_string(SolveMethod method)
{
    switch (method) {
    case SolveMethod::PartialPivotLU:
        return "partial-pivot-lu";
    case SolveMethod::BorderedMinNorm:
        return "bordered-min-norm";
    case SolveMethod::CompleteOrthogonal:
        return "complete-orthogonal";
    }
    return "unknown";
}

GciSolution solve_gci(const SpectralParams& sp)
{
    const SystemMatrices sys = assemble_system(sp);
    const Eigen::MatrixXcd rhs = assemble_rhs(sp);
    const Eigen::Index unknowns = sp.unknowns();
    const Eigen::Index fm = sp.fourier_size();
    const Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(rhs.data(), unknowns);
    const SparseC a = kronecker_sparse(sp);

    // Column k = 0 couples only to k = 1, through these two blocks.
    const auto [right, right_ratio] = smallest_singular_vector(sys.beta1 * sys.M1 - sys.beta2 * sys.M2);
    const auto [left, left_ratio] =
        smallest_singular_vector((sys.beta1 * sys.M1 + sys.beta2 * sys.M2).adjoint());
    const bool has_kernel = right_ratio < kSingularRcond && left_ratio < kSingularRcond;

    Eigen::VectorXcd x;
    double condition = std::numeric_limits<double>::infinity();
    SolveMethod method = SolveMethod::PartialPivotLU;
    bool solved = false;

    if (has_kernel) {
        // [A w; v^H 0] [x; t] = [b; 0]: A x = b - t w with v^H x = 0, i.e. the
        // minimum-norm least-squares solution when ker A = span(v), ker A^H = span(w).
        Eigen::MatrixXcd bordered = Eigen::MatrixXcd::Zero(unknowns + 1, unknowns + 1);
        bordered.topLeftCorner(unknowns, unknowns) = Eigen::MatrixXcd(a);
        bordered.block(0, unknowns, fm, 1) = left;
        bordered.block(unknowns, 0, 1, fm) = right.adjoint();
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(bordered);
        const double rcond = lu.rcond();
        if (usable(rcond)) {
            Eigen::VectorXcd rhs_bordered = Eigen::VectorXcd::Zero(unknowns + 1);
            rhs_bordered.head(unknowns) = b;
            x = lu.solve(rhs_bordered).head(unknowns);
            condition = 1.0 / rcond;
            method = SolveMethod::BorderedMinNorm;
            solved = true;
        }
    } else {
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu{Eigen::MatrixXcd(a)};
        const double rcond = lu.rcond();
        if (usable(rcond)) {
            x = lu.solve(b);
            condition = 1.0 / rcond;
            solved = true;
        }
    }
    if (!solved) {
        x = solve_complete_orthogonal(Eigen::MatrixXcd(a), b, condition);
        method = SolveMethod::CompleteOrthogonal;
    }

    Eigen::MatrixXcd coeffs = Eigen::Map<const Eigen::MatrixXcd>(x.data(), fm, sp.hermite_size());

    // Projection onto <psi>_mu = 0 along the Galerkin image of the constants.
    const Eigen::VectorXd constants = constant_coefficients(sp);
    const Complex mean = constants.cast<Complex>().dot(coeffs.col(0));
    coeffs.col(0) -= (mean / constants.squaredNorm()) * constants.cast<Complex>();

    const Eigen::MatrixXcd defect = apply_matrix_operator(sys, sp.model().lambda(), coeffs) - rhs;
    const double residual = defect.norm() / rhs.norm();
    if (!(residual <= kResidualBound)) {
        throw SingularSystemError("solve_gci: algebraic residual " + std::to_string(residual)
                                      + " exceeds 1e-10",
                                  condition);
    }
    return {CoeffMatrix(sp.m(), sp.n(), std::move(coeffs)), residual, condition, method};
}

Eigen::VectorXd constant_coefficients(const SpectralParams& sp)
{
    const int m = sp.m();
    const double z = 0.5 * sp.model().concentration();
    const auto scaled = bessel_i_scaled_sequence(m, z);
    const double norm = std::sqrt(bessel_i_scaled(BesselOrder(0), 2.0 * z));
    Eigen::VectorXd e(sp.fourier_size());
    for (int j = -m; j <= m; ++j) {
        e(j + m) = scaled[static_cast<std::size_t>(std::abs(j))] / norm;
    }
    return e;
}

double inverse_sqrt_density(const ModelParams& params, double theta)
{
    const double z = params.concentration();
    return std::sqrt(bessel_i_scaled(BesselOrder(0), z)) * std::exp(0.5 * z * (1.0 - std::cos(theta)));
}

double reconstruct_psi(const CoeffMatrix& x, const SpectralParams& sp, double theta, double kappa)
{
    const ModelParams& p = sp.model();
    const auto hermite = hermite_p_all(sp.n(), p.lambda(), p.alpha(), kappa);
    const Eigen::Map<const Eigen::VectorXd> pk(hermite.data(), sp.hermite_size());
    const Eigen::VectorXcd rows = x.entries() * pk.cast<Complex>();
    Complex sum = 0.0;
    for (int j = -sp.m(); j <= sp.m(); ++j) {
        sum += rows(j + sp.m()) * std::polar(1.0, j * theta);
    }
    return checked_real(sum * inverse_sqrt_density(p, theta), "reconstruct_psi");
}

GridField reconstruct_on_grid(const CoeffMatrix& x, const SpectralParams& sp, const Grid2D& grid)
{
    const ModelParams& p = sp.model();
    const auto nt = static_cast<Eigen::Index>(grid.n_theta());
    const auto nk = static_cast<Eigen::Index>(grid.n_kappa());

    Eigen::MatrixXcd phi(nt, sp.fourier_size());
    for (Eigen::Index i = 0; i < nt; ++i) {
        const double theta = grid.theta(static_cast<std::size_t>(i));
        const double scale = inverse_sqrt_density(p, theta);
        for (int j = -sp.m(); j <= sp.m(); ++j) {
            phi(i, j + sp.m()) = scale * std::polar(1.0, j * theta);
        }
    }
    Eigen::MatrixXd herm(sp.hermite_size(), nk);
    for (Eigen::Index k = 0; k < nk; ++k) {
        const auto values = hermite_p_all(sp.n(), p.lambda(), p.alpha(), grid.kappa(static_cast<std::size_t>(k)));
        herm.col(k) = Eigen::Map<const Eigen::VectorXd>(values.data(), sp.hermite_size());
    }
    const Eigen::MatrixXcd psi = phi * x.entries() * herm.cast<Complex>();

    std::vector<double> values(grid.size());
    for (Eigen::Index i = 0; i < nt; ++i) {
        for (Eigen::Index k = 0; k < nk; ++k) {
            values[grid.index(static_cast<std::size_t>(i), static_cast<std::size_t>(k))] =
                checked_real(psi(i, k), "reconstruct_on_grid");
        }
    }
    return {grid, std::move(values)};
}

double theta_marginal(const CoeffMatrix& x, const SpectralParams& sp, double theta)
{
    Complex sum = 0.0;
    for (int j = -sp.m(); j <= sp.m(); ++j) {
        sum += x(j, 0) * std::polar(1.0, j * theta);
    }
    return checked_real(sum * inverse_sqrt_density(sp.model(), theta), "theta_marginal");
}

double theta_marginal_weighted(const CoeffMatrix& x, const SpectralParams& sp, double theta)
{
    Complex sum = 0.0;
    for (int j = -sp.m(); j <= sp.m(); ++j) {
        sum += x(j, 0) * std::polar(1.0, j * theta);
    }
    return checked_real(sum * sqrt_density_over_two_pi(sp.model(), theta), "theta_marginal_weighted");
}

} // namespace ptwa
