#include "ptwa/gci_spectral.hpp"
#include "ptwa/special_functions.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace ptwa;

namespace {

constexpr double pi = std::numbers::pi;

// <L(phi_j P_k), phi_j' P_k'>_mu and <-sin, phi_j' P_k'>_mu by brute-force
// quadrature, with L applied through analytic derivatives of the basis.
struct QuadratureGalerkin
{
    Eigen::MatrixXcd matrix;
    Eigen::MatrixXcd rhs;
};

QuadratureGalerkin quadrature_galerkin(const SpectralParams& sp)
{
    const ModelParams& p = sp.model();
    const double lambda = p.lambda();
    const double alpha = p.alpha();
    const double z = p.concentration();
    const double c0 = 1.0 / (2.0 * pi * std::cyl_bessel_i(0.0, z));
    const double sigma = alpha / std::sqrt(lambda);
    const int m = sp.m();
    const int n = sp.n();
    const int nt = 128;
    const int nk = 961;
    const double cut = 12.0 * sigma;
    const double hk = 2.0 * cut / (nk - 1);
    const double ht = 2.0 * pi / nt;
    const Eigen::Index size = sp.unknowns();

    QuadratureGalerkin out{Eigen::MatrixXcd::Zero(size, size), Eigen::MatrixXcd::Zero(2 * m + 1, n + 1)};
    for (int it = 0; it < nt; ++it) {
        const double t = -pi + ht * it;
        const double mvm = c0 * std::exp(z * std::cos(t));
        const double s = 1.0 / std::sqrt(2.0 * pi * mvm);
        for (int ik = 0; ik < nk; ++ik) {
            const double kap = -cut + hk * ik;
            const double wk = (ik == 0 || ik == nk - 1) ? 0.5 : 1.0;
            const double gauss = std::exp(-0.5 * kap * kap / (sigma * sigma)) / (std::sqrt(2.0 * pi) * sigma);
            const double w = ht * hk * wk * mvm * gauss;
            std::vector<double> herm(static_cast<std::size_t>(n + 1));
            for (int k = 0; k <= n; ++k) {
                herm[static_cast<std::size_t>(k)] = hermite_p(k, lambda, alpha, kap);
            }
            auto P = [&](int k) { return k < 0 ? 0.0 : herm[static_cast<std::size_t>(k)]; };
            for (int j = -m; j <= m; ++j) {
                const std::complex<double> phi = s * std::polar(1.0, j * t);
                const std::complex<double> dphi = phi * std::complex<double>(0.5 * z * std::sin(t), j);
                for (int k = 0; k <= n; ++k) {
                    const double dp = std::sqrt(lambda) / alpha * std::sqrt(double(k)) * P(k - 1);
                    const double ddp = lambda / (alpha * alpha) * std::sqrt(double(k) * (k - 1)) * P(k - 2);
                    const std::complex<double> lpsi = kap * P(k) * dphi - lambda * std::sin(t) * phi * dp
                                                      - lambda * kap * phi * dp + alpha * alpha * phi * ddp;
                    const Eigen::Index col = sp.flat_index(j, k);
                    for (int jj = -m; jj <= m; ++jj) {
                        const std::complex<double> test = s * std::polar(1.0, jj * t);
                        for (int kk = 0; kk <= n; ++kk) {
                            out.matrix(sp.flat_index(jj, kk), col) += w * lpsi * std::conj(test * P(kk));
                        }
                    }
                }
            }
            for (int jj = -m; jj <= m; ++jj) {
                const std::complex<double> test = s * std::polar(1.0, jj * t);
                out.rhs(jj + m, 0) += w * (-std::sin(t)) * std::conj(test);
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("SpectralParams validation and indexing")
{
    CHECK_THROWS_AS(SpectralParams(0, 3, ModelParams(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(SpectralParams(3, 0, ModelParams(1, 1)), std::invalid_argument);
    const SpectralParams sp(3, 4, ModelParams(1, 1));
    CHECK(sp.unknowns() == 35);
    CHECK(sp.flat_index(-3, 0) == 0);
    CHECK(sp.flat_index(3, 0) == 6);
    CHECK(sp.flat_index(-3, 1) == 7);
}

TEST_CASE("assemble_shift")
{
    CHECK(assemble_shift(1, ShiftDirection::Sub)(0, 0) == 0.0);
    const Eigen::MatrixXd sub = assemble_shift(3, ShiftDirection::Sub);
    Eigen::MatrixXd expected(3, 3);
    expected << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    CHECK(sub == expected);
    CHECK(assemble_shift(3, ShiftDirection::Super) == expected.transpose());
}

TEST_CASE("assemble_system coefficients")
{
    const SystemMatrices a = assemble_system(SpectralParams(1, 2, ModelParams(1, 1)));
    CHECK(std::abs(a.beta1 - std::complex<double>(0, 1)) < 1e-15);
    CHECK(std::abs(a.beta2 - std::complex<double>(0, 0.25)) < 1e-15);
    CHECK(a.M1.rows() == 3);
    CHECK(a.M1(0, 0).real() == -1.0);
    CHECK(a.M1(1, 1).real() == 0.0);
    CHECK(a.M1(2, 2).real() == 1.0);
    CHECK(a.N1.rows() == 3);
    const SystemMatrices b = assemble_system(SpectralParams(1, 2, ModelParams(4, 1)));
    CHECK(std::abs(b.beta1 - std::complex<double>(0, 0.5)) < 1e-15);
    CHECK(std::abs(b.beta2 - std::complex<double>(0, 2)) < 1e-15);
}

TEST_CASE("assemble_rhs")
{
    const SpectralParams sp(5, 3, ModelParams(1, 1));
    const Eigen::MatrixXcd b = assemble_rhs(sp);
    CHECK(std::abs(b(5, 0)) < 1e-16);
    const double oracle = (std::cyl_bessel_i(0.0, 0.5) - std::cyl_bessel_i(2.0, 0.5))
                          / (2.0 * std::sqrt(std::cyl_bessel_i(0.0, 1.0)));
    CHECK(std::abs(oracle - 0.458399) < 1e-6);
    CHECK(std::abs(b(6, 0) - std::complex<double>(0, oracle)) < 1e-13);
    for (int j = 1; j <= 5; ++j) {
        CHECK(std::abs(b(5 - j, 0) + b(5 + j, 0)) < 1e-15);
    }
    CHECK(b.rightCols(3).norm() == 0.0);
}

TEST_CASE("stencil assembly equals Kronecker assembly")
{
    for (auto [m, n] : {std::pair{1, 2}, {3, 4}, {5, 6}}) {
        for (auto [l, a] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {3.0, 0.7}}) {
            const SpectralParams sp(m, n, ModelParams(l, a));
            const double diff = (kronecker_operator(sp) - stencil_galerkin_matrix(sp)).cwiseAbs().maxCoeff();
            CAPTURE(m);
            CAPTURE(l);
            CHECK(diff <= 1e-12);
        }
    }
}

TEST_CASE("stencil entries")
{
    const SpectralParams sp(1, 2, ModelParams(2.0, 1.0));
    const Eigen::MatrixXcd a = stencil_galerkin_matrix(sp);
    for (int j = -1; j <= 1; ++j) {
        for (int k = 0; k <= 2; ++k) {
            const Eigen::Index i = sp.flat_index(j, k);
            CHECK(std::abs(a(i, i) - std::complex<double>(-2.0 * k, 0)) < 1e-15);
        }
    }
    // phi_1 P_0 reaches phi_1 P_1 through beta1 and phi_0, phi_2 P_1 through beta2.
    const SystemMatrices sys = assemble_system(sp);
    const Eigen::Index col = sp.flat_index(1, 0);
    CHECK(std::abs(a(sp.flat_index(1, 1), col) - sys.beta1) < 1e-15);
    CHECK(std::abs(a(sp.flat_index(0, 1), col) - sys.beta2) < 1e-15);
    CHECK(std::abs(a(sp.flat_index(1, 0), col)) == 0.0);
}

TEST_CASE("Galerkin matrix and right-hand side against brute-force quadrature")
{
    for (auto [l, a] : {std::pair{1.0, 1.0}, {2.0, 0.8}}) {
        const SpectralParams sp(3, 4, ModelParams(l, a));
        const QuadratureGalerkin q = quadrature_galerkin(sp);
        CAPTURE(l);
        CHECK((q.matrix - kronecker_operator(sp)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((q.rhs - assemble_rhs(sp)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("the truncated operator is singular")
{
    const SpectralParams sp(3, 4, ModelParams(1, 1));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(kronecker_operator(sp));
    const auto& s = svd.singularValues();
    CHECK(s(s.size() - 1) / s(0) < 1e-13);
    CHECK(s(s.size() - 2) / s(0) > 1e-6);
}

TEST_CASE("solve_gci on a small system")
{
    for (auto [l, a] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {2.0, 0.5}}) {
        const SpectralParams sp(5, 8, ModelParams(l, a));
        const GciSolution sol = solve_gci(sp);
        CAPTURE(l);
        CAPTURE(a);
        CHECK(sol.method == SolveMethod::BorderedMinNorm);
        CHECK(sol.algebraic_residual < 1e-10);
        CHECK(std::isfinite(sol.condition_estimate));
        CHECK(sol.coeffs.reality_defect() < 1e-8);
        CHECK(sol.coeffs.parity_defect() < 1e-8);
        // psi in E: zero mean against mu.
        const Eigen::VectorXd e = constant_coefficients(sp);
        CHECK(std::abs(e.cast<std::complex<double>>().dot(sol.coeffs.entries().col(0))) < 1e-12);
        const double weighted = integrate_periodic(
            [&](double t) { return theta_marginal(sol.coeffs, sp, t) * von_mises_pdf(sp.model(), t); });
        CHECK(std::abs(weighted) < 1e-8);
        // The residual is independent of how the kernel component was chosen.
        const SystemMatrices sys = assemble_system(sp);
        const Eigen::MatrixXcd r = apply_matrix_operator(sys, l, sol.coeffs.entries()) - assemble_rhs(sp);
        CHECK(r.norm() < 1e-10 * assemble_rhs(sp).norm());
    }
}

TEST_CASE("constant_coefficients are the Galerkin image of 1")
{
    const SpectralParams sp(4, 2, ModelParams(1.3, 0.9));
    const Eigen::VectorXd e = constant_coefficients(sp);
    const double z = sp.model().concentration();
    const double c0 = 1.0 / (2.0 * pi * std::cyl_bessel_i(0.0, z));
    for (int j = -4; j <= 4; ++j) {
        // <1, phi_j>_mu = int e^{-ij t} sqrt(M / 2 pi) dt
        const double ref = integrate_periodic([&](double t) {
            return std::cos(j * t) * std::sqrt(c0 * std::exp(z * std::cos(t)) / (2.0 * pi));
        });
        CHECK(e(j + 4) == doctest::Approx(ref).epsilon(1e-12));
    }
    CHECK(e.squaredNorm() < 1.0);
}

TEST_CASE("reconstruction symmetries")
{
    const SpectralParams sp(10, 21, ModelParams(1, 1));
    const GciSolution sol = solve_gci(sp);
    CHECK(std::abs(reconstruct_psi(sol.coeffs, sp, 0.0, 0.0)) < 1e-8);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> t(-pi, pi);
    std::uniform_real_distribution<double> k(-4.0, 4.0);
    for (int i = 0; i < 50; ++i) {
        const double th = t(gen);
        const double ka = k(gen);
        const double a = reconstruct_psi(sol.coeffs, sp, th, ka);
        const double b = reconstruct_psi(sol.coeffs, sp, -th, -ka);
        CHECK(std::abs(a + b) < 1e-8);
    }
    CHECK(std::abs(theta_marginal(sol.coeffs, sp, 0.0)) < 1e-8);
    for (double th : {0.4, 1.7, 3.0}) {
        CHECK(theta_marginal(sol.coeffs, sp, -th) == doctest::Approx(-theta_marginal(sol.coeffs, sp, th)));
        CHECK(theta_marginal_weighted(sol.coeffs, sp, th)
              == doctest::Approx(theta_marginal(sol.coeffs, sp, th) * von_mises_pdf(sp.model(), th)));
    }
}

TEST_CASE("grid reconstruction matches pointwise reconstruction")
{
    const SpectralParams sp(5, 8, ModelParams(1, 1));
    const GciSolution sol = solve_gci(sp);
    const Grid2D g(16, -3, 3, 7);
    const GridField f = reconstruct_on_grid(sol.coeffs, sp, g);
    for (std::size_t i = 0; i < g.n_theta(); ++i) {
        for (std::size_t k = 0; k < g.n_kappa(); ++k) {
            CHECK(f(i, k) == doctest::Approx(reconstruct_psi(sol.coeffs, sp, g.theta(i), g.kappa(k))).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("spectral psi nearly solves L psi = -sin on the grid")
{
    const SpectralParams sp(10, 21, ModelParams(1, 1));
    const GciSolution sol = solve_gci(sp);
    const double r = residual_inf(reconstruct_on_grid(sol.coeffs, sp, Grid2D::with_spacing(0.2)), sp.model());
    CAPTURE(r);
    CHECK(r < 0.1);
}

TEST_CASE("RealityViolation on coefficients without symmetry")
{
    const SpectralParams sp(1, 1, ModelParams(1, 1));
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(3, 2);
    x(2, 0) = 1.0; // C_1^0 real with no partner: psi picks up i sin(theta)
    const CoeffMatrix c(1, 1, x);
    CHECK(c.reality_defect() > 0.5);
    CHECK_THROWS_AS(reconstruct_psi(c, sp, 1.0, 0.0), RealityViolation);
    CHECK_THROWS_AS(CoeffMatrix(1, 1, Eigen::MatrixXcd::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("CoeffMatrix CSV")
{
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(3, 2);
    x(0, 1) = std::complex<double>(0.5, -0.25);
    std::ostringstream out;
    CoeffMatrix(1, 1, x).write_csv(out, "c");
    const std::string s = out.str();
    CHECK(s.rfind("# c\nj,k,re,im\n", 0) == 0);
    CHECK(s.find("-1,1,0.5,-0.25\n") != std::string::npos);
}
