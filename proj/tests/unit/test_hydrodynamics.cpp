#include "ptwa/hydrodynamics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ptwa;

namespace {

constexpr double pi = std::numbers::pi;

HydroCoeffs sample_coeffs()
{
    return HydroCoeffs(0.44639, 0.5 / 2.0, 1.0, 2.0, 0.5);
}

} // namespace

TEST_CASE("quadrature and projection routes for the gamma moments agree")
{
    for (auto [l, a] : {std::pair{1.0, 1.0}, {0.5, 1.5}, {2.0, 0.8}}) {
        const SpectralParams sp(10, 21, ModelParams(l, a));
        const GciSolution sol = solve_gci(sp);
        const GammaMoments q = gamma_moments(sol.coeffs, sp);
        const GammaMoments s = gamma_moments_projection(sol.coeffs, sp);
        CAPTURE(l);
        CAPTURE(a);
        CHECK(std::abs(q.gamma1 - s.gamma1) <= 1e-8 * std::abs(s.gamma1));
        CHECK(std::abs(q.gamma2 - s.gamma2) <= 1e-8 * std::abs(s.gamma2));
        // gamma1 = sum_j C_j^0 B(j, 0) up to the sign of the right-hand side.
        const Eigen::MatrixXcd b = assemble_rhs(sp);
        const std::complex<double> dot = (sol.coeffs.entries().col(0).array() * b.col(0).conjugate().array()).sum();
        CHECK(std::abs(-dot.real() - s.gamma1) <= 1e-10 * std::abs(s.gamma1));
    }
}

TEST_CASE("theta quadrature is converged beyond 256 nodes")
{
    const SpectralParams sp(10, 21, ModelParams(1, 1));
    const GciSolution sol = solve_gci(sp);
    const GammaMoments a = gamma_moments(sol.coeffs, sp, 256);
    const GammaMoments b = gamma_moments(sol.coeffs, sp, 1024);
    CHECK(a.gamma2 / a.gamma1 == doctest::Approx(b.gamma2 / b.gamma1).epsilon(1e-12));
}

TEST_CASE("a field even in theta has vanishing moments")
{
    const SpectralParams sp(3, 2, ModelParams(1, 1));
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(7, 3);
    x(3 + 1, 0) = 0.7;
    x(3 - 1, 0) = 0.7;
    x(3, 0) = 0.2;
    const CoeffMatrix even(3, 2, x);
    CHECK(std::abs(theta_marginal(even, sp, 0.9) - theta_marginal(even, sp, -0.9)) < 1e-12);
    CHECK_THROWS_AS(gamma_moments(even, sp), DegenerateMomentError);
    CHECK_THROWS_AS(gamma_moments_projection(even, sp), DegenerateMomentError);
}

TEST_CASE("c2 at lambda = alpha = 1")
{
    const SpectralParams coarse(20, 41, ModelParams(1, 1));
    const SpectralParams fine(30, 61, ModelParams(1, 1));
    const double c2a = c2_coefficient(solve_gci(coarse).coeffs, coarse);
    const GciSolution sol = solve_gci(fine);
    const double c2b = c2_coefficient(sol.coeffs, fine);
    CHECK(std::abs(c2a - c2b) < 0.01 * std::abs(c2b));
    CHECK(c2b == doctest::Approx(0.18130617).epsilon(1e-6));
    const HydroCoeffs h = HydroCoeffs::from_solution(sol.coeffs, fine);
    CHECK(h.c1() == doctest::Approx(c1_coefficient(ModelParams(1, 1))));
    CHECK(h.c2() == doctest::Approx(c2b));
    CHECK(h.d() == doctest::Approx(1.0));
    CHECK(h.gamma1() != 0.0);
}

TEST_CASE("HydroCoeffs validation")
{
    CHECK_THROWS_AS(HydroCoeffs(0.0, 0.1, 1.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(HydroCoeffs(1.0, 0.1, 1.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(HydroCoeffs(0.5, 0.1, 0.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(HydroCoeffs(0.5, 0.2, 1.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(HydroCoeffs(0.5, 0.0, 1.0, 0.0, 0.0), DegenerateMomentError);
    CHECK_NOTHROW(sample_coeffs());
}

TEST_CASE("characteristic speeds")
{
    const HydroCoeffs h = sample_coeffs();
    const CharacteristicSpeeds s0 = characteristic_speeds(h, 0.0);
    CHECK(s0.slow == doctest::Approx(h.c2()).epsilon(1e-15));
    CHECK(s0.fast == doctest::Approx(h.c1()).epsilon(1e-15));
    const CharacteristicSpeeds s90 = characteristic_speeds(h, pi / 2);
    const double root = std::sqrt(h.c1() * h.d());
    CHECK(s90.fast == doctest::Approx(root));
    CHECK(s90.slow == doctest::Approx(-root));
    const CharacteristicSpeeds s180 = characteristic_speeds(h, pi);
    CHECK(s180.slow == doctest::Approx(-h.c1()));
    CHECK(s180.fast == doctest::Approx(-h.c2()));
    for (double t : {0.3, 1.2, 2.5, -0.8}) {
        const CharacteristicSpeeds a = characteristic_speeds(h, t);
        const CharacteristicSpeeds b = characteristic_speeds(h, t + pi);
        CHECK(b.slow == doctest::Approx(-a.fast));
        CHECK(b.fast == doctest::Approx(-a.slow));
        CHECK(a.slow <= a.fast);
    }
}

TEST_CASE("hyperbolicity")
{
    CHECK(hyperbolicity_check(sample_coeffs(), 64));
    const HydroCoeffs equal(0.3, 0.3, 2.0, 1.0, 0.3);
    CHECK(hyperbolicity_check(equal, 64));
    for (double t : {0.1, 1.0, 2.0}) {
        const CharacteristicSpeeds s = characteristic_speeds(equal, t);
        const double half = std::sqrt(0.3 * 2.0) * std::abs(std::sin(t));
        CHECK(s.fast - s.slow == doctest::Approx(2.0 * half));
    }
    // Negative c2 is allowed; the discriminant stays a sum of squares.
    CHECK(hyperbolicity_check(HydroCoeffs(0.2, -0.5, 0.3, 1.0, -0.5), 64));
    CHECK_THROWS_AS(hyperbolicity_check(sample_coeffs(), 4), std::invalid_argument);
}

TEST_CASE("sweep keeps input order and marks failures")
{
    const std::vector<std::pair<double, double>> pairs{{1.0, 1.2}, {-1.0, 1.0}, {1.0, 0.8}};
    const auto rows = sweep_coefficients(pairs, 5, 8);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].alpha == 1.2);
    CHECK(rows[2].alpha == 0.8);
    CHECK(rows[0].error.empty());
    CHECK_FALSE(rows[1].error.empty());
    CHECK(std::isnan(rows[1].c2));
    CHECK(rows[0].c1 == doctest::Approx(c1_coefficient(ModelParams(1.0, 1.2))));
    CHECK(rows[0].d == doctest::Approx(1.44));
    std::ostringstream out;
    write_sweep_csv(out, rows, "sweep");
    const std::string s = out.str();
    CHECK(s.rfind("# sweep\nlambda,alpha,c1,c2,gamma1,gamma2,d\n", 0) == 0);
    CHECK(s.find("-1,1,nan,nan,nan,nan,nan\n") != std::string::npos);
}

TEST_CASE("c1 column does not depend on the truncation")
{
    const auto a = sweep_coefficients({{1.0, 0.6}}, 3, 4);
    const auto b = sweep_coefficients({{1.0, 0.6}}, 9, 12);
    CHECK(a[0].c1 == b[0].c1);
}
