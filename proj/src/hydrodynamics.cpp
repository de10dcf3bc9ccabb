#include "ptwa/hydrodynamics.hpp"

#include "ptwa/csv.hpp"
#include "ptwa/parallel.hpp"
#include "ptwa/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace ptwa {

namespace {

constexpr double kDegenerateGamma = 1e-10;

void require_nondegenerate(double gamma1)
{
    if (!(std::abs(gamma1) >= kDegenerateGamma)) {
        throw DegenerateMomentError("gamma1 = " + std::to_string(gamma1)
                                    + " is too small to divide by");
    }
}

// <psi, sin(p theta)>_mu from the k = 0 column.
double sine_projection(const CoeffMatrix& x, const SpectralParams& sp, int p)
{
    const int m = sp.m();
    const double z = 0.5 * sp.model().concentration();
    const auto scaled = bessel_i_scaled_sequence(m + p, z);
    const double norm = 2.0 * std::sqrt(bessel_i_scaled(BesselOrder(0), 2.0 * z));
    Complex sum = 0.0;
    for (int j = -m; j <= m; ++j) {
        const double diff = scaled[static_cast<std::size_t>(std::abs(j - p))]
                            - scaled[static_cast<std::size_t>(std::abs(j + p))];
        sum += x(j, 0) * Complex(0.0, diff / norm);
    }
    return sum.real();
}

} // namespace

GammaMoments gamma_moments(const CoeffMatrix& x, const SpectralParams& sp, std::size_t theta_nodes)
{
    const double h = 2.0 * std::numbers::pi / static_cast<double>(theta_nodes);
    GammaMoments g;
    for (std::size_t i = 0; i < theta_nodes; ++i) {
        const double theta = -std::numbers::pi + h * static_cast<double>(i);
        const double weighted = theta_marginal_weighted(x, sp, theta);
        const double s = std::sin(theta);
        g.gamma1 += s * weighted;
        g.gamma2 += s * std::cos(theta) * weighted;
    }
    g.gamma1 *= h;
    g.gamma2 *= h;
    require_nondegenerate(g.gamma1);
    return g;
}

GammaMoments gamma_moments_projection(const CoeffMatrix& x, const SpectralParams& sp)
{
    GammaMoments g{sine_projection(x, sp, 1), 0.5 * sine_projection(x, sp, 2)};
    require_nondegenerate(g.gamma1);
    return g;
}

double c2_coefficient(const CoeffMatrix& x, const SpectralParams& sp)
{
    const GammaMoments g = gamma_moments(x, sp);
    return g.gamma2 / g.gamma1;
}

HydroCoeffs::HydroCoeffs(double c1, double c2, double d, double gamma1, double gamma2)
    : c1_(c1)
    , c2_(c2)
    , d_(d)
    , gamma1_(gamma1)
    , gamma2_(gamma2)
{
    if (!(c1 > 0.0 && c1 < 1.0)) {
        throw std::invalid_argument("HydroCoeffs: c1 must lie in (0, 1)");
    }
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw std::invalid_argument("HydroCoeffs: d must be positive");
    }
    require_nondegenerate(gamma1);
    if (!std::isfinite(c2) || std::abs(c2 - gamma2 / gamma1) > 1e-12 * std::max(1.0, std::abs(c2))) {
        throw std::invalid_argument("HydroCoeffs: c2 must equal gamma2 / gamma1");
    }
}

HydroCoeffs HydroCoeffs::from_solution(const CoeffMatrix& x, const SpectralParams& sp)
{
    const ModelParams& p = sp.model();
    const GammaMoments g = gamma_moments(x, sp);
    const double d = p.alpha() * p.alpha() / (p.lambda() * p.lambda());
    return {c1_coefficient(p), g.gamma2 / g.gamma1, d, g.gamma1, g.gamma2};
}

double speed_discriminant(const HydroCoeffs& h, double theta)
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double diff = h.c1() - h.c2();
    return diff * diff * c * c + 4.0 * h.c1() * h.d() * s * s;
}

CharacteristicSpeeds characteristic_speeds(const HydroCoeffs& h, double theta)
{
    const double disc = speed_discriminant(h, theta);
    if (!(disc >= 0.0)) {
        throw std::logic_error("characteristic_speeds: negative discriminant");
    }
    const double mean = 0.5 * (h.c1() + h.c2()) * std::cos(theta);
    const double half_root = 0.5 * std::sqrt(disc);
    return {mean - half_root, mean + half_root};
}

bool hyperbolicity_check(const HydroCoeffs& h, std::size_t theta_samples)
{
    if (theta_samples < 8) {
        throw std::invalid_argument("hyperbolicity_check: need at least 8 samples");
    }
    const double step = 2.0 * std::numbers::pi / static_cast<double>(theta_samples);
    for (std::size_t i = 0; i < theta_samples; ++i) {
        if (!(speed_discriminant(h, -std::numbers::pi + step * static_cast<double>(i)) >= 0.0)) {
            return false;
        }
    }
    return true;
}

std::vector<SweepRow> sweep_coefficients(const std::vector<std::pair<double, double>>& params,
                                         int m, int n)
{
    std::vector<SweepRow> rows(params.size());
    parallel_for(params.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            SweepRow& row = rows[r];
            row.lambda = params[r].first;
            row.alpha = params[r].second;
            constexpr double nan = std::numeric_limits<double>::quiet_NaN();
            row.c1 = row.c2 = row.gamma1 = row.gamma2 = row.d = nan;
            try {
                const SpectralParams sp(m, n, ModelParams(row.lambda, row.alpha));
                row.c1 = c1_coefficient(sp.model());
                row.d = row.alpha * row.alpha / (row.lambda * row.lambda);
                const GciSolution sol = solve_gci(sp);
                const GammaMoments g = gamma_moments(sol.coeffs, sp);
                row.gamma1 = g.gamma1;
                row.gamma2 = g.gamma2;
                row.c2 = g.gamma2 / g.gamma1;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    });
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::string& comment)
{
    if (!comment.empty()) {
        out << "# " << comment << '\n';
    }
    out << "lambda,alpha,c1,c2,gamma1,gamma2,d\n";
    for (const SweepRow& r : rows) {
        out << format_double(r.lambda) << ',' << format_double(r.alpha) << ',' << format_double(r.c1)
            << ',' << format_double(r.c2) << ',' << format_double(r.gamma1) << ','
            << format_double(r.gamma2) << ',' << format_double(r.d) << '\n';
    }
}

} // namespace ptwa
