#include "ptwa/equilibrium.hpp"

#include "ptwa/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ptwa {

namespace {

bool positive_finite(double v)
{
    return std::isfinite(v) && v > 0.0;
}

} // namespace

ModelParams::ModelParams(double lambda, double alpha)
    : lambda_(lambda)
    , alpha_(alpha)
{
    if (!positive_finite(lambda) || !positive_finite(alpha)) {
        throw std::invalid_argument("ModelParams: lambda and alpha must be positive");
    }
}

double ModelParams::kappa_cutoff() const noexcept
{
    return 12.0 * alpha_ / std::sqrt(lambda_);
}

ModelParams nondimensionalize(const DimensionalParams& p)
{
    if (!positive_finite(p.a) || !positive_finite(p.b) || !positive_finite(p.c)
        || !positive_finite(p.upsilon)) {
        throw std::domain_error("nondimensionalize: all dimensional parameters must be positive");
    }
    const double lambda = p.a / (p.c * p.upsilon);
    const double alpha = std::sqrt(p.b * p.b / (2.0 * p.c * std::pow(p.upsilon, 3)));
    return {lambda, alpha};
}

Equilibrium::Equilibrium(double rho, double theta_bar)
    : rho_(rho)
    , theta_bar_(wrap_angle(theta_bar))
{
    if (!(rho >= 0.0) || !std::isfinite(rho)) {
        throw std::invalid_argument("Equilibrium: mass must be non-negative");
    }
}

double von_mises_pdf(const ModelParams& params, double theta)
{
    const double z = params.concentration();
    // exp(z cos) / (2 pi I0(z)) written with the scaled Bessel function.
    return std::exp(z * (std::cos(theta) - 1.0))
           / (2.0 * std::numbers::pi * bessel_i_scaled(BesselOrder(0), z));
}

double gaussian_pdf(const ModelParams& params, double kappa)
{
    const double var = params.kappa_variance();
    return std::exp(-0.5 * kappa * kappa / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

double mu_pdf(const ModelParams& params, double theta, double kappa)
{
    return von_mises_pdf(params, theta) * gaussian_pdf(params, kappa);
}

double c1_coefficient(const ModelParams& params)
{
    const double z = params.concentration();
    const auto scaled = bessel_i_scaled_sequence(1, z);
    return scaled[1] / scaled[0];
}

double c1_quadrature(const ModelParams& params, std::size_t nodes)
{
    return integrate_periodic(
        [&](double theta) { return std::cos(theta) * von_mises_pdf(params, theta); }, nodes);
}

Vec2 equilibrium_flux(const Equilibrium& eq, const ModelParams& params)
{
    const double scale = eq.rho() * c1_coefficient(params);
    const Vec2 tau = heading(eq.theta_bar());
    return {scale * tau[0], scale * tau[1]};
}

double integrate_periodic(const std::function<double(double)>& f, std::size_t nodes)
{
    if (nodes == 0) {
        throw std::invalid_argument("integrate_periodic: need at least one node");
    }
    const double h = 2.0 * std::numbers::pi / static_cast<double>(nodes);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        sum += f(-std::numbers::pi + h * static_cast<double>(i));
    }
    return h * sum;
}

double integrate_kappa(const ModelParams& params, const std::function<double(double)>& f,
                       std::size_t nodes)
{
    if (nodes < 2) {
        throw std::invalid_argument("integrate_kappa: need at least two nodes");
    }
    const double cut = params.kappa_cutoff();
    const double h = 2.0 * cut / static_cast<double>(nodes - 1);
    double sum = 0.5 * (f(-cut) + f(cut));
    for (std::size_t i = 1; i + 1 < nodes; ++i) {
        sum += f(-cut + h * static_cast<double>(i));
    }
    return h * sum;
}

} // namespace ptwa
