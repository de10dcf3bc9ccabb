#ifndef PTWA_EQUILIBRIUM_HPP
#define PTWA_EQUILIBRIUM_HPP

#include "ptwa/angles.hpp"

#include <cstddef>
#include <functional>

namespace ptwa {

/// Scaled model parameters: relaxation rate lambda and noise intensity alpha.
class ModelParams
{
public:
    /// Throws std::invalid_argument unless both values are finite and positive.
    ModelParams(double lambda, double alpha);

    double lambda() const noexcept { return lambda_; }
    double alpha() const noexcept { return alpha_; }

    /// lambda^2 / alpha^2, the Von Mises concentration.
    double concentration() const noexcept { return lambda_ * lambda_ / (alpha_ * alpha_); }

    /// alpha^2 / lambda, variance of the curvature equilibrium.
    double kappa_variance() const noexcept { return alpha_ * alpha_ / lambda_; }

    /// Curvature cutoff 12 alpha / sqrt(lambda) used for kappa integrals.
    double kappa_cutoff() const noexcept;

private:
    double lambda_;
    double alpha_;
};

/// Physical parameters: relaxation frequency a, noise b, speed c, comfort
/// curvature upsilon.
struct DimensionalParams
{
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double upsilon = 0.0;
};

/// lambda = a/(c upsilon), alpha = sqrt(b^2 / (2 c upsilon^3)).
ModelParams nondimensionalize(const DimensionalParams& p);

/// Local equilibrium rho * mu_{theta_bar}.
class Equilibrium
{
public:
    Equilibrium(double rho, double theta_bar);

    double rho() const noexcept { return rho_; }
    double theta_bar() const noexcept { return theta_bar_; }

private:
    double rho_;
    double theta_bar_;
};

/// Von Mises density C0 exp(lambda^2/alpha^2 cos theta) on (-pi, pi].
double von_mises_pdf(const ModelParams& params, double theta);

/// Centred Gaussian of variance alpha^2/lambda.
double gaussian_pdf(const ModelParams& params, double kappa);

/// Product equilibrium mu(theta, kappa) = M(theta) N(kappa).
double mu_pdf(const ModelParams& params, double theta, double kappa);

/// c1 = I_1(lambda^2/alpha^2) / I_0(lambda^2/alpha^2).
double c1_coefficient(const ModelParams& params);

/// The same constant as the integral of cos(theta) M(theta), evaluated by the
/// periodic trapezoid rule.
double c1_quadrature(const ModelParams& params, std::size_t nodes = 512);

/// rho c1 (cos theta_bar, sin theta_bar).
Vec2 equilibrium_flux(const Equilibrium& eq, const ModelParams& params);

/// Periodic trapezoid rule over [-pi, pi).
double integrate_periodic(const std::function<double(double)>& f, std::size_t nodes = 512);

/// Trapezoid rule over |kappa| <= params.kappa_cutoff().
double integrate_kappa(const ModelParams& params, const std::function<double(double)>& f,
                       std::size_t nodes = 2001);

} // namespace ptwa

#endif // PTWA_EQUILIBRIUM_HPP
