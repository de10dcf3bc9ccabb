#ifndef PTWA_MC_ORACLE_HPP
#define PTWA_MC_ORACLE_HPP

#include "ptwa/equilibrium.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ptwa {

/// Monte-Carlo settings for the linear SDE
///   d theta = kappa dt,  d kappa = -lambda (sin theta + kappa) dt + sqrt(2) alpha dB.
struct OracleConfig
{
    ModelParams model{1.0, 1.0};
    double dt = 5e-3;
    double t_final = 40.0;
    std::size_t paths = 10000; ///< independent Brownian paths
    std::uint64_t seed = 0;
    /// Each Brownian path drives the trajectories with +dB and -dB.
    bool antithetic = true;
    /// Each increment is the normalized sum of this many unit normals, so a
    /// run at dt with refinement r shares its Brownian path with a run at
    /// dt / r and refinement 1.
    int noise_refinement = 1;

    /// Throws std::invalid_argument unless dt <= 0.01 min(1, 1/lambda),
    /// t_final >= 10 / lambda, paths >= 2 and noise_refinement >= 1.
    void validate() const;

    std::size_t steps() const;
};

/// Drift and noise strength of the linear SDE; noise may be zero.
struct SdeCoefficients
{
    double lambda = 1.0;
    double alpha = 1.0;
};

struct SdePath
{
    std::vector<double> time;
    std::vector<double> theta; ///< wrapped to (-pi, pi]
    std::vector<double> kappa;
};

/// Euler-Maruyama trajectory driven by Brownian path `path_index`.
SdePath simulate_linear_sde(const OracleConfig& cfg, double theta0, double kappa0,
                            std::size_t path_index = 0);

/// Same integrator with explicit coefficients (alpha = 0 gives the
/// deterministic damped pendulum).
SdePath simulate_linear_sde(const SdeCoefficients& coeffs, double dt, double t_final,
                            std::uint64_t seed, double theta0, double kappa0,
                            std::size_t path_index = 0);

struct Probe
{
    double theta = 0.0;
    double kappa = 0.0;
};

struct PsiEstimate
{
    double estimate = 0.0;
    double std_error = 0.0;
    double terminal_sin_mean = 0.0; ///< E[sin theta] at t_final
    double terminal_sin_se = 0.0;
    /// |terminal mean| > 3 terminal standard errors: the horizon looks short.
    bool horizon_warning = false;
};

/// psi(theta0, kappa0) = int_0^t_final E[sin theta_s] ds, time integral by
/// the trapezoid rule on the step grid.
PsiEstimate feynman_kac_psi(const OracleConfig& cfg, double theta0, double kappa0);

/// Several starting points driven by the same Brownian paths. With
/// antithetic pairing the estimate at (-theta, -kappa) is exactly the
/// negative of the one at (theta, kappa).
std::vector<PsiEstimate> feynman_kac_psi(const OracleConfig& cfg, std::span<const Probe> probes);

struct McC2Result
{
    double c2 = 0.0;
    double std_error = 0.0;
    double gamma1 = 0.0;
    double gamma1_se = 0.0;
    double gamma2 = 0.0;
    double gamma2_se = 0.0;
    double mean_psi = 0.0; ///< <psi>_mu on the grid, zero for an exact oracle
    double mean_psi_se = 0.0;
    bool horizon_warning = false;
};

/// Product quadrature against mu: midpoint rule in theta weighted by M,
/// Gauss-Hermite in kappa. Nodes come in (theta, kappa) / (-theta, -kappa) pairs.
struct MuQuadrature
{
    std::vector<Probe> nodes;
    std::vector<double> weights;
};

MuQuadrature mu_quadrature(const ModelParams& params, std::size_t n_theta, std::size_t n_kappa);

/// c2 = gamma2 / gamma1 with both moments integrated from Monte-Carlo psi on
/// the mu_quadrature grid. Standard errors are taken across Brownian paths,
/// the ratio's by the delta method.
McC2Result mc_c2(const OracleConfig& cfg, std::size_t n_grid_theta, std::size_t n_grid_kappa);

} // namespace ptwa

#endif // PTWA_MC_ORACLE_HPP
