#ifndef PTWA_HYDRODYNAMICS_HPP
#define PTWA_HYDRODYNAMICS_HPP

#include "ptwa/gci_spectral.hpp"

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptwa {

class DegenerateMomentError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct GammaMoments
{
    double gamma1 = 0.0; ///< <sin(theta) psi>_mu
    double gamma2 = 0.0; ///< <sin(theta) cos(theta) psi>_mu
};

/// Moments by periodic trapezoid over theta (kappa integral exact: only the
/// k = 0 column survives). Throws DegenerateMomentError if |gamma1| < 1e-10.
GammaMoments gamma_moments(const CoeffMatrix& x, const SpectralParams& sp,
                           std::size_t theta_nodes = 512);

/// Same moments from the coefficients alone: <psi, sin(p theta)>_mu expressed
/// through Bessel values, p = 1 giving sum_j C_j^0 B(j, 0).
GammaMoments gamma_moments_projection(const CoeffMatrix& x, const SpectralParams& sp);

/// c2 = gamma2 / gamma1.
double c2_coefficient(const CoeffMatrix& x, const SpectralParams& sp);

/// Constants of the macroscopic system.
class HydroCoeffs
{
public:
    HydroCoeffs(double c1, double c2, double d, double gamma1, double gamma2);

    /// c1 from the Bessel ratio, gamma moments from the solved GCI,
    /// d = alpha^2 / lambda^2.
    static HydroCoeffs from_solution(const CoeffMatrix& x, const SpectralParams& sp);

    double c1() const noexcept { return c1_; }
    double c2() const noexcept { return c2_; }
    double d() const noexcept { return d_; }
    double gamma1() const noexcept { return gamma1_; }
    double gamma2() const noexcept { return gamma2_; }

private:
    double c1_;
    double c2_;
    double d_;
    double gamma1_;
    double gamma2_;
};

/// Density and flux direction Omega = (cos theta, sin theta).
struct HydroState
{
    double rho = 0.0;
    double theta = 0.0;
};

/// The two characteristic velocities, slow <= fast.
struct CharacteristicSpeeds
{
    double slow = 0.0;
    double fast = 0.0;
};

/// (c1 - c2)^2 cos^2 + 4 c1 d sin^2: non-negative for valid coefficients.
double speed_discriminant(const HydroCoeffs& h, double theta);

/// Roots of the 1-D reduced system along x for flux angle theta.
CharacteristicSpeeds characteristic_speeds(const HydroCoeffs& h, double theta);

/// True iff the discriminant is non-negative at `theta_samples` uniform angles.
bool hyperbolicity_check(const HydroCoeffs& h, std::size_t theta_samples);

/// One row of a coefficient sweep; NaN marks a degenerate or failed solve.
struct SweepRow
{
    double lambda = 0.0;
    double alpha = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double d = 0.0;
    std::string error; ///< empty on success
};

/// Solves the GCI at every (lambda, alpha) pair and tabulates coefficients.
/// Rows come back in input order regardless of thread scheduling.
std::vector<SweepRow> sweep_coefficients(const std::vector<std::pair<double, double>>& params,
                                         int m, int n);

/// Columns lambda, alpha, c1, c2, gamma1, gamma2, d.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::string& comment = {});

} // namespace ptwa

#endif // PTWA_HYDRODYNAMICS_HPP
