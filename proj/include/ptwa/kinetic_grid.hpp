#ifndef PTWA_KINETIC_GRID_HPP
#define PTWA_KINETIC_GRID_HPP

#include "ptwa/equilibrium.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptwa {

class GridTooCoarse : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Tensor grid over periodic theta in [-pi, pi) and truncated kappa in
/// [kappa_min, kappa_max], both ends included.
class Grid2D
{
public:
    Grid2D(std::size_t n_theta, double kappa_min, double kappa_max, std::size_t n_kappa);

    /// Spacing no larger than `step` in theta, kappa nodes on multiples of
    /// `step` over [-kappa_max, kappa_max].
    static Grid2D with_spacing(double step, double kappa_max = 5.0);

    std::size_t n_theta() const noexcept { return n_theta_; }
    std::size_t n_kappa() const noexcept { return n_kappa_; }
    std::size_t size() const noexcept { return n_theta_ * n_kappa_; }
    double kappa_min() const noexcept { return kappa_min_; }
    double kappa_max() const noexcept { return kappa_max_; }
    double d_theta() const noexcept { return d_theta_; }
    double d_kappa() const noexcept { return d_kappa_; }

    double theta(std::size_t i) const noexcept;
    double kappa(std::size_t k) const noexcept;

    /// Row-major in theta.
    std::size_t index(std::size_t i, std::size_t k) const noexcept { return i * n_kappa_ + k; }

    /// Kappa rows touching the truncation boundary are not interior.
    bool interior(std::size_t k) const noexcept { return k > 0 && k + 1 < n_kappa_; }

private:
    std::size_t n_theta_;
    double kappa_min_;
    double kappa_max_;
    std::size_t n_kappa_;
    double d_theta_;
    double d_kappa_;
};

/// Samples of a function of (theta, kappa) on a Grid2D.
class GridField
{
public:
    GridField(Grid2D grid, std::vector<double> values);

    template <typename F>
    static GridField sample(const Grid2D& grid, F&& f)
    {
        std::vector<double> values(grid.size());
        for (std::size_t i = 0; i < grid.n_theta(); ++i) {
            for (std::size_t k = 0; k < grid.n_kappa(); ++k) {
                values[grid.index(i, k)] = f(grid.theta(i), grid.kappa(k));
            }
        }
        return GridField(grid, std::move(values));
    }

    const Grid2D& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator()(std::size_t i, std::size_t k) const noexcept { return values_[grid_.index(i, k)]; }

    /// Max |value| over interior kappa rows.
    double interior_sup_norm() const noexcept;

    /// Columns theta, kappa, value, preceded by `comment` (one '#' line) when given.
    void write_csv(std::ostream& out, const std::string& comment = {}) const;

private:
    Grid2D grid_;
    std::vector<double> values_;
};

/// H(theta, kappa) = -lambda cos(theta) + kappa^2 / 2.
double eval_H(const ModelParams& params, double theta, double kappa);

/// Direction of the flux j = int tau(theta) f; nullopt when |j| is below
/// 1e-12 times the mass (isotropic field).
std::optional<double> flux_direction(const GridField& f);

/// Collision operator
///   Q(f) = -kappa d_theta f - lambda sin(theta_bar - theta) d_kappa f
///          + lambda d_kappa(kappa f) + alpha^2 d_kappa^2 f
/// by centred second-order differences. Boundary kappa rows use first-order
/// one-sided stencils and are excluded by Grid2D::interior.
GridField apply_Q(const GridField& f, double theta_bar, const ModelParams& params);

/// GCI operator
///   L psi = kappa d_theta psi - lambda sin(theta) d_kappa psi
///           - lambda kappa d_kappa psi + alpha^2 d_kappa^2 psi,
/// same discretization as apply_Q.
GridField apply_L(const GridField& psi, const ModelParams& params);

/// sup over interior nodes of |L psi + sin(theta)|.
double residual_inf(const GridField& psi, const ModelParams& params);

/// Entropy production int Q(f) f / mu_{theta_bar} over interior nodes, with
/// theta_bar the flux direction of f. Non-positive up to discretization error;
/// nullopt for an isotropic field.
std::optional<double> dissipation(const GridField& f, const ModelParams& params);

} // namespace ptwa

#endif // PTWA_KINETIC_GRID_HPP
