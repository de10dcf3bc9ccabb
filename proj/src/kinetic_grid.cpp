#include "ptwa/kinetic_grid.hpp"

#include "ptwa/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace ptwa {

namespace {

constexpr std::size_t kMinNodes = 8;

void require_resolution(const Grid2D& grid)
{
    if (grid.n_theta() < kMinNodes || grid.n_kappa() < kMinNodes) {
        throw GridTooCoarse("finite-difference operators need at least 8 nodes per direction");
    }
}

// Finite differences on a GridField's raw storage.
class Stencil
{
public:
    Stencil(const Grid2D& grid, const std::vector<double>& v)
        : g_(grid)
        , v_(v)
    {
    }

    double d_theta(std::size_t i, std::size_t k) const
    {
        const std::size_t n = g_.n_theta();
        const std::size_t ip = (i + 1) % n;
        const std::size_t im = (i + n - 1) % n;
        return (at(ip, k) - at(im, k)) / (2.0 * g_.d_theta());
    }

    double d_kappa(std::size_t i, std::size_t k) const
    {
        const double h = g_.d_kappa();
        const std::size_t last = g_.n_kappa() - 1;
        if (k == 0) {
            return (at(i, 1) - at(i, 0)) / h;
        }
        if (k == last) {
            return (at(i, last) - at(i, last - 1)) / h;
        }
        return (at(i, k + 1) - at(i, k - 1)) / (2.0 * h);
    }

    double d_kappa2(std::size_t i, std::size_t k) const
    {
        const double h2 = g_.d_kappa() * g_.d_kappa();
        const std::size_t last = g_.n_kappa() - 1;
        if (k == 0) {
            return (at(i, 0) - 2.0 * at(i, 1) + at(i, 2)) / h2;
        }
        if (k == last) {
            return (at(i, last) - 2.0 * at(i, last - 1) + at(i, last - 2)) / h2;
        }
        return (at(i, k + 1) - 2.0 * at(i, k) + at(i, k - 1)) / h2;
    }

private:
    double at(std::size_t i, std::size_t k) const { return v_[g_.index(i, k)]; }

    const Grid2D& g_;
    const std::vector<double>& v_;
};

} // namespace

Grid2D::Grid2D(std::size_t n_theta, double kappa_min, double kappa_max, std::size_t n_kappa)
    : n_theta_(n_theta)
    , kappa_min_(kappa_min)
    , kappa_max_(kappa_max)
    , n_kappa_(n_kappa)
    , d_theta_(2.0 * std::numbers::pi / static_cast<double>(n_theta))
    , d_kappa_(n_kappa > 1 ? (kappa_max - kappa_min) / static_cast<double>(n_kappa - 1) : 0.0)
{
    if (n_theta < kMinNodes) {
        throw GridTooCoarse("Grid2D: need at least 8 theta nodes");
    }
    if (!(kappa_min < kappa_max) || !std::isfinite(kappa_min) || !std::isfinite(kappa_max)) {
        throw std::invalid_argument("Grid2D: kappa_min must be below kappa_max");
    }
    if (n_kappa < 2) {
        throw GridTooCoarse("Grid2D: need at least 2 kappa nodes");
    }
}

Grid2D Grid2D::with_spacing(double step, double kappa_max)
{
    if (!(step > 0.0) || !(kappa_max > 0.0)) {
        throw std::invalid_argument("Grid2D::with_spacing: step and kappa_max must be positive");
    }
    const auto n_theta =
        static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / step - 1e-9));
    const auto n_kappa = static_cast<std::size_t>(std::llround(2.0 * kappa_max / step)) + 1;
    return {n_theta, -kappa_max, kappa_max, n_kappa};
}

double Grid2D::theta(std::size_t i) const noexcept
{
    return -std::numbers::pi + d_theta_ * static_cast<double>(i);
}

double Grid2D::kappa(std::size_t k) const noexcept
{
    return kappa_min_ + d_kappa_ * static_cast<double>(k);
}

GridField::GridField(Grid2D grid, std::vector<double> values)
    : grid_(grid)
    , values_(std::move(values))
{
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("GridField: value count does not match grid");
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
        throw std::invalid_argument("GridField: values must be finite");
    }
}

double GridField::interior_sup_norm() const noexcept
{
    double sup = 0.0;
    for (std::size_t i = 0; i < grid_.n_theta(); ++i) {
        for (std::size_t k = 0; k < grid_.n_kappa(); ++k) {
            if (grid_.interior(k)) {
                sup = std::max(sup, std::abs((*this)(i, k)));
            }
        }
    }
    return sup;
}

void GridField::write_csv(std::ostream& out, const std::string& comment) const
{
    if (!comment.empty()) {
        out << "# " << comment << '\n';
    }
    out << "theta,kappa,value\n";
    for (std::size_t i = 0; i < grid_.n_theta(); ++i) {
        for (std::size_t k = 0; k < grid_.n_kappa(); ++k) {
            out << format_double(grid_.theta(i)) << ',' << format_double(grid_.kappa(k)) << ','
                << format_double((*this)(i, k)) << '\n';
        }
    }
}

double eval_H(const ModelParams& params, double theta, double kappa)
{
    return -params.lambda() * std::cos(theta) + 0.5 * kappa * kappa;
}

std::optional<double> flux_direction(const GridField& f)
{
    const Grid2D& g = f.grid();
    double jx = 0.0;
    double jy = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < g.n_theta(); ++i) {
        const double c = std::cos(g.theta(i));
        const double s = std::sin(g.theta(i));
        double column = 0.0;
        for (std::size_t k = 0; k < g.n_kappa(); ++k) {
            const double w = (k == 0 || k + 1 == g.n_kappa()) ? 0.5 : 1.0;
            column += w * f(i, k);
        }
        jx += c * column;
        jy += s * column;
        mass += column;
    }
    const double norm = std::hypot(jx, jy);
    if (!(mass > 0.0) || norm <= 1e-12 * mass) {
        return std::nullopt;
    }
    return std::atan2(jy, jx);
}

GridField apply_Q(const GridField& f, double theta_bar, const ModelParams& params)
{
    const Grid2D& g = f.grid();
    require_resolution(g);
    const double lambda = params.lambda();
    const double alpha2 = params.alpha() * params.alpha();

    std::vector<double> kappa_f(g.size());
    for (std::size_t i = 0; i < g.n_theta(); ++i) {
        for (std::size_t k = 0; k < g.n_kappa(); ++k) {
            kappa_f[g.index(i, k)] = g.kappa(k) * f(i, k);
        }
    }
    const Stencil sf(g, f.values());
    const Stencil skf(g, kappa_f);

    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.n_theta(); ++i) {
        const double turn = std::sin(theta_bar - g.theta(i));
        for (std::size_t k = 0; k < g.n_kappa(); ++k) {
            out[g.index(i, k)] = -g.kappa(k) * sf.d_theta(i, k) - lambda * turn * sf.d_kappa(i, k)
                                 + lambda * skf.d_kappa(i, k) + alpha2 * sf.d_kappa2(i, k);
        }
    }
    return {g, std::move(out)};
}

GridField apply_L(const GridField& psi, const ModelParams& params)
{
    const Grid2D& g = psi.grid();
    require_resolution(g);
    const double lambda = params.lambda();
    const double alpha2 = params.alpha() * params.alpha();
    const Stencil s(g, psi.values());

    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.n_theta(); ++i) {
        const double sin_theta = std::sin(g.theta(i));
        for (std::size_t k = 0; k < g.n_kappa(); ++k) {
            const double kappa = g.kappa(k);
            const double dk = s.d_kappa(i, k);
            out[g.index(i, k)] = kappa * s.d_theta(i, k) - lambda * sin_theta * dk
                                 - lambda * kappa * dk + alpha2 * s.d_kappa2(i, k);
        }
    }
    return {g, std::move(out)};
}

double residual_inf(const GridField& psi, const ModelParams& params)
{
    const GridField l_psi = apply_L(psi, params);
    const Grid2D& g = psi.grid();
    double sup = 0.0;
    for (std::size_t i = 0; i < g.n_theta(); ++i) {
        const double sin_theta = std::sin(g.theta(i));
        for (std::size_t k = 0; k < g.n_kappa(); ++k) {
            if (g.interior(k)) {
                sup = std::max(sup, std::abs(l_psi(i, k) + sin_theta));
            }
        }
    }
    return sup;
}

std::optional<double> dissipation(const GridField& f, const ModelParams& params)
{
    const auto theta_bar = flux_direction(f);
    if (!theta_bar) {
        return std::nullopt;
    }
    const Grid2D& g = f.grid();
    const GridField q = apply_Q(f, *theta_bar, params);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.n_theta(); ++i) {
        const double m = von_mises_pdf(params, g.theta(i) - *theta_bar);
        for (std::size_t k = 0; k < g.n_kappa(); ++k) {
            if (g.interior(k)) {
                const double mu = m * gaussian_pdf(params, g.kappa(k));
                sum += q(i, k) * f(i, k) / mu;
            }
        }
    }
    return sum * g.d_theta() * g.d_kappa();
}

} // namespace ptwa
