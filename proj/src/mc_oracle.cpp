#include "ptwa/mc_oracle.hpp"

#include "ptwa/angles.hpp"
#include "ptwa/parallel.hpp"
#include "ptwa/random.hpp"
#include "ptwa/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ptwa {

namespace {

// Per-path samples, row-major [path][probe].
struct PathSamples
{
    std::size_t probes = 0;
    std::vector<double> integral;
    std::vector<double> terminal_sin;
};

double brownian_increment(StreamRng& rng, int refinement)
{
    if (refinement == 1) {
        return rng.normal();
    }
    double sum = 0.0;
    for (int r = 0; r < refinement; ++r) {
        sum += rng.normal();
    }
    return sum / std::sqrt(static_cast<double>(refinement));
}

PathSamples sample_paths(const OracleConfig& cfg, std::span<const Probe> probes)
{
    cfg.validate();
    const std::size_t n_probes = probes.size();
    const std::size_t branches = cfg.antithetic ? 2 : 1;
    const std::size_t steps = cfg.steps();
    const double dt = cfg.dt;
    const double lambda = cfg.model.lambda();
    const double noise = std::sqrt(2.0 * dt) * cfg.model.alpha();

    // With antithetic pairs the trajectories from (-theta, -kappa) are exact
    // mirror images, so mirrored probes share lanes and flip sign.
    std::vector<std::size_t> source(n_probes);
    std::vector<double> sign(n_probes, 1.0);
    std::vector<std::size_t> distinct;
    for (std::size_t p = 0; p < n_probes; ++p) {
        source[p] = distinct.size();
        bool mirrored = false;
        if (cfg.antithetic) {
            for (std::size_t d = 0; d < distinct.size(); ++d) {
                const Probe& q = probes[distinct[d]];
                if (q.theta == -probes[p].theta && q.kappa == -probes[p].kappa) {
                    source[p] = d;
                    sign[p] = (q.theta == 0.0 && q.kappa == 0.0) ? 1.0 : -1.0;
                    mirrored = true;
                    break;
                }
            }
        }
        if (!mirrored) {
            distinct.push_back(p);
        }
    }
    const std::size_t lanes = distinct.size() * branches;

    PathSamples out;
    out.probes = n_probes;
    out.integral.assign(cfg.paths * n_probes, 0.0);
    out.terminal_sin.assign(cfg.paths * n_probes, 0.0);

    parallel_for(cfg.paths, [&](std::size_t begin, std::size_t end) {
        std::vector<double> theta(lanes);
        std::vector<double> kappa(lanes);
        std::vector<double> sin_theta(lanes);
        std::vector<double> acc(lanes);
        std::vector<double> integral(distinct.size());
        std::vector<double> terminal(distinct.size());
        for (std::size_t path = begin; path < end; ++path) {
            for (std::size_t d = 0; d < distinct.size(); ++d) {
                for (std::size_t b = 0; b < branches; ++b) {
                    const std::size_t l = d * branches + b;
                    theta[l] = probes[distinct[d]].theta;
                    kappa[l] = probes[distinct[d]].kappa;
                    sin_theta[l] = std::sin(theta[l]);
                    acc[l] = 0.5 * sin_theta[l];
                }
            }
            StreamRng rng(cfg.seed, path);
            for (std::size_t s = 1; s <= steps; ++s) {
                const double xi = noise * brownian_increment(rng, cfg.noise_refinement);
                const double weight = (s == steps) ? 0.5 : 1.0;
                for (std::size_t l = 0; l < lanes; ++l) {
                    const double signed_xi = (branches == 2 && (l & 1U)) ? -xi : xi;
                    const double k_next = kappa[l] - lambda * (sin_theta[l] + kappa[l]) * dt + signed_xi;
                    theta[l] += kappa[l] * dt;
                    kappa[l] = k_next;
                    sin_theta[l] = std::sin(theta[l]);
                    acc[l] += weight * sin_theta[l];
                }
            }
            for (std::size_t d = 0; d < distinct.size(); ++d) {
                double in = 0.0;
                double te = 0.0;
                for (std::size_t b = 0; b < branches; ++b) {
                    in += acc[d * branches + b];
                    te += sin_theta[d * branches + b];
                }
                integral[d] = in * dt / static_cast<double>(branches);
                terminal[d] = te / static_cast<double>(branches);
            }
            for (std::size_t p = 0; p < n_probes; ++p) {
                out.integral[path * n_probes + p] = sign[p] * integral[source[p]];
                out.terminal_sin[path * n_probes + p] = sign[p] * terminal[source[p]];
            }
        }
    });
    return out;
}

struct MeanSe
{
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& samples, std::size_t stride, std::size_t offset,
                   std::size_t count)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        sum += samples[i * stride + offset];
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = samples[i * stride + offset] - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(count - 1);
    return {mean, std::sqrt(var / static_cast<double>(count))};
}

} // namespace

void OracleConfig::validate() const
{
    const double lambda = model.lambda();
    if (!(dt > 0.0) || dt > 0.01 * std::min(1.0, 1.0 / lambda) * (1.0 + 1e-12)) {
        throw std::invalid_argument("OracleConfig: dt must satisfy 0 < dt <= 0.01 min(1, 1/lambda)");
    }
    if (!(t_final >= 10.0 / lambda * (1.0 - 1e-12))) {
        throw std::invalid_argument("OracleConfig: t_final must be at least 10 / lambda");
    }
    if (paths < 2) {
        throw std::invalid_argument("OracleConfig: need at least two paths");
    }
    if (noise_refinement < 1) {
        throw std::invalid_argument("OracleConfig: noise_refinement must be positive");
    }
}

std::size_t OracleConfig::steps() const
{
    return static_cast<std::size_t>(std::llround(t_final / dt));
}

SdePath simulate_linear_sde(const OracleConfig& cfg, double theta0, double kappa0, std::size_t path_index)
{
    cfg.validate();
    return simulate_linear_sde(SdeCoefficients{cfg.model.lambda(), cfg.model.alpha()}, cfg.dt,
                               cfg.t_final, cfg.seed, theta0, kappa0, path_index);
}

SdePath simulate_linear_sde(const SdeCoefficients& coeffs, double dt, double t_final,
                            std::uint64_t seed, double theta0, double kappa0, std::size_t path_index)
{
    if (!(dt > 0.0) || !(t_final > 0.0) || !(coeffs.lambda > 0.0) || !(coeffs.alpha >= 0.0)) {
        throw std::invalid_argument("simulate_linear_sde: invalid coefficients or time grid");
    }
    const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
    const double noise = std::sqrt(2.0 * dt) * coeffs.alpha;

    SdePath path;
    path.time.reserve(steps + 1);
    path.theta.reserve(steps + 1);
    path.kappa.reserve(steps + 1);

    StreamRng rng(seed, path_index);
    double theta = theta0; // unwrapped
    double kappa = kappa0;
    path.time.push_back(0.0);
    path.theta.push_back(wrap_angle(theta));
    path.kappa.push_back(kappa);
    for (std::size_t s = 1; s <= steps; ++s) {
        const double k_next = kappa - coeffs.lambda * (std::sin(theta) + kappa) * dt + noise * rng.normal();
        theta += kappa * dt;
        kappa = k_next;
        path.time.push_back(static_cast<double>(s) * dt);
        path.theta.push_back(wrap_angle(theta));
        path.kappa.push_back(kappa);
    }
    return path;
}

PsiEstimate feynman_kac_psi(const OracleConfig& cfg, double theta0, double kappa0)
{
    const Probe probe{theta0, kappa0};
    return feynman_kac_psi(cfg, std::span<const Probe>(&probe, 1)).front();
}

std::vector<PsiEstimate> feynman_kac_psi(const OracleConfig& cfg, std::span<const Probe> probes)
{
    const PathSamples samples = sample_paths(cfg, probes);
    std::vector<PsiEstimate> out(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const MeanSe psi = mean_and_se(samples.integral, samples.probes, p, cfg.paths);
        const MeanSe tail = mean_and_se(samples.terminal_sin, samples.probes, p, cfg.paths);
        out[p].estimate = psi.mean;
        out[p].std_error = psi.se;
        out[p].terminal_sin_mean = tail.mean;
        out[p].terminal_sin_se = tail.se;
        out[p].horizon_warning = std::abs(tail.mean) > 3.0 * tail.se;
    }
    return out;
}

MuQuadrature mu_quadrature(const ModelParams& params, std::size_t n_theta, std::size_t n_kappa)
{
    if (n_theta < 2 || n_kappa < 1) {
        throw std::invalid_argument("mu_quadrature: grid too small");
    }
    const QuadratureRule gh = gauss_hermite_rule(n_kappa);
    const double sigma = std::sqrt(params.kappa_variance());
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n_theta);

    MuQuadrature q;
    for (std::size_t i = 0; i < n_theta; ++i) {
        const double theta = -std::numbers::pi + h * (static_cast<double>(i) + 0.5);
        const double w_theta = h * von_mises_pdf(params, theta);
        for (std::size_t k = 0; k < n_kappa; ++k) {
            q.nodes.push_back({theta, sigma * gh.nodes[k]});
            q.weights.push_back(w_theta * gh.weights[k]);
        }
    }
    return q;
}

McC2Result mc_c2(const OracleConfig& cfg, std::size_t n_grid_theta, std::size_t n_grid_kappa)
{
    const MuQuadrature quad = mu_quadrature(cfg.model, n_grid_theta, n_grid_kappa);
    const PathSamples samples = sample_paths(cfg, quad.nodes);
    const std::size_t n_nodes = quad.nodes.size();

    // Per-path quadratures: columns gamma1, gamma2, <psi>_mu.
    std::vector<double> per_path(cfg.paths * 3, 0.0);
    bool warning = false;
    for (std::size_t path = 0; path < cfg.paths; ++path) {
        double g1 = 0.0;
        double g2 = 0.0;
        double mean = 0.0;
        for (std::size_t i = 0; i < n_nodes; ++i) {
            const double psi = samples.integral[path * n_nodes + i];
            const double s = std::sin(quad.nodes[i].theta);
            g1 += quad.weights[i] * s * psi;
            g2 += quad.weights[i] * s * std::cos(quad.nodes[i].theta) * psi;
            mean += quad.weights[i] * psi;
        }
        per_path[path * 3] = g1;
        per_path[path * 3 + 1] = g2;
        per_path[path * 3 + 2] = mean;
    }
    for (std::size_t i = 0; i < n_nodes && !warning; ++i) {
        const MeanSe tail = mean_and_se(samples.terminal_sin, n_nodes, i, cfg.paths);
        warning = std::abs(tail.mean) > 3.0 * tail.se;
    }

    const MeanSe g1 = mean_and_se(per_path, 3, 0, cfg.paths);
    const MeanSe g2 = mean_and_se(per_path, 3, 1, cfg.paths);
    const MeanSe mean = mean_and_se(per_path, 3, 2, cfg.paths);

    McC2Result r;
    r.gamma1 = g1.mean;
    r.gamma1_se = g1.se;
    r.gamma2 = g2.mean;
    r.gamma2_se = g2.se;
    r.mean_psi = mean.mean;
    r.mean_psi_se = mean.se;
    r.c2 = g2.mean / g1.mean;
    r.horizon_warning = warning;

    // Delta method on the ratio of means, using the path covariance.
    double cov = 0.0;
    for (std::size_t path = 0; path < cfg.paths; ++path) {
        cov += (per_path[path * 3] - g1.mean) * (per_path[path * 3 + 1] - g2.mean);
    }
    cov /= static_cast<double>(cfg.paths - 1) * static_cast<double>(cfg.paths);
    const double var_ratio = (g2.se * g2.se - 2.0 * r.c2 * cov + r.c2 * r.c2 * g1.se * g1.se)
                             / (g1.mean * g1.mean);
    r.std_error = std::sqrt(std::max(0.0, var_ratio));
    return r;
}

} // namespace ptwa
