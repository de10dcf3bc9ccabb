#ifndef PTWA_PARTICLE_SIM_HPP
#define PTWA_PARTICLE_SIM_HPP

#include "ptwa/angles.hpp"
#include "ptwa/equilibrium.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptwa {

struct AgentState
{
    Vec2 x{0.0, 0.0}; ///< in [0, L)^2
    double theta = 0.0; ///< in (-pi, pi]
    double kappa = 0.0;
};

struct SimConfig
{
    std::size_t n_agents = 1000;
    double box_size = 10.0;
    double radius = 1.0;
    ModelParams model{1.0, 1.0};
    double dt = 5e-3;
    std::uint64_t seed = 0;
    bool include_self = true;

    /// Throws std::invalid_argument on non-positive sizes, dt > 0.1 / max(1, lambda),
    /// or L/2 < R < L sqrt(2)/2 (neither local nor global coupling).
    void validate() const;

    /// R >= L sqrt(2)/2: every pair is within range, so the neighbor sum is
    /// the total over all agents.
    bool global_coupling() const noexcept;
};

inline constexpr std::size_t kAngleBins = 36;
inline constexpr std::size_t kCurvatureBins = 40;

struct SimStats
{
    double order_parameter = 0.0; ///< |sum tau(theta_i)| / N
    double mean_direction = 0.0;
    double curvature_mean = 0.0;
    double curvature_variance = 0.0;
    /// theta_i - mean_direction, kAngleBins equal bins over (-pi, pi].
    std::vector<std::size_t> relative_angle_histogram;
    /// kappa_i over [-curvature_range, curvature_range], outliers in the edge bins.
    std::vector<std::size_t> curvature_histogram;
    double curvature_range = 0.0;
};

/// Minimum-image displacement from a to b in the periodic box.
Vec2 periodic_delta(const Vec2& a, const Vec2& b, double box_size);

enum class NeighborMethod { AllPairs, CellList };

/// Indices j with periodic |x_i - x_j| < R, ascending; i itself when include_self.
std::vector<std::vector<std::size_t>> neighbor_lists(std::span<const AgentState> agents,
                                                     const SimConfig& cfg, NeighborMethod method);

/// Direction of J_i = sum over the neighborhood of tau(theta_j); nullopt when
/// |J_i| < 1e-12. All-pairs search.
std::optional<double> neighbor_mean_direction(std::span<const AgentState> agents, std::size_t i,
                                              const SimConfig& cfg);

/// Same quantity for every agent, by the total sum under global coupling and a
/// cell list otherwise.
std::vector<std::optional<double>> mean_directions(std::span<const AgentState> agents,
                                                   const SimConfig& cfg);

/// tau(theta_i) x tau(omega_bar) = sin(omega_bar - theta_i).
double target_curvature(double theta_i, double omega_bar);

/// Uniform positions and headings, kappa drawn from N(0, alpha^2 / lambda).
std::vector<AgentState> initial_state(const SimConfig& cfg);

/// One synchronous Euler-Maruyama step: kappa, then theta with the new kappa,
/// then x with the new theta. Noise for agent i at step s comes from its own
/// stream, so results do not depend on thread count. An empty neighborhood
/// gives target curvature 0.
std::vector<AgentState> step(std::span<const AgentState> agents, const SimConfig& cfg,
                             std::uint64_t step_index);

SimStats collect_stats(std::span<const AgentState> agents, double curvature_range = 5.0);

/// Expected relative-angle bin probabilities under the Von Mises density.
std::vector<double> von_mises_bin_probabilities(const ModelParams& params, std::size_t bins);

/// Pearson statistic of observed counts against probabilities (total N).
double chi_square_statistic(std::span<const std::size_t> counts, std::span<const double> probabilities);

struct StatsSample
{
    double t = 0.0;
    double order_parameter = 0.0;
    double mean_direction = 0.0;
    double curvature_variance = 0.0;
};

struct RunOptions
{
    double t_final = 10.0;
    std::size_t stats_stride = 10; ///< steps between stats samples
    std::size_t trajectory_stride = 0; ///< 0 disables the trajectory dump
    std::ostream* trajectory = nullptr;
    double average_from = 0.5; ///< time averages use t >= average_from * t_final
};

struct RunResult
{
    std::vector<StatsSample> series;
    std::vector<AgentState> final_agents;
    SimStats final_stats;
    double mean_order_parameter = 0.0;
    double mean_curvature_second_moment = 0.0;
    double mean_curvature_variance = 0.0;
    std::size_t steps = 0;
};

/// Runs from initial_state(cfg). The stats series includes t = 0 and the final step.
RunResult run_simulation(const SimConfig& cfg, const RunOptions& opts);

void write_trajectory_header(std::ostream& out, const std::string& comment = {});
void write_trajectory_rows(std::ostream& out, double t, std::span<const AgentState> agents);
void write_stats_csv(std::ostream& out, const std::vector<StatsSample>& series,
                     const std::string& comment = {});

} // namespace ptwa

#endif // PTWA_PARTICLE_SIM_HPP
