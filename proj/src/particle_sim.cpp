#include "ptwa/particle_sim.hpp"

#include "ptwa/csv.hpp"
#include "ptwa/parallel.hpp"
#include "ptwa/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace ptwa {

namespace {

constexpr double kEmptyNeighborhood = 1e-12;
constexpr std::uint64_t kInitialStream = ~std::uint64_t{0};

double wrap_coordinate(double x, double box)
{
    double r = x - box * std::floor(x / box);
    if (r >= box) {
        r = 0.0;
    }
    return r;
}

std::optional<double> direction_of(double jx, double jy)
{
    if (std::hypot(jx, jy) < kEmptyNeighborhood) {
        return std::nullopt;
    }
    return std::atan2(jy, jx);
}

bool within(const AgentState& a, const AgentState& b, double box, double radius)
{
    const Vec2 d = periodic_delta(a.x, b.x, box);
    return d[0] * d[0] + d[1] * d[1] < radius * radius;
}

class CellList
{
public:
    CellList(std::span<const AgentState> agents, double box, double radius)
        : cells_per_side_(std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(box / radius))))
        , cell_size_(box / static_cast<double>(cells_per_side_))
        , members_(cells_per_side_ * cells_per_side_)
    {
        for (std::size_t j = 0; j < agents.size(); ++j) {
            members_[cell_of(agents[j].x)].push_back(j);
        }
    }

    // Candidates from the 3x3 block of cells around x; the whole box when
    // there are fewer than three cells per side.
    template <typename Visit>
    void for_each_candidate(const Vec2& x, Visit&& visit) const
    {
        if (cells_per_side_ < 3) {
            for (const auto& cell : members_) {
                for (std::size_t j : cell) {
                    visit(j);
                }
            }
            return;
        }
        const auto n = static_cast<long>(cells_per_side_);
        const long cx = static_cast<long>(axis_cell(x[0]));
        const long cy = static_cast<long>(axis_cell(x[1]));
        for (long dy = -1; dy <= 1; ++dy) {
            for (long dx = -1; dx <= 1; ++dx) {
                const long ix = (cx + dx + n) % n;
                const long iy = (cy + dy + n) % n;
                for (std::size_t j : members_[static_cast<std::size_t>(iy * n + ix)]) {
                    visit(j);
                }
            }
        }
    }

private:
    std::size_t axis_cell(double c) const
    {
        return std::min(cells_per_side_ - 1, static_cast<std::size_t>(c / cell_size_));
    }

    std::size_t cell_of(const Vec2& x) const
    {
        return axis_cell(x[1]) * cells_per_side_ + axis_cell(x[0]);
    }

    std::size_t cells_per_side_;
    double cell_size_;
    std::vector<std::vector<std::size_t>> members_;
};

std::vector<std::size_t> cell_neighbors(const CellList& cells, std::span<const AgentState> agents,
                                        std::size_t i, const SimConfig& cfg)
{
    std::vector<std::size_t> out;
    cells.for_each_candidate(agents[i].x, [&](std::size_t j) {
        if ((j != i || cfg.include_self) && within(agents[i], agents[j], cfg.box_size, cfg.radius)) {
            out.push_back(j);
        }
    });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> brute_neighbors(std::span<const AgentState> agents, std::size_t i,
                                         const SimConfig& cfg)
{
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < agents.size(); ++j) {
        if ((j != i || cfg.include_self) && within(agents[i], agents[j], cfg.box_size, cfg.radius)) {
            out.push_back(j);
        }
    }
    return out;
}

std::optional<double> sum_direction(std::span<const AgentState> agents, const std::vector<std::size_t>& idx)
{
    double jx = 0.0;
    double jy = 0.0;
    for (std::size_t j : idx) {
        jx += std::cos(agents[j].theta);
        jy += std::sin(agents[j].theta);
    }
    return direction_of(jx, jy);
}

} // namespace

void SimConfig::validate() const
{
    if (n_agents == 0) {
        throw std::invalid_argument("SimConfig: n_agents must be positive");
    }
    if (!(box_size > 0.0) || !std::isfinite(box_size)) {
        throw std::invalid_argument("SimConfig: box size must be positive");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("SimConfig: radius must be positive");
    }
    if (!(dt > 0.0) || dt > 0.1 / std::max(1.0, model.lambda())) {
        throw std::invalid_argument("SimConfig: dt must satisfy 0 < dt <= 0.1 / max(1, lambda)");
    }
    if (radius > 0.5 * box_size && !global_coupling()) {
        throw std::invalid_argument("SimConfig: radius must be <= box/2 or >= box*sqrt(2)/2");
    }
}

bool SimConfig::global_coupling() const noexcept
{
    return radius >= box_size * std::numbers::sqrt2 / 2.0;
}

Vec2 periodic_delta(const Vec2& a, const Vec2& b, double box_size)
{
    Vec2 d{b[0] - a[0], b[1] - a[1]};
    for (double& c : d) {
        c -= box_size * std::nearbyint(c / box_size);
    }
    return d;
}

std::vector<std::vector<std::size_t>> neighbor_lists(std::span<const AgentState> agents,
                                                     const SimConfig& cfg, NeighborMethod method)
{
    std::vector<std::vector<std::size_t>> lists(agents.size());
    if (method == NeighborMethod::AllPairs) {
        for (std::size_t i = 0; i < agents.size(); ++i) {
            lists[i] = brute_neighbors(agents, i, cfg);
        }
        return lists;
    }
    const CellList cells(agents, cfg.box_size, cfg.radius);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        lists[i] = cell_neighbors(cells, agents, i, cfg);
    }
    return lists;
}

std::optional<double> neighbor_mean_direction(std::span<const AgentState> agents, std::size_t i,
                                              const SimConfig& cfg)
{
    if (i >= agents.size()) {
        throw std::out_of_range("neighbor_mean_direction: index out of range");
    }
    return sum_direction(agents, brute_neighbors(agents, i, cfg));
}

std::vector<std::optional<double>> mean_directions(std::span<const AgentState> agents,
                                                   const SimConfig& cfg)
{
    std::vector<std::optional<double>> out(agents.size());
    if (cfg.global_coupling()) {
        double tx = 0.0;
        double ty = 0.0;
        for (const AgentState& a : agents) {
            tx += std::cos(a.theta);
            ty += std::sin(a.theta);
        }
        for (std::size_t i = 0; i < agents.size(); ++i) {
            if (cfg.include_self) {
                out[i] = direction_of(tx, ty);
            } else {
                out[i] = direction_of(tx - std::cos(agents[i].theta), ty - std::sin(agents[i].theta));
            }
        }
        return out;
    }
    const CellList cells(agents, cfg.box_size, cfg.radius);
    parallel_for(agents.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            out[i] = sum_direction(agents, cell_neighbors(cells, agents, i, cfg));
        }
    });
    return out;
}

double target_curvature(double theta_i, double omega_bar)
{
    return std::cos(theta_i) * std::sin(omega_bar) - std::sin(theta_i) * std::cos(omega_bar);
}

std::vector<AgentState> initial_state(const SimConfig& cfg)
{
    cfg.validate();
    const double sigma = std::sqrt(cfg.model.kappa_variance());
    std::vector<AgentState> agents(cfg.n_agents);
    for (std::size_t i = 0; i < cfg.n_agents; ++i) {
        StreamRng rng(cfg.seed, stream_key(kInitialStream, i));
        AgentState& a = agents[i];
        a.x = {cfg.box_size * rng.uniform(), cfg.box_size * rng.uniform()};
        a.x[0] = wrap_coordinate(a.x[0], cfg.box_size);
        a.x[1] = wrap_coordinate(a.x[1], cfg.box_size);
        a.theta = wrap_angle(2.0 * std::numbers::pi * rng.uniform() - std::numbers::pi);
        a.kappa = sigma * rng.normal();
    }
    return agents;
}

std::vector<AgentState> step(std::span<const AgentState> agents, const SimConfig& cfg,
                             std::uint64_t step_index)
{
    const auto targets = mean_directions(agents, cfg);
    const double dt = cfg.dt;
    const double lambda = cfg.model.lambda();
    const double noise = std::sqrt(2.0 * dt) * cfg.model.alpha();
    std::vector<AgentState> next(agents.size());
    parallel_for(agents.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const AgentState& a = agents[i];
            const double kbar = targets[i] ? target_curvature(a.theta, *targets[i]) : 0.0;
            StreamRng rng(cfg.seed, stream_key(step_index, i));
            AgentState& b = next[i];
            b.kappa = a.kappa + lambda * (kbar - a.kappa) * dt + noise * rng.normal();
            const double theta = a.theta + b.kappa * dt;
            b.theta = wrap_angle(theta);
            b.x[0] = wrap_coordinate(a.x[0] + std::cos(theta) * dt, cfg.box_size);
            b.x[1] = wrap_coordinate(a.x[1] + std::sin(theta) * dt, cfg.box_size);
        }
    });
    return next;
}

SimStats collect_stats(std::span<const AgentState> agents, double curvature_range)
{
    if (agents.empty()) {
        throw std::invalid_argument("collect_stats: need at least one agent");
    }
    if (!(curvature_range > 0.0)) {
        throw std::invalid_argument("collect_stats: curvature range must be positive");
    }
    const auto n = static_cast<double>(agents.size());
    double sx = 0.0;
    double sy = 0.0;
    double ksum = 0.0;
    for (const AgentState& a : agents) {
        sx += std::cos(a.theta);
        sy += std::sin(a.theta);
        ksum += a.kappa;
    }
    SimStats s;
    s.order_parameter = std::min(1.0, std::hypot(sx, sy) / n);
    s.mean_direction = std::atan2(sy, sx);
    s.curvature_mean = ksum / n;
    double kss = 0.0;
    for (const AgentState& a : agents) {
        const double d = a.kappa - s.curvature_mean;
        kss += d * d;
    }
    s.curvature_variance = kss / n;
    s.curvature_range = curvature_range;

    s.relative_angle_histogram.assign(kAngleBins, 0);
    s.curvature_histogram.assign(kCurvatureBins, 0);
    const double angle_width = 2.0 * std::numbers::pi / static_cast<double>(kAngleBins);
    const double kappa_width = 2.0 * curvature_range / static_cast<double>(kCurvatureBins);
    for (const AgentState& a : agents) {
        const double rel = wrap_angle(a.theta - s.mean_direction);
        const auto ab = static_cast<long>(std::floor((rel + std::numbers::pi) / angle_width));
        ++s.relative_angle_histogram[static_cast<std::size_t>(std::clamp<long>(ab, 0, kAngleBins - 1))];
        const double kb = std::floor((a.kappa + curvature_range) / kappa_width);
        const double kc = std::clamp(kb, 0.0, static_cast<double>(kCurvatureBins - 1));
        ++s.curvature_histogram[static_cast<std::size_t>(kc)];
    }
    return s;
}

std::vector<double> von_mises_bin_probabilities(const ModelParams& params, std::size_t bins)
{
    if (bins == 0) {
        throw std::invalid_argument("von_mises_bin_probabilities: need at least one bin");
    }
    constexpr int sub = 64; // Simpson panels per bin
    const double width = 2.0 * std::numbers::pi / static_cast<double>(bins);
    const double h = width / sub;
    std::vector<double> p(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const double lo = -std::numbers::pi + width * static_cast<double>(b);
        double sum = von_mises_pdf(params, lo) + von_mises_pdf(params, lo + width);
        for (int k = 1; k < sub; ++k) {
            sum += (k % 2 ? 4.0 : 2.0) * von_mises_pdf(params, lo + h * k);
        }
        p[b] = sum * h / 3.0;
    }
    return p;
}

double chi_square_statistic(std::span<const std::size_t> counts, std::span<const double> probabilities)
{
    if (counts.size() != probabilities.size() || counts.empty()) {
        throw std::invalid_argument("chi_square_statistic: size mismatch");
    }
    double total = 0.0;
    for (std::size_t c : counts) {
        total += static_cast<double>(c);
    }
    double chi2 = 0.0;
    for (std::size_t b = 0; b < counts.size(); ++b) {
        const double expected = total * probabilities[b];
        if (!(expected > 0.0)) {
            throw std::invalid_argument("chi_square_statistic: empty expected bin");
        }
        const double d = static_cast<double>(counts[b]) - expected;
        chi2 += d * d / expected;
    }
    return chi2;
}

RunResult run_simulation(const SimConfig& cfg, const RunOptions& opts)
{
    cfg.validate();
    if (!(opts.t_final > 0.0) || opts.stats_stride == 0) {
        throw std::invalid_argument("run_simulation: need t_final > 0 and stats_stride > 0");
    }
    RunResult r;
    r.steps = static_cast<std::size_t>(std::llround(opts.t_final / cfg.dt));
    std::vector<AgentState> agents = initial_state(cfg);

    const double average_from = opts.average_from * opts.t_final;
    std::size_t averaged = 0;
    double kappa_sq = 0.0;
    double order = 0.0;
    double variance = 0.0;

    auto record = [&](std::size_t s) {
        const double t = static_cast<double>(s) * cfg.dt;
        const SimStats st = collect_stats(agents);
        r.series.push_back({t, st.order_parameter, st.mean_direction, st.curvature_variance});
        if (t >= average_from) {
            double m2 = 0.0;
            for (const AgentState& a : agents) {
                m2 += a.kappa * a.kappa;
            }
            kappa_sq += m2 / static_cast<double>(agents.size());
            order += st.order_parameter;
            variance += st.curvature_variance;
            ++averaged;
        }
    };
    auto dump = [&](std::size_t s) {
        if (opts.trajectory != nullptr && opts.trajectory_stride > 0 && s % opts.trajectory_stride == 0) {
            write_trajectory_rows(*opts.trajectory, static_cast<double>(s) * cfg.dt, agents);
        }
    };

    record(0);
    dump(0);
    for (std::size_t s = 1; s <= r.steps; ++s) {
        agents = step(agents, cfg, s - 1);
        if (s % opts.stats_stride == 0 || s == r.steps) {
            record(s);
        }
        dump(s);
    }
    if (averaged > 0) {
        r.mean_order_parameter = order / static_cast<double>(averaged);
        r.mean_curvature_second_moment = kappa_sq / static_cast<double>(averaged);
        r.mean_curvature_variance = variance / static_cast<double>(averaged);
    }
    r.final_stats = collect_stats(agents);
    r.final_agents = std::move(agents);
    return r;
}

void write_trajectory_header(std::ostream& out, const std::string& comment)
{
    if (!comment.empty()) {
        out << "# " << comment << '\n';
    }
    out << "t,agent_id,x1,x2,theta,kappa\n";
}

void write_trajectory_rows(std::ostream& out, double t, std::span<const AgentState> agents)
{
    const std::string ts = format_double(t);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const AgentState& a = agents[i];
        out << ts << ',' << i << ',' << format_double(a.x[0]) << ',' << format_double(a.x[1]) << ','
            << format_double(a.theta) << ',' << format_double(a.kappa) << '\n';
    }
}

void write_stats_csv(std::ostream& out, const std::vector<StatsSample>& series, const std::string& comment)
{
    if (!comment.empty()) {
        out << "# " << comment << '\n';
    }
    out << "t,order_parameter,mean_direction,curvature_variance\n";
    for (const StatsSample& s : series) {
        out << format_double(s.t) << ',' << format_double(s.order_parameter) << ','
            << format_double(s.mean_direction) << ',' << format_double(s.curvature_variance) << '\n';
    }
}

} // namespace ptwa
