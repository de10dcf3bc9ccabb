// ptwa: command-line front end for the toolkit.

#include "ptwa/csv.hpp"
#include "ptwa/equilibrium.hpp"
#include "ptwa/gci_spectral.hpp"
#include "ptwa/hydrodynamics.hpp"
#include "ptwa/kinetic_grid.hpp"
#include "ptwa/mc_oracle.hpp"
#include "ptwa/parallel.hpp"
#include "ptwa/particle_sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumeric = 2;

// Thrown for anything the user can fix by changing flags or config.
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_range(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        parts.push_back(item);
    }
    if (parts.size() != 3) {
        throw UsageError("range must be start:stop:step, got '" + text + "'");
    }
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
    try {
        start = std::stod(parts[0]);
        stop = std::stod(parts[1]);
        step = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw UsageError("range '" + text + "' is not numeric");
    }
    if (!(step > 0.0) || !(stop >= start)) {
        throw UsageError("range '" + text + "' is empty");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = start + step * static_cast<double>(i);
    }
    return out;
}

std::vector<double> values_from(const std::vector<double>& list, const std::string& range,
                                const std::string& name)
{
    if (!list.empty() && !range.empty()) {
        throw UsageError("give either --" + name + " or --" + name + "-range, not both");
    }
    std::vector<double> v = range.empty() ? list : parse_range(range);
    if (v.empty()) {
        throw UsageError("no values for " + name);
    }
    for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw UsageError(name + " values must be positive");
        }
    }
    return v;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw UsageError("cannot open '" + path + "' for writing");
    }
    return out;
}

ptwa::ModelParams model_from(double lambda, double alpha)
{
    try {
        return ptwa::ModelParams(lambda, alpha);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

ptwa::SpectralParams spectral_from(int m, int n, const ptwa::ModelParams& model)
{
    try {
        return ptwa::SpectralParams(m, n, model);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::string fmt(double x)
{
    return ptwa::format_double(x);
}

// ---------------------------------------------------------------- gci

struct GciArgs
{
    double lambda = 1.0;
    double alpha = 1.0;
    int m = 30;
    int n = 61;
    double grid_step = 0.2;
    std::string out = "gci";
};

int run_gci(const GciArgs& a)
{
    const ptwa::SpectralParams sp = spectral_from(a.m, a.n, model_from(a.lambda, a.alpha));
    if (!(a.grid_step > 0.0)) {
        throw UsageError("grid step must be positive");
    }
    const ptwa::Grid2D grid = ptwa::Grid2D::with_spacing(a.grid_step);
    const ptwa::GciSolution sol = ptwa::solve_gci(sp);
    const ptwa::GridField psi = ptwa::reconstruct_on_grid(sol.coeffs, sp, grid);
    const double residual = ptwa::residual_inf(psi, sp.model());

    const std::string comment = "gci lambda=" + fmt(a.lambda) + " alpha=" + fmt(a.alpha)
                                + " m=" + std::to_string(a.m) + " n=" + std::to_string(a.n)
                                + " grid_step=" + fmt(a.grid_step) + " method=" + ptwa::to_string(sol.method);
    {
        std::ofstream out = open_output(a.out + "_coeffs.csv");
        sol.coeffs.write_csv(out, comment);
    }
    {
        std::ofstream out = open_output(a.out + "_psi.csv");
        psi.write_csv(out, comment);
    }
    std::cout << "method " << ptwa::to_string(sol.method) << '\n'
              << "algebraic_residual " << fmt(sol.algebraic_residual) << '\n'
              << "condition_estimate " << fmt(sol.condition_estimate) << '\n'
              << "fd_residual_inf " << fmt(residual) << '\n'
              << "wrote " << a.out << "_coeffs.csv " << a.out << "_psi.csv\n";
    return kOk;
}

// ----------------------------------------------------------- residual

struct ResidualArgs
{
    std::vector<double> lambdas;
    std::vector<double> alphas;
    std::string lambda_range;
    std::string alpha_range;
    int m = 30;
    int n = 61;
    double grid_step = 0.2;
    std::string out = "residual.csv";
    bool check = false;
};

struct ResidualRow
{
    double lambda = 0.0;
    double alpha = 0.0;
    double residual = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

bool check_trends(const std::vector<double>& lambdas, const std::vector<double>& alphas,
                  const std::vector<ResidualRow>& rows)
{
    const std::size_t na = alphas.size();
    bool ok = true;
    auto at = [&](std::size_t il, std::size_t ia) { return rows[il * na + ia].residual; };
    for (std::size_t il = 0; il < lambdas.size(); ++il) {
        for (std::size_t ia = 0; ia + 1 < na; ++ia) {
            if (!(at(il, ia + 1) > at(il, ia))) {
                std::cerr << "trend: residual not increasing in alpha at lambda=" << fmt(lambdas[il])
                          << " between alpha=" << fmt(alphas[ia]) << " and " << fmt(alphas[ia + 1]) << '\n';
                ok = false;
            }
        }
    }
    for (std::size_t ia = 0; ia < na; ++ia) {
        for (std::size_t il = 0; il + 1 < lambdas.size(); ++il) {
            if (!(at(il + 1, ia) < at(il, ia))) {
                std::cerr << "trend: residual not decreasing in lambda at alpha=" << fmt(alphas[ia])
                          << " between lambda=" << fmt(lambdas[il]) << " and " << fmt(lambdas[il + 1]) << '\n';
                ok = false;
            }
        }
    }
    return ok;
}

int run_residual(ResidualArgs a)
{
    if (a.lambdas.empty() && a.lambda_range.empty()) {
        a.lambdas = {0.5, 1.0, 2.0};
    }
    if (a.alphas.empty() && a.alpha_range.empty()) {
        a.alphas = {0.5, 1.0, 2.0};
    }
    const auto lambdas = values_from(a.lambdas, a.lambda_range, "lambda");
    const auto alphas = values_from(a.alphas, a.alpha_range, "alpha");
    spectral_from(a.m, a.n, model_from(1.0, 1.0));
    if (!(a.grid_step > 0.0)) {
        throw UsageError("grid step must be positive");
    }
    const ptwa::Grid2D grid = ptwa::Grid2D::with_spacing(a.grid_step);

    std::vector<ResidualRow> rows;
    for (double l : lambdas) {
        for (double al : alphas) {
            rows.push_back({l, al});
        }
    }
    ptwa::parallel_for(rows.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            try {
                const ptwa::SpectralParams sp(a.m, a.n, ptwa::ModelParams(rows[r].lambda, rows[r].alpha));
                const ptwa::GciSolution sol = ptwa::solve_gci(sp);
                rows[r].residual = ptwa::residual_inf(ptwa::reconstruct_on_grid(sol.coeffs, sp, grid), sp.model());
            } catch (const std::exception& e) {
                rows[r].error = e.what();
            }
        }
    });

    std::ofstream out = open_output(a.out);
    out << "# residual m=" << a.m << " n=" << a.n << " grid_step=" << fmt(a.grid_step) << '\n';
    out << "lambda,alpha,residual_inf\n";
    for (const ResidualRow& r : rows) {
        out << fmt(r.lambda) << ',' << fmt(r.alpha) << ',' << fmt(r.residual) << '\n';
        if (!r.error.empty()) {
            std::cerr << "lambda=" << fmt(r.lambda) << " alpha=" << fmt(r.alpha) << ": " << r.error << '\n';
        }
    }
    std::cout << "wrote " << rows.size() << " rows to " << a.out << '\n';
    if (a.check && !check_trends(lambdas, alphas, rows)) {
        std::cout << "trend check FAILED\n";
        return kNumeric;
    }
    if (a.check) {
        std::cout << "trend check passed\n";
    }
    return kOk;
}

// ------------------------------------------------------------- coeffs

struct CoeffsArgs
{
    double lambda = 1.0;
    std::string alpha_range = "0.4:2.0:0.2";
    int m = 30;
    int n = 61;
    std::string out = "coeffs.csv";
    bool mc_check = false;
    std::size_t mc_paths = 2000;
    std::uint64_t seed = 0;
    std::size_t mc_theta = 12;
    std::size_t mc_kappa = 6;
};

int run_coeffs(const CoeffsArgs& a)
{
    model_from(a.lambda, 1.0);
    const auto alphas = values_from({}, a.alpha_range, "alpha");
    spectral_from(a.m, a.n, model_from(a.lambda, 1.0));
    if (a.mc_check && (a.mc_paths < 2 || a.mc_theta < 2 || a.mc_kappa < 1)) {
        throw UsageError("mc-check needs at least 2 paths and a non-empty grid");
    }

    std::vector<std::pair<double, double>> pairs;
    for (double al : alphas) {
        pairs.emplace_back(a.lambda, al);
    }
    const auto rows = ptwa::sweep_coefficients(pairs, a.m, a.n);

    std::vector<ptwa::McC2Result> mc(rows.size());
    if (a.mc_check) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            ptwa::OracleConfig cfg;
            cfg.model = ptwa::ModelParams(rows[r].lambda, rows[r].alpha);
            cfg.dt = std::min(5e-3, 0.01 * std::min(1.0, 1.0 / rows[r].lambda));
            cfg.t_final = std::max(40.0, 10.0 / rows[r].lambda);
            cfg.paths = a.mc_paths;
            cfg.seed = a.seed;
            mc[r] = ptwa::mc_c2(cfg, a.mc_theta, a.mc_kappa);
        }
    }

    std::ofstream out = open_output(a.out);
    out << "# coeffs lambda=" << fmt(a.lambda) << " alpha_range=" << a.alpha_range << " m=" << a.m
        << " n=" << a.n;
    if (a.mc_check) {
        out << " mc_paths=" << a.mc_paths << " seed=" << a.seed << " mc_grid=" << a.mc_theta << 'x'
            << a.mc_kappa;
    }
    out << '\n';
    out << "lambda,alpha,c1,c2,gamma1,gamma2,d";
    if (a.mc_check) {
        out << ",mc_c2,mc_stderr,mc_agree";
    }
    out << '\n';
    bool all_agree = true;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const ptwa::SweepRow& s = rows[r];
        out << fmt(s.lambda) << ',' << fmt(s.alpha) << ',' << fmt(s.c1) << ',' << fmt(s.c2) << ','
            << fmt(s.gamma1) << ',' << fmt(s.gamma2) << ',' << fmt(s.d);
        if (a.mc_check) {
            const double tol = std::max(0.05 * std::abs(s.c2), 3.0 * mc[r].std_error);
            const bool agree = std::abs(s.c2 - mc[r].c2) <= tol;
            all_agree = all_agree && agree;
            out << ',' << fmt(mc[r].c2) << ',' << fmt(mc[r].std_error) << ',' << (agree ? 1 : 0);
        }
        out << '\n';
        if (!s.error.empty()) {
            std::cerr << "alpha=" << fmt(s.alpha) << ": " << s.error << '\n';
        }
    }
    std::cout << "wrote " << rows.size() << " rows to " << a.out << '\n';
    if (a.mc_check) {
        std::cout << "mc check " << (all_agree ? "agrees" : "DISAGREES") << " on all rows\n";
    }
    return kOk;
}

// ----------------------------------------------------------- simulate

struct SimulateArgs
{
    std::string config;
    std::string out = "stats.csv";
    std::string trajectory;
};

template <typename T>
T json_field(const nlohmann::json& j, const char* key, T fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw UsageError(std::string("config field '") + key + "' has the wrong type");
    }
}

int run_simulate(const SimulateArgs& a)
{
    std::ifstream in(a.config);
    if (!in) {
        throw UsageError("cannot read config '" + a.config + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw UsageError("config must be a JSON object");
    }
    static const char* const known[] = {"n_agents", "box", "radius", "lambda", "alpha", "dt",
                                        "t_final", "seed", "stride", "stats_stride", "include_self"};
    for (const auto& item : j.items()) {
        if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
            throw UsageError("unknown config field '" + item.key() + "'");
        }
    }

    ptwa::SimConfig cfg;
    const auto n_agents = json_field<long long>(j, "n_agents", 1000);
    if (n_agents <= 0) {
        throw UsageError("n_agents must be positive");
    }
    cfg.n_agents = static_cast<std::size_t>(n_agents);
    cfg.box_size = json_field<double>(j, "box", 10.0);
    cfg.radius = json_field<double>(j, "radius", 1.0);
    cfg.model = model_from(json_field<double>(j, "lambda", 1.0), json_field<double>(j, "alpha", 1.0));
    cfg.dt = json_field<double>(j, "dt", 5e-3);
    cfg.seed = json_field<std::uint64_t>(j, "seed", 0);
    cfg.include_self = json_field<bool>(j, "include_self", true);
    ptwa::RunOptions opts;
    opts.t_final = json_field<double>(j, "t_final", 10.0);
    const auto stride = json_field<long long>(j, "stride", 0);
    const auto stats_stride = json_field<long long>(j, "stats_stride", 10);
    if (stride < 0 || stats_stride <= 0 || !(opts.t_final > 0.0)) {
        throw UsageError("need stride >= 0, stats_stride > 0 and t_final > 0");
    }
    opts.trajectory_stride = static_cast<std::size_t>(stride);
    opts.stats_stride = static_cast<std::size_t>(stats_stride);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const std::string comment = "simulate " + j.dump();
    std::ofstream traj;
    if (!a.trajectory.empty()) {
        if (opts.trajectory_stride == 0) {
            opts.trajectory_stride = 1;
        }
        traj = open_output(a.trajectory);
        ptwa::write_trajectory_header(traj, comment);
        opts.trajectory = &traj;
    }
    std::ofstream out = open_output(a.out);

    const ptwa::RunResult r = ptwa::run_simulation(cfg, opts);
    ptwa::write_stats_csv(out, r.series, comment);

    std::cout << "final order_parameter " << fmt(r.final_stats.order_parameter) << " (c1 "
              << fmt(ptwa::c1_coefficient(cfg.model)) << ")\n"
              << "final curvature_variance " << fmt(r.final_stats.curvature_variance) << " (alpha^2/lambda "
              << fmt(cfg.model.kappa_variance()) << ")\n"
              << "time-averaged order_parameter " << fmt(r.mean_order_parameter) << '\n'
              << "time-averaged curvature_variance " << fmt(r.mean_curvature_variance) << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"PTWA toolkit: collisional invariants, hydrodynamic coefficients, particle runs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ptwa 1.0");

    GciArgs gci;
    auto* gci_cmd = app.add_subcommand("gci", "Solve the GCI Galerkin system and write coefficients and psi");
    gci_cmd->add_option("--lambda", gci.lambda, "relaxation rate")->capture_default_str();
    gci_cmd->add_option("--alpha", gci.alpha, "noise intensity")->capture_default_str();
    gci_cmd->add_option("-m", gci.m, "Fourier half-width")->capture_default_str();
    gci_cmd->add_option("-n", gci.n, "Hermite truncation")->capture_default_str();
    gci_cmd->add_option("--grid-step", gci.grid_step, "spacing of the psi grid")->capture_default_str();
    gci_cmd->add_option("--out", gci.out, "output prefix")->capture_default_str();

    ResidualArgs res;
    auto* res_cmd = app.add_subcommand("residual", "Finite-difference residual of the GCI over (lambda, alpha)");
    res_cmd->add_option("--lambda", res.lambdas, "lambda values")->delimiter(',');
    res_cmd->add_option("--alpha", res.alphas, "alpha values")->delimiter(',');
    res_cmd->add_option("--lambda-range", res.lambda_range, "start:stop:step");
    res_cmd->add_option("--alpha-range", res.alpha_range, "start:stop:step");
    res_cmd->add_option("-m", res.m, "Fourier half-width")->capture_default_str();
    res_cmd->add_option("-n", res.n, "Hermite truncation")->capture_default_str();
    res_cmd->add_option("--grid-step", res.grid_step, "finite-difference spacing")->capture_default_str();
    res_cmd->add_option("--out", res.out, "output CSV")->capture_default_str();
    res_cmd->add_flag("--check", res.check, "require increase in alpha and decrease in lambda");

    CoeffsArgs co;
    auto* co_cmd = app.add_subcommand("coeffs", "Hydrodynamic coefficients along an alpha range");
    co_cmd->add_option("--lambda", co.lambda, "relaxation rate")->capture_default_str();
    co_cmd->add_option("--alpha-range", co.alpha_range, "start:stop:step")->capture_default_str();
    co_cmd->add_option("-m", co.m, "Fourier half-width")->capture_default_str();
    co_cmd->add_option("-n", co.n, "Hermite truncation")->capture_default_str();
    co_cmd->add_option("--out", co.out, "output CSV")->capture_default_str();
    co_cmd->add_flag("--mc-check", co.mc_check, "compare c2 with the Monte-Carlo oracle");
    co_cmd->add_option("--mc-paths", co.mc_paths, "Brownian paths for --mc-check")->capture_default_str();
    co_cmd->add_option("--mc-theta", co.mc_theta, "theta nodes of the MC quadrature")->capture_default_str();
    co_cmd->add_option("--mc-kappa", co.mc_kappa, "kappa nodes of the MC quadrature")->capture_default_str();
    co_cmd->add_option("--seed", co.seed, "Monte-Carlo seed")->capture_default_str();

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run the particle model from a JSON config");
    sim_cmd->add_option("--config", sim.config, "JSON config")->required();
    sim_cmd->add_option("--out", sim.out, "stats CSV")->capture_default_str();
    sim_cmd->add_option("--trajectory", sim.trajectory, "optional trajectory CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*gci_cmd) {
            return run_gci(gci);
        }
        if (*res_cmd) {
            return run_residual(res);
        }
        if (*co_cmd) {
            return run_coeffs(co);
        }
        if (*sim_cmd) {
            return run_simulate(sim);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumeric;
    }
    return kUsage;
}
