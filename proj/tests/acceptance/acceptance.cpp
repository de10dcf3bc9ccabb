// Acceptance runner: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the listed numbers. Exit status is non-zero
// when any selected criterion fails.

#include "ptwa/equilibrium.hpp"
#include "ptwa/gci_spectral.hpp"
#include "ptwa/hydrodynamics.hpp"
#include "ptwa/kinetic_grid.hpp"
#include "ptwa/mc_oracle.hpp"
#include "ptwa/particle_sim.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ptwa;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double fd_residual(int m, int n, double lambda, double alpha)
{
    const SpectralParams sp(m, n, ModelParams(lambda, alpha));
    const GciSolution sol = solve_gci(sp);
    return residual_inf(reconstruct_on_grid(sol.coeffs, sp, Grid2D::with_spacing(0.2)), sp.model());
}

// 1. Q of rho * mu converges to zero at second order.
Outcome equilibrium_residual()
{
    const ModelParams p(1, 1);
    const double rho = 1.7;
    const double tb = 0.4;
    auto f = [&](double t, double k) { return rho * mu_pdf(p, wrap_angle(t - tb), k); };
    const double r1 = apply_Q(GridField::sample(Grid2D::with_spacing(0.2), f), tb, p).interior_sup_norm();
    const double r2 = apply_Q(GridField::sample(Grid2D::with_spacing(0.1), f), tb, p).interior_sup_norm();
    const double ratio = r1 / r2;
    return {ratio >= 3.2 && ratio <= 4.8,
            fmt("sup|Q| %.3e -> %.3e, ratio %.3f (want [3.2, 4.8])", r1, r2, ratio)};
}

// 2. FD residual of the (30,61) solution and monotone refinement.
Outcome gci_reproduction()
{
    const double r10 = fd_residual(10, 21, 1, 1);
    const double r20 = fd_residual(20, 41, 1, 1);
    const double r30 = fd_residual(30, 61, 1, 1);
    const bool monotone = r10 > r20 && r20 > r30;
    const bool target = r30 <= 0.05;
    return {monotone, fmt("residual (10,21) %.9f > (20,41) %.9f > (30,61) %.9f: %s; target <= 0.05 %s", r10,
                          r20, r30, monotone ? "monotone" : "NOT monotone", target ? "met" : "missed")};
}

// 3. Residual trends over the 3 x 3 grid.
Outcome residual_trends()
{
    const double vals[] = {0.5, 1.0, 2.0};
    double r[3][3];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            r[i][j] = fd_residual(30, 61, vals[i], vals[j]);
        }
    }
    bool up_alpha = true;
    bool down_lambda = true;
    std::ostringstream table;
    for (int i = 0; i < 3; ++i) {
        table << " lambda=" << vals[i] << ":";
        for (int j = 0; j < 3; ++j) {
            table << ' ' << fmt("%.4f", r[i][j]);
            if (j > 0 && !(r[i][j] > r[i][j - 1])) {
                up_alpha = false;
            }
            if (i > 0 && !(r[i][j] < r[i - 1][j])) {
                down_lambda = false;
            }
        }
        table << ';';
    }
    return {up_alpha && down_lambda,
            fmt("increasing in alpha %s, decreasing in lambda %s;", up_alpha ? "yes" : "no",
                down_lambda ? "yes" : "no")
                + table.str()};
}

// 4. Kronecker and stencil assemblies agree.
Outcome assembly_oracle()
{
    double worst = 0.0;
    for (auto [m, n] : {std::pair{1, 2}, {3, 4}, {5, 6}}) {
        const SpectralParams sp(m, n, ModelParams(1, 1));
        worst = std::max(worst, (kronecker_operator(sp) - stencil_galerkin_matrix(sp)).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-12, fmt("max entry difference %.3e (want <= 1e-12)", worst)};
}

// 5. Coefficient and reconstruction symmetries.
Outcome symmetry_suite()
{
    const SpectralParams sp(30, 61, ModelParams(1, 1));
    const GciSolution sol = solve_gci(sp);
    const double parity = sol.coeffs.parity_defect();
    const double reality = sol.coeffs.reality_defect();
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> t(-pi, pi);
    std::uniform_real_distribution<double> k(-5.0, 5.0);
    double odd = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double th = t(gen);
        const double ka = k(gen);
        odd = std::max(odd, std::abs(reconstruct_psi(sol.coeffs, sp, th, ka)
                                     + reconstruct_psi(sol.coeffs, sp, -th, -ka)));
    }
    return {parity <= 1e-8 && reality <= 1e-8 && odd <= 1e-8,
            fmt("parity %.2e, reality %.2e, |psi(x)+psi(-x)| %.2e (want <= 1e-8)", parity, reality, odd)};
}

// 6. Spectral and Feynman-Kac solutions agree.
Outcome oracle_equivalence()
{
    const SpectralParams sp(30, 61, ModelParams(1, 1));
    const GciSolution sol = solve_gci(sp);
    OracleConfig cfg;
    cfg.paths = 100000;
    cfg.dt = 5e-3;
    cfg.t_final = 40.0;
    cfg.seed = 1;
    std::vector<Probe> probes;
    for (double th : {-1.0, 0.0, 1.0}) {
        for (double ka : {-1.0, 0.0, 1.0}) {
            probes.push_back({th, ka});
        }
    }
    const auto est = feynman_kac_psi(cfg, probes);
    bool probes_ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const double spectral = reconstruct_psi(sol.coeffs, sp, probes[i].theta, probes[i].kappa);
        // The MC error is only part of the combined error; (0,0) is exactly zero by antithetic pairing.
        const double tol = 3.0 * est[i].std_error + 1e-8;
        const double diff = std::abs(spectral - est[i].estimate);
        worst = std::max(worst, diff / tol);
        probes_ok = probes_ok && diff <= tol;
    }
    OracleConfig c2cfg = cfg;
    c2cfg.paths = 6000;
    c2cfg.seed = 2;
    const McC2Result mc = mc_c2(c2cfg, 12, 6);
    const double c2 = c2_coefficient(sol.coeffs, sp);
    const double rel = std::abs(mc.c2 - c2) / std::abs(c2);
    return {probes_ok && rel <= 0.05,
            fmt("9 probes, worst |diff| / (3 se) %.3f; c2 spectral %.5f vs MC %.5f +- %.5f, rel %.4f (want <= 0.05)",
                worst, c2, mc.c2, mc.std_error, rel)};
}

// 7. Closed-form c1.
Outcome c1_closed_form()
{
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> par(0.2, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const ModelParams p(par(gen), par(gen));
        const std::size_t nodes = p.concentration() > 100.0 ? 4096 : 1024;
        worst = std::max(worst, std::abs(c1_coefficient(p) - c1_quadrature(p, nodes)));
    }
    // I1(1)/I0(1) from the power series of both Bessel functions.
    double i0 = 0.0;
    double i1 = 0.0;
    double term0 = 1.0;
    double term1 = 0.5;
    for (int k = 0; k < 30; ++k) {
        i0 += term0;
        i1 += term1;
        term0 *= 0.25 / ((k + 1.0) * (k + 1.0));
        term1 *= 0.25 / ((k + 1.0) * (k + 2.0));
    }
    const double c11 = c1_coefficient(ModelParams(1, 1));
    return {worst <= 1e-10 && std::abs(c11 - 0.44639) <= 1e-5 && std::abs(c11 - i1 / i0) <= 1e-14,
            fmt("max |Bessel - quadrature| %.2e; c1(1,1) = %.8f, series %.8f", worst, c11, i1 / i0)};
}

// 8. Hyperbolicity over the parameter grid.
Outcome hyperbolicity()
{
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            pairs.emplace_back(0.2 + 1.2 * i, 0.2 + 1.2 * j);
        }
    }
    const auto rows = sweep_coefficients(pairs, 20, 41);
    int computed = 0;
    int hyperbolic = 0;
    double root_err = 0.0;
    for (const SweepRow& r : rows) {
        if (!r.error.empty()) {
            continue;
        }
        ++computed;
        const HydroCoeffs h(r.c1, r.c2, r.d, r.gamma1, r.gamma2);
        hyperbolic += hyperbolicity_check(h, 64);
        const CharacteristicSpeeds s = characteristic_speeds(h, 0.0);
        root_err = std::max(root_err, std::abs(s.slow - std::min(h.c1(), h.c2())));
        root_err = std::max(root_err, std::abs(s.fast - std::max(h.c1(), h.c2())));
    }
    return {computed == 25 && hyperbolic == 25 && root_err <= 1e-14,
            fmt("%d/25 solved, %d hyperbolic, theta=0 roots off by %.1e", computed, hyperbolic, root_err)};
}

// 9. Particle system relaxes to the kinetic equilibrium.
Outcome particle_equilibrium()
{
    SimConfig cfg;
    cfg.n_agents = 5000;
    cfg.box_size = 10.0;
    cfg.radius = 7.1;
    cfg.model = ModelParams(1, 1);
    cfg.dt = 5e-3;
    cfg.seed = 11;
    RunOptions opts;
    opts.t_final = 200.0;
    opts.stats_stride = 20;
    const RunResult r = run_simulation(cfg, opts);
    const double c1 = c1_coefficient(cfg.model);
    const double var = r.mean_curvature_variance;
    const double order = r.mean_order_parameter;
    const auto probs = von_mises_bin_probabilities(cfg.model, kAngleBins);
    const double chi2 = chi_square_statistic(r.final_stats.relative_angle_histogram, probs);
    const boost::math::chi_squared dist(static_cast<double>(kAngleBins - 1));
    const double critical = boost::math::quantile(dist, 0.99);
    const bool ok = std::abs(var - 1.0) <= 0.05 && std::abs(order - c1) <= 0.05 * c1 && chi2 <= critical;
    return {ok, fmt("global coupling: <Var kappa> %.4f (1 +- 5%%), <order> %.4f (c1 %.4f +- 5%%), chi2 %.2f "
                    "(critical %.2f, %zu dof)",
                    var, order, c1, chi2, critical, kAngleBins - 1)};
}

// 10. Every CLI subcommand is bit-reproducible.
std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli_determinism()
{
    const std::string cli = PTWA_CLI_PATH;
    std::ofstream("acc_sim.json") << R"({"n_agents": 200, "t_final": 2, "seed": 3, "stride": 100})";
    struct Run
    {
        std::string args;
        std::vector<std::string> files;
    };
    const std::vector<Run> runs{
        {"gci --lambda 1 --alpha 1 -m 10 -n 21 --out acc_gciX", {"acc_gciX_coeffs.csv", "acc_gciX_psi.csv"}},
        {"residual --lambda 0.5,1 --alpha 1,2 -m 6 -n 12 --out acc_resX.csv", {"acc_resX.csv"}},
        {"coeffs --lambda 1 --alpha-range 0.8:1.2:0.2 -m 6 -n 12 --mc-check --mc-paths 200 --mc-theta 6 "
         "--mc-kappa 3 --seed 5 --out acc_coeffsX.csv",
         {"acc_coeffsX.csv"}},
        {"simulate --config acc_sim.json --out acc_simX.csv --trajectory acc_trajX.csv",
         {"acc_simX.csv", "acc_trajX.csv"}},
    };
    int identical = 0;
    int total = 0;
    std::string bad;
    for (const Run& run : runs) {
        std::string contents[2][2];
        bool ran = true;
        for (int rep = 0; rep < 2; ++rep) {
            std::string args = run.args;
            for (std::size_t p; (p = args.find('X')) != std::string::npos;) {
                args.replace(p, 1, std::to_string(rep));
            }
            ran = ran && std::system((cli + " " + args + " > /dev/null 2>&1").c_str()) == 0;
            for (std::size_t f = 0; f < run.files.size(); ++f) {
                std::string name = run.files[f];
                name.replace(name.find('X'), 1, std::to_string(rep));
                contents[rep][f] = slurp(name);
            }
        }
        for (std::size_t f = 0; f < run.files.size(); ++f) {
            ++total;
            if (ran && !contents[0][f].empty() && contents[0][f] == contents[1][f]) {
                ++identical;
            } else {
                bad += " " + run.files[f];
            }
        }
    }
    return {identical == total, fmt("%d/%d output files bit-identical", identical, total) + bad};
}

} // namespace

int main(int argc, char** argv)
{
    struct Criterion
    {
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::map<int, Criterion> criteria{
        {1, {"equilibrium residual", 1.0, equilibrium_residual}},
        {2, {"GCI reproduction", 120.0, gci_reproduction}},
        {3, {"residual trends", 1200.0, residual_trends}},
        {4, {"assembly oracle", 1.0, assembly_oracle}},
        {5, {"symmetry suite", 120.0, symmetry_suite}},
        {6, {"oracle equivalence", 600.0, oracle_equivalence}},
        {7, {"c1 closed form", 60.0, c1_closed_form}},
        {8, {"hyperbolicity", 600.0, hyperbolicity}},
        {9, {"particle equilibrium", 300.0, particle_equilibrium}},
        {10, {"determinism", 600.0, cli_determinism}},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.push_back(std::atoi(argv[i]));
    }
    if (selected.empty()) {
        for (const auto& [id, c] : criteria) {
            selected.push_back(id);
        }
    }
    int failures = 0;
    for (int id : selected) {
        const auto it = criteria.find(id);
        if (it == criteria.end()) {
            std::cerr << "unknown criterion " << id << '\n';
            return 2;
        }
        const Criterion& c = it->second;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = out.pass && in_time;
        failures += !pass;
        std::cout << "criterion " << id << " (" << c.name << "): " << (pass ? "PASS" : "FAIL") << " | "
                  << out.detail << " | " << fmt("%.2f s of %.0f s", secs, c.budget_s)
                  << (in_time ? "" : " OVER BUDGET") << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
