#include "ptwa/special_functions.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ptwa {

namespace {

constexpr double kSeriesCutoff = 20.0;

// Sum_k (x/2)^{2k+nu} / (k! (k+nu)!), all terms positive.
double bessel_series(int nu, double x)
{
    if (x == 0.0) {
        return nu == 0 ? 1.0 : 0.0;
    }
    const double half = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= nu; ++i) {
        term *= half / i;
    }
    const double q = half * half;
    double sum = term;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<double>(k) * (k + nu));
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return sum;
}

void check_argument(double x)
{
    if (!(x >= 0.0)) {
        throw std::domain_error("bessel_i: argument must be non-negative, got " + std::to_string(x));
    }
}

// Miller backward recurrence normalized by e^{-x}(I_0 + 2 sum_k I_k) = 1.
std::vector<double> miller_scaled(int max_order, double x)
{
    const int start =
        max_order + static_cast<int>(std::ceil(std::sqrt(100.0 * x))) + 30;
    constexpr double big = 1e250;
    constexpr double small = 1e-250;

    std::vector<double> values(static_cast<std::size_t>(max_order) + 1, 0.0);
    const double two_over_x = 2.0 / x;
    double next = 0.0;    // I_{j+1}
    double current = 1.0; // I_j, starting at j = start
    double sum = 2.0 * current;
    for (int j = start; j > 0; --j) {
        const double previous = next + j * two_over_x * current;
        next = current;
        current = previous;
        if (current > big) {
            current *= small;
            next *= small;
            sum *= small;
            for (double& v : values) {
                v *= small;
            }
        }
        const int index = j - 1;
        if (index <= max_order) {
            values[static_cast<std::size_t>(index)] = current;
        }
        sum += (index == 0 ? 1.0 : 2.0) * current;
    }
    for (double& v : values) {
        v /= sum;
    }
    return values;
}

} // namespace

BesselOrder::BesselOrder(int order)
    : order_(order)
{
    if (order < 0) {
        throw std::domain_error("BesselOrder: order must be non-negative");
    }
}

double bessel_i(BesselOrder order, double x)
{
    check_argument(x);
    if (x <= kSeriesCutoff) {
        return bessel_series(order.value(), x);
    }
    return std::exp(x) * miller_scaled(order.value(), x).back();
}

double bessel_i_scaled(BesselOrder order, double x)
{
    check_argument(x);
    if (x <= kSeriesCutoff) {
        return std::exp(-x) * bessel_series(order.value(), x);
    }
    return miller_scaled(order.value(), x).back();
}

std::vector<double> bessel_i_scaled_sequence(int max_order, double x)
{
    check_argument(x);
    if (max_order < 0) {
        throw std::domain_error("bessel_i_scaled_sequence: negative order");
    }
    if (x <= kSeriesCutoff) {
        std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
        const double scale = std::exp(-x);
        for (int k = 0; k <= max_order; ++k) {
            out[static_cast<std::size_t>(k)] = scale * bessel_series(k, x);
        }
        return out;
    }
    return miller_scaled(max_order, x);
}

double hermite_p(int n, double lambda, double alpha, double kappa)
{
    return hermite_p_all(n, lambda, alpha, kappa).back();
}

std::vector<double> hermite_p_all(int n, double lambda, double alpha, double kappa)
{
    if (n < 0) {
        throw std::domain_error("hermite_p: degree must be non-negative");
    }
    const double x = std::sqrt(lambda) / alpha * kappa;
    std::vector<double> p(static_cast<std::size_t>(n) + 1);
    p[0] = 1.0;
    if (n >= 1) {
        p[1] = x;
    }
    // He_{k+1} = x He_k - k He_{k-1}, with the 1/sqrt(k!) folded in per step.
    for (int k = 1; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        p[ku + 1] = (x * p[ku] - std::sqrt(static_cast<double>(k)) * p[ku - 1])
                    / std::sqrt(static_cast<double>(k + 1));
    }
    return p;
}

QuadratureRule gauss_hermite_rule(std::size_t points)
{
    if (points == 0) {
        throw std::invalid_argument("gauss_hermite_rule: need at least one node");
    }
    const auto n = static_cast<Eigen::Index>(points);
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
        jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);

    QuadratureRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        rule.nodes[iu] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[iu] = v0 * v0;
    }
    // Exact antisymmetry of the nodes keeps odd integrands at zero.
    for (std::size_t i = 0; i < points / 2; ++i) {
        const std::size_t j = points - 1 - i;
        const double node = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double weight = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -node;
        rule.nodes[j] = node;
        rule.weights[i] = rule.weights[j] = weight;
    }
    if (points % 2 == 1) {
        rule.nodes[points / 2] = 0.0;
    }
    return rule;
}

} // namespace ptwa
