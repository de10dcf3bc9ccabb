#ifndef PTWA_SPECIAL_FUNCTIONS_HPP
#define PTWA_SPECIAL_FUNCTIONS_HPP

#include <cstddef>
#include <vector>

namespace ptwa {

/// Non-negative integer order of a modified Bessel function.
///
/// Negative orders are folded with I_{-n} = I_n through `from_signed`; the
/// plain constructor rejects them.
class BesselOrder
{
public:
    explicit BesselOrder(int order);

    static BesselOrder from_signed(int order) { return BesselOrder(order < 0 ? -order : order); }

    int value() const noexcept { return order_; }

private:
    int order_;
};

/// Modified Bessel function of the first kind I_n(x), x >= 0.
///
/// Power series for x <= 20, Miller backward recurrence above. Throws
/// std::domain_error for x < 0.
double bessel_i(BesselOrder order, double x);

/// Exponentially scaled I_n(x) * exp(-x). Finite for every x >= 0, so ratios
/// such as I_1/I_0 stay well defined for large concentrations.
double bessel_i_scaled(BesselOrder order, double x);

/// e^{-x} I_k(x) for k = 0..max_order in one backward sweep.
std::vector<double> bessel_i_scaled_sequence(int max_order, double x);

/// Normalized probabilists' Hermite polynomial
///   P_n(kappa) = He_n(sqrt(lambda)/alpha * kappa) / sqrt(n!),
/// orthonormal against the centred Gaussian of variance alpha^2/lambda.
double hermite_p(int n, double lambda, double alpha, double kappa);

/// P_0..P_n at one point, same normalization as hermite_p.
std::vector<double> hermite_p_all(int n, double lambda, double alpha, double kappa);

struct QuadratureRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss rule for the standard normal weight (probabilists' Hermite),
/// weights summing to one. Golub-Welsch on the Jacobi matrix.
QuadratureRule gauss_hermite_rule(std::size_t points);

} // namespace ptwa

#endif // PTWA_SPECIAL_FUNCTIONS_HPP
