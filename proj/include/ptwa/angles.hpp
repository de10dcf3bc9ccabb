#ifndef PTWA_ANGLES_HPP
#define PTWA_ANGLES_HPP

#include <array>
#include <cmath>
#include <numbers>

namespace ptwa {

using Vec2 = std::array<double, 2>;

/// Wrap to the canonical interval (-pi, pi].
inline double wrap_angle(double theta)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(theta, two_pi); // [-pi, pi]
    if (r <= -std::numbers::pi) {
        r += two_pi;
    }
    return r;
}

/// Unit heading vector tau(theta).
inline Vec2 heading(double theta)
{
    return {std::cos(theta), std::sin(theta)};
}

} // namespace ptwa

#endif // PTWA_ANGLES_HPP
