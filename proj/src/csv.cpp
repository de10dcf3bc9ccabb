#include "ptwa/csv.hpp"

#include <charconv>
#include <cmath>

namespace ptwa {

std::string format_double(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

} // namespace ptwa
