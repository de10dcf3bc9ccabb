#ifndef PTWA_CSV_HPP
#define PTWA_CSV_HPP

#include <string>

namespace ptwa {

/// Shortest round-trip text for a double ("nan" for NaN). Locale independent,
/// so repeated runs produce identical files.
std::string format_double(double value);

} // namespace ptwa

#endif // PTWA_CSV_HPP
