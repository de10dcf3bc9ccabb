#ifndef PTWA_PARALLEL_HPP
#define PTWA_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace ptwa {

/// Name of the environment variable holding the default worker count.
inline constexpr const char* kThreadsEnv = "PTWA_THREADS";

/// PTWA_THREADS when set to a positive integer, else hardware concurrency.
std::size_t default_thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, count). Chunk
/// boundaries depend only on `count` and `threads`; callers write results by
/// index so output never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t threads = default_thread_count());

} // namespace ptwa

#endif // PTWA_PARALLEL_HPP
