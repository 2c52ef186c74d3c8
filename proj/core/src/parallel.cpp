#include "scramble/parallel.hpp"

#include <cstdlib>
#include <string>

namespace scramble {

std::size_t resolve_thread_count(std::size_t requested) {
  std::size_t cap = 0;
  if (const char* env = std::getenv("SCRAMBLE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) cap = static_cast<std::size_t>(v);
    } catch (...) {
      // unparsable value: ignored
    }
  }
  std::size_t n = requested;
  if (n == 0) n = cap != 0 ? cap : std::max(1u, std::thread::hardware_concurrency());
  if (cap != 0) n = std::min(n, cap);
  return std::max<std::size_t>(1, n);
}

}  // namespace scramble
