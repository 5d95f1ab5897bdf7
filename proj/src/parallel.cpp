#include "cssdpp/parallel.hpp"

#include <cstdlib>
#include <string>

namespace cssdpp {

unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CSSDPP_THREADS")) {
    try {
      const long cap = std::stol(env);
      // An explicit value wins even above the core count, so thread-count
      // independence can be exercised on small machines.
      if (cap >= 1) {
        n = static_cast<unsigned>(std::min(cap, 256L));
      }
    } catch (...) {
      // Unparseable values are ignored.
    }
  }
  return n;
}

}  // namespace cssdpp
