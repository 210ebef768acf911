#include "banach/parallel.hpp"

#include <cstdlib>
#include <string>

namespace banach {

unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BANACH_REDUCE_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap > 0) return static_cast<unsigned>(cap);
    } catch (...) {
      // unparsable values fall back to the hardware count
    }
  }
  return hw;
}

}  // namespace banach
