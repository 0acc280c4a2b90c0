#include "rankfuse/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rankfuse {

unsigned default_thread_count() {
  if (const char *env = std::getenv("RANKFUSE_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0)
        return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

} // namespace rankfuse
