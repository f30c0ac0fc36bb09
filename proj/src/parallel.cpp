#include "gemlaw/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace gemlaw {

int max_threads() {
  static const int cached = [] {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("GEMLAW_THREADS")) {
      try {
        const int cap = std::stoi(env);
        n = std::min(n, std::max(cap, 1));
      } catch (...) {
        // Unparsable value: keep the hardware default.
      }
    }
    return n;
  }();
  return cached;
}

}  // namespace gemlaw
