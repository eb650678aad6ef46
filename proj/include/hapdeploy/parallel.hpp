#pragma once

#include <cstdlib>
#include <string>
#include <thread>

namespace hapdeploy {

// Resolves a worker count: an explicit request wins, then the
// HAP_PLANNER_THREADS environment variable, then the hardware concurrency.
inline int effective_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HAP_PLANNER_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
      // fall through to hardware detection
    }
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace hapdeploy
