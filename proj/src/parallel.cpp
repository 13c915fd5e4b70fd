#include "ordwalk/parallel.hpp"

namespace ordwalk {

namespace {
std::atomic<int> g_workers{0};
}

void set_workers(int n) { g_workers = n; }

int workers() {
  const int n = g_workers.load();
  if (n > 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace ordwalk
