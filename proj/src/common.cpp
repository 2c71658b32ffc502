#include "oscue/common.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace oscue {

double wrap_angle(double theta) {
  double r = std::fmod(theta, two_pi);
  if (r < 0) r += two_pi;
  return r;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

xreal sinc_x(xreal x) {
  if (std::abs(x) < 1e-5L) {
    xreal x2 = x * x;
    return 1.0L - x2 / 6.0L + x2 * x2 / 120.0L;
  }
  return std::sin(x) / x;
}

namespace {
std::atomic<int> g_max_workers{1};
}

void set_max_workers(int n) {
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  g_max_workers.store(n);
}

int max_workers() { return g_max_workers.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int workers = max_workers();
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t w = std::min<std::size_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t k = 0; k < w; ++k) {
    pool.emplace_back([&, k]() {
      for (std::size_t i = k; i < n; i += w) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace oscue
