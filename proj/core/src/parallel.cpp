#include "butterfly_lab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#if defined(__GNUC__)
// Present only when OpenBLAS backs the LAPACKE route.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));
#endif

namespace butterfly_lab {

int thread_budget() {
  if (const char* env = std::getenv("BUTTERFLY_LAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return std::min(n, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads) {
  if (threads <= 0) threads = thread_budget();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
#if defined(__GNUC__)
  // Workers already fill the cores; nested BLAS threads would oversubscribe them.
  if (openblas_set_num_threads) openblas_set_num_threads(1);
#endif
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace butterfly_lab
