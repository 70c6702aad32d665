#include "eprc/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace eprc {

std::size_t resolve_thread_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap_str = std::getenv("EPR_CASCADE_THREADS")) {
    char* end = nullptr;
    const unsigned long long cap = std::strtoull(cap_str, &end, 10);
    if (end != cap_str && *end == '\0' && cap >= 1)
      n = std::min<std::size_t>(n, cap);
  }
  return n;
}

void parallel_for(std::size_t count, std::size_t num_threads,
                  const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  num_threads = std::max<std::size_t>(1, std::min(num_threads, count));
  if (num_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(num_threads);
  const std::size_t chunk = (count + num_threads - 1) / num_threads;
  for (std::size_t t = 0; t < num_threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace eprc
