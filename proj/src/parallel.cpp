#include "mee/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mee {
namespace {

std::atomic<std::size_t> g_override{0};
thread_local bool t_inside = false;

std::size_t env_threads() {
  if (const char* v = std::getenv("MEE_THREADS")) {
    try {
      const long n = std::stol(v);
      if (n >= 1) return static_cast<std::size_t>(n);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

} // namespace

std::size_t worker_count() {
  const auto o = g_override.load();
  return o ? o : env_threads();
}

void set_worker_count(std::size_t n) { g_override.store(n); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), count);
  if (t_inside || workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run_chunk = [&](std::size_t w) {
    t_inside = true;
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    try {
      for (std::size_t i = begin; i < end; ++i) body(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
    t_inside = false;
  };

  std::vector<std::jthread> threads;
  threads.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(run_chunk, w);
  run_chunk(0);
  threads.clear();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace mee
