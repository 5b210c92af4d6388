#include "adq/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace adq {
namespace {

std::atomic<int> g_threads{0};
thread_local bool t_in_worker = false;

}  // namespace

void set_thread_count(int threads) { g_threads.store(std::max(threads, 0)); }

int thread_count() noexcept {
  const int t = g_threads.load();
  if (t > 0) return t;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t chunks, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), chunks);
  if (workers <= 1 || t_in_worker) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    t_in_worker = true;
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) break;
      try {
        body(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
      }
    }
    t_in_worker = false;
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace adq
