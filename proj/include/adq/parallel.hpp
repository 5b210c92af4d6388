#pragma once

#include <cstddef>
#include <functional>

namespace adq {

// Worker count used by every parallel loop. Results never depend on it:
// work is split into fixed-size chunks and reduced in chunk order.
void set_thread_count(int threads);
int thread_count() noexcept;

// Runs body(chunk) for chunk in [0, chunks). Nested calls from inside a
// worker run inline on that worker.
void parallel_for(std::size_t chunks, const std::function<void(std::size_t)>& body);

inline constexpr std::size_t kChunkSize = 8192;

inline std::size_t chunk_count(std::size_t items, std::size_t chunk = kChunkSize) noexcept {
  return (items + chunk - 1) / chunk;
}

}  // namespace adq
