// Copyright 2026 the subsheet authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBSHEET_PARALLEL_HPP
#define SUBSHEET_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "subsheet/rng.hpp"

namespace subsheet {

// Deterministic chunk layout for Monte Carlo loops. Replicates [0, n) are
// split into fixed chunks of `chunk_size`; chunk c always runs on the stream
// (master_seed, (check_id << 32) | c) and results are merged in chunk order,
// so the numeric output depends on (seed, layout) only, never on the thread
// count. check_id namespaces the streams of distinct checks in one run.
struct McOptions {
  std::uint64_t master_seed = 0;
  std::uint32_t check_id = 0;
  std::size_t chunk_size = 1 << 16;
  unsigned threads = 1;
};

inline std::uint64_t chunk_stream_id(const McOptions& opt, std::size_t chunk) {
  return (static_cast<std::uint64_t>(opt.check_id) << 32) |
         static_cast<std::uint64_t>(chunk);
}

// Runs fn(chunk_index, begin, end, rng) over the chunk layout, on up to
// opt.threads workers. fn must write only to slots derived from its own
// replicate range.
template <typename Fn>
void for_each_chunk(std::size_t n, const McOptions& opt, Fn&& fn) {
  if (n == 0) return;
  const std::size_t chunk_size = opt.chunk_size > 0 ? opt.chunk_size : n;
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;

  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = std::min(n, begin + chunk_size);
    RngStream rng(opt.master_seed, chunk_stream_id(opt, c));
    fn(c, begin, end, rng);
  };

  const unsigned workers =
      std::min<std::size_t>(opt.threads > 0 ? opt.threads : 1, chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks) return;
        try {
          run_chunk(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace subsheet

#endif  // SUBSHEET_PARALLEL_HPP
