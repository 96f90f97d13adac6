#include "parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace agmm {

namespace {
thread_local bool insideParallelRegion = false;
}

int threadCount() {
  const char* env = std::getenv("AGMM_THREADS");
  int requested = 0;
  if (env && *env) {
    requested = std::atoi(env);
    if (requested < 0) requested = 1;
  }
  if (requested == 0) {
    requested = static_cast<int>(std::thread::hardware_concurrency());
    if (requested <= 0) requested = 1;
  }
  return requested;
}

void parallelFor(std::size_t n,
                 const std::function<void(std::size_t, std::size_t)>& fn) {
  const int workers = threadCount();
  if (n == 0) return;
  if (workers <= 1 || n < 2 || insideParallelRegion) {
    const bool prev = insideParallelRegion;
    insideParallelRegion = true;
    fn(0, n);
    insideParallelRegion = prev;
    return;
  }

  const std::size_t chunks = std::min<std::size_t>(workers, n);
  const std::size_t per = (n + chunks - 1) / chunks;
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = c * per;
    const std::size_t end = std::min(n, begin + per);
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end] {
      insideParallelRegion = true;
      fn(begin, end);
      insideParallelRegion = false;
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace agmm
