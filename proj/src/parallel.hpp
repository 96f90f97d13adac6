#ifndef AGMM_PARALLEL_HPP
#define AGMM_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace agmm {

// Worker count from AGMM_THREADS; 0 or unset means all hardware cores.
int threadCount();

// Runs fn over disjoint [begin, end) chunks of 0..n. Nested calls and small
// ranges run inline. Callers must write results into per-index slots and
// reduce sequentially afterwards, which keeps results independent of the
// schedule.
void parallelFor(std::size_t n,
                 const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace agmm

#endif
