#pragma once

#include <cstddef>
#include <functional>

namespace sigregime {

// Worker count used by parallel loops. Defaults to SIGREGIME_THREADS or 1.
int num_threads();
void set_num_threads(int n);

// Runs body(i) for i in [0, n). Each index is executed exactly once; callers
// write results into slot i so output never depends on scheduling. The first
// exception thrown (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sigregime
