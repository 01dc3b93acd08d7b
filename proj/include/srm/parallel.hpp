#pragma once

#include <cstddef>

namespace srm {

// All data-parallel kernels take a Run mode. Run::serial is the reference
// path used by tests and the benchmark; Run::parallel enables the OpenMP
// loop. Both paths execute the same per-index body, and kernels never
// reduce across indices inside the loop, so results are bit-identical.
enum class Run { serial, parallel };

template <class F>
void for_each_index(std::size_t n, Run run, F&& body) {
  if (run == Run::parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      body(i);
    }
  }
}

}  // namespace srm
