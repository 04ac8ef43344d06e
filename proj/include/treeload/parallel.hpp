#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace treeload {

enum class Exec { serial, parallel };

// Evaluates f(i) for i in [0, count) into a vector. The parallel path writes
// each slot independently, so the output never depends on the schedule.
template <class T, class F>
std::vector<T> map_indices(std::size_t count, F&& f, Exec exec) {
  std::vector<T> out(count);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr error;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(treeload_map_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace treeload
