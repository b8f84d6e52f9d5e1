#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace dlab {

// Process-wide worker count used by parallel_map. Results never depend on it:
// work items are computed independently and reduced in index order.
void set_worker_count(unsigned n);
unsigned worker_count();

template <class F>
auto parallel_map(std::size_t count, F&& fn) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(count);
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) {
          try {
            out[i] = fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  // Lowest failing index wins so the reported error is worker-independent.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace dlab
