#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace nlbash {

// Reference implementation: applies fn to each element in order.
template <class T, class F>
auto serial_map(const std::vector<T>& in, F&& fn) {
  using R = std::decay_t<std::invoke_result_t<F&, const T&>>;
  std::vector<R> out;
  out.reserve(in.size());
  for (const auto& x : in) out.push_back(fn(x));
  return out;
}

// Same result as serial_map, computed by up to `workers` OpenMP threads
// (0 = OpenMP default). fn must be safe to call concurrently. The first
// exception thrown by fn, in input order, is rethrown.
template <class T, class F>
auto parallel_map(const std::vector<T>& in, F&& fn, int workers = 0) {
  using R = std::decay_t<std::invoke_result_t<F&, const T&>>;
  if (workers == 1 || in.size() < 2) return serial_map(in, fn);
  std::vector<std::optional<R>> slots(in.size());
  std::vector<std::exception_ptr> errors(in.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      slots[i].emplace(fn(in[i]));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(in.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace nlbash
