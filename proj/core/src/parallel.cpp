#include "nullwave/parallel.hpp"

#include <omp.h>

#include <exception>

namespace nullwave::parallel {

namespace {
int g_threads = 1;
}

void set_threads(int k) {
  g_threads = k < 1 ? 1 : k;
  omp_set_num_threads(g_threads);
}

int threads() { return g_threads; }

namespace detail {

void collect_frontier(std::size_t lo, std::size_t hi, int depth,
                      std::vector<std::pair<std::size_t, std::size_t>>& out) {
  if (hi - lo <= kLeafSize || depth == 0) {
    out.emplace_back(lo, hi);
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  collect_frontier(lo, mid, depth - 1, out);
  collect_frontier(mid, hi, depth - 1, out);
}

double combine_frontier(std::size_t lo, std::size_t hi, int depth, const double*& it) {
  if (hi - lo <= kLeafSize || depth == 0) return *it++;
  const std::size_t mid = lo + (hi - lo) / 2;
  const double left = combine_frontier(lo, mid, depth - 1, it);
  const double right = combine_frontier(mid, hi, depth - 1, it);
  return left + right;
}

void combine_frontier_vec(std::size_t lo, std::size_t hi, int depth, std::size_t width,
                          const double*& it, std::span<double> out) {
  if (hi - lo <= kLeafSize || depth == 0) {
    for (std::size_t k = 0; k < width; ++k) out[k] = it[k];
    it += width;
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<double> right(width);
  combine_frontier_vec(lo, mid, depth - 1, width, it, out);
  combine_frontier_vec(mid, hi, depth - 1, width, it, std::span<double>(right));
  for (std::size_t k = 0; k < width; ++k) out[k] += right[k];
}

void run_tasks(std::size_t count, void (*body)(std::size_t, void*), void* ctx) {
  const long n = static_cast<long>(count);
  if (g_threads <= 1 || n <= 1) {
    for (long k = 0; k < n; ++k) body(static_cast<std::size_t>(k), ctx);
    return;
  }
  // Exceptions must not escape an OpenMP region; the lowest-index failure is
  // rethrown so the reported error does not depend on scheduling.
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(g_threads)
  for (long k = 0; k < n; ++k) {
    try {
      body(static_cast<std::size_t>(k), ctx);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace detail

} // namespace nullwave::parallel
