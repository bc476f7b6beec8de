#pragma once

// Thread control and reductions whose result does not depend on the thread
// count. Every sum is a fixed binary tree over the index range: ranges are
// halved until they hold at most kLeafSize items, leaves are summed left to
// right, and partial sums are combined pairwise. Threads only decide who
// evaluates which subtree, so 1 and N threads give bitwise-identical sums.

#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace nullwave::parallel {

inline constexpr std::size_t kLeafSize = 256;

/// Sets the worker count used by every parallel loop (k >= 1).
void set_threads(int k);
int threads();

namespace detail {

inline constexpr int kFrontierDepth = 10;

void collect_frontier(std::size_t lo, std::size_t hi, int depth,
                      std::vector<std::pair<std::size_t, std::size_t>>& out);

template <class F>
double serial_tree(std::size_t lo, std::size_t hi, F& f) {
  if (hi - lo <= kLeafSize) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += f(i);
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  const double left = serial_tree(lo, mid, f);
  const double right = serial_tree(mid, hi, f);
  return left + right;
}

double combine_frontier(std::size_t lo, std::size_t hi, int depth, const double*& it);

template <class F>
void serial_tree_vec(std::size_t lo, std::size_t hi, F& f, std::span<double> out) {
  if (hi - lo <= kLeafSize) {
    for (auto& x : out) x = 0.0;
    for (std::size_t i = lo; i < hi; ++i) f(i, out);
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<double> right(out.size());
  serial_tree_vec(lo, mid, f, out);
  serial_tree_vec(mid, hi, f, std::span<double>(right));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += right[k];
}

template <class Leaf>
void block_tree_vec(std::size_t lo, std::size_t hi, Leaf& leaf, std::span<double> out) {
  if (hi - lo <= kLeafSize) {
    leaf(lo, hi, out);
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<double> right(out.size());
  block_tree_vec(lo, mid, leaf, out);
  block_tree_vec(mid, hi, leaf, std::span<double>(right));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += right[k];
}

void combine_frontier_vec(std::size_t lo, std::size_t hi, int depth, std::size_t width,
                          const double*& it, std::span<double> out);

void run_tasks(std::size_t count, void (*body)(std::size_t, void*), void* ctx);

} // namespace detail

/// Deterministic pairwise sum of f(i) over i in [0, n).
template <class F>
double pairwise_sum(std::size_t n, F&& f) {
  if (n == 0) return 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> frontier;
  detail::collect_frontier(0, n, detail::kFrontierDepth, frontier);
  std::vector<double> partial(frontier.size());
  struct Ctx {
    std::remove_reference_t<F>* f;
    const std::vector<std::pair<std::size_t, std::size_t>>* frontier;
    std::vector<double>* partial;
  } ctx{&f, &frontier, &partial};
  detail::run_tasks(
      frontier.size(),
      [](std::size_t k, void* p) {
        auto* c = static_cast<Ctx*>(p);
        const auto [lo, hi] = (*c->frontier)[k];
        (*c->partial)[k] = detail::serial_tree(lo, hi, *c->f);
      },
      &ctx);
  const double* it = partial.data();
  return detail::combine_frontier(0, n, detail::kFrontierDepth, it);
}

/// Multi-output deterministic pairwise sum. f(i, acc) adds the contributions
/// of item i into acc (length `width`).
template <class F>
std::vector<double> pairwise_sum_vec(std::size_t n, std::size_t width, F&& f) {
  std::vector<double> out(width, 0.0);
  if (n == 0 || width == 0) return out;
  std::vector<std::pair<std::size_t, std::size_t>> frontier;
  detail::collect_frontier(0, n, detail::kFrontierDepth, frontier);
  std::vector<double> partial(frontier.size() * width);
  struct Ctx {
    std::remove_reference_t<F>* f;
    const std::vector<std::pair<std::size_t, std::size_t>>* frontier;
    std::vector<double>* partial;
    std::size_t width;
  } ctx{&f, &frontier, &partial, width};
  detail::run_tasks(
      frontier.size(),
      [](std::size_t k, void* p) {
        auto* c = static_cast<Ctx*>(p);
        const auto [lo, hi] = (*c->frontier)[k];
        detail::serial_tree_vec(lo, hi, *c->f,
                                std::span<double>(c->partial->data() + k * c->width, c->width));
      },
      &ctx);
  const double* it = partial.data();
  detail::combine_frontier_vec(0, n, detail::kFrontierDepth, width, it, std::span<double>(out));
  return out;
}

/// Block form of pairwise_sum_vec: leaf(lo, hi, acc) must overwrite acc with
/// the left-to-right sum over [lo, hi). Leaves are the same ranges as in the
/// item-wise tree, so both forms agree bitwise.
template <class Leaf>
std::vector<double> pairwise_sum_blocks(std::size_t n, std::size_t width, Leaf&& leaf) {
  std::vector<double> out(width, 0.0);
  if (n == 0 || width == 0) return out;
  std::vector<std::pair<std::size_t, std::size_t>> frontier;
  detail::collect_frontier(0, n, detail::kFrontierDepth, frontier);
  std::vector<double> partial(frontier.size() * width);
  struct Ctx {
    std::remove_reference_t<Leaf>* leaf;
    const std::vector<std::pair<std::size_t, std::size_t>>* frontier;
    std::vector<double>* partial;
    std::size_t width;
  } ctx{&leaf, &frontier, &partial, width};
  detail::run_tasks(
      frontier.size(),
      [](std::size_t k, void* p) {
        auto* c = static_cast<Ctx*>(p);
        const auto [lo, hi] = (*c->frontier)[k];
        detail::block_tree_vec(lo, hi, *c->leaf,
                               std::span<double>(c->partial->data() + k * c->width, c->width));
      },
      &ctx);
  const double* it = partial.data();
  detail::combine_frontier_vec(0, n, detail::kFrontierDepth, width, it, std::span<double>(out));
  return out;
}

/// Runs body(lo, hi) over disjoint chunks covering [0, n).
template <class F>
void for_chunks(std::size_t n, std::size_t chunk, F&& body) {
  if (n == 0) return;
  const std::size_t count = (n + chunk - 1) / chunk;
  struct Ctx {
    std::remove_reference_t<F>* body;
    std::size_t n, chunk;
  } ctx{&body, n, chunk};
  detail::run_tasks(
      count,
      [](std::size_t k, void* p) {
        auto* c = static_cast<Ctx*>(p);
        const std::size_t lo = k * c->chunk;
        const std::size_t hi = lo + c->chunk < c->n ? lo + c->chunk : c->n;
        (*c->body)(lo, hi);
      },
      &ctx);
}

} // namespace nullwave::parallel
