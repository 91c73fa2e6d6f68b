#pragma once

// Data-parallel loops shared by the quadrature, grid-scan, and line-integral
// code. Each kernel first evaluates f(i) for every index (in parallel under
// OpenMP) and then combines the values serially in index order, so results are
// bit-identical for any thread count. The reference:: versions are plain serial
// loops kept for testing and benchmarking.

#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace prequant::kernels {

struct IndexedValue {
  std::size_t index = 0;
  double value = 0.0;
};

/// Cascade summation in index order.
double pairwise_sum(std::span<const double> values);

int max_threads();
void set_threads(int n);

template <class F>
void evaluate(std::size_t n, std::vector<double>& out, F&& f) {
  out.resize(n);
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(prequant_kernel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

template <class F>
double sum(std::size_t n, F&& f) {
  std::vector<double> values;
  evaluate(n, values, f);
  return pairwise_sum(values);
}

/// Largest value, lowest index on ties. n must be positive.
template <class F>
IndexedValue argmax(std::size_t n, F&& f) {
  std::vector<double> values;
  evaluate(n, values, f);
  IndexedValue best{0, values.at(0)};
  for (std::size_t i = 1; i < n; ++i) {
    if (values[i] > best.value) best = {i, values[i]};
  }
  return best;
}

template <class F>
IndexedValue argmin(std::size_t n, F&& f) {
  std::vector<double> values;
  evaluate(n, values, f);
  IndexedValue best{0, values.at(0)};
  for (std::size_t i = 1; i < n; ++i) {
    if (values[i] < best.value) best = {i, values[i]};
  }
  return best;
}

namespace reference {

template <class F>
double sum(std::size_t n, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += f(i);
  return s;
}

template <class F>
IndexedValue argmax(std::size_t n, F&& f) {
  IndexedValue best{0, -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(i);
    if (v > best.value) best = {i, v};
  }
  return best;
}

template <class F>
IndexedValue argmin(std::size_t n, F&& f) {
  IndexedValue best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(i);
    if (v < best.value) best = {i, v};
  }
  return best;
}

}  // namespace reference

}  // namespace prequant::kernels
