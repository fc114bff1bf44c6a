#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

namespace pspi {

// Number of worker threads used by parallel_for. Results never depend on it:
// every parallel loop writes independent output slots and all reductions
// run afterwards in a fixed pairwise order.
int worker_count();
void set_worker_count(int workers);

// Calls body(i) for i in [0, n). Indices are split into contiguous chunks,
// one per worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Fixed-tree pairwise summation.
std::complex<double> pairwise_sum(std::span<const std::complex<double>> values);
double pairwise_sum(std::span<const double> values);

}  // namespace pspi
