#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sada/matrix.hpp"

namespace sada::kernels {

// Parallel kernels split the row range into one contiguous chunk per thread
// and merge partial results in chunk order, so output for a given thread
// count is reproducible run to run. threads <= 1 selects the serial path.
// The *_serial functions are the reference implementations.

int effective_threads(int requested);

// Nearest centroid per row. Classical: argmin squared Euclidean distance.
// Spherical: argmax dot product (centroids are unit-norm, so the dot order
// equals the cosine order for any nonzero row). Ties break to the lowest id.
void assign_nearest_serial(const Matrix& x, const Matrix& centroids, bool spherical,
                           std::span<std::uint32_t> out);
void assign_nearest(const Matrix& x, const Matrix& centroids, bool spherical,
                    std::span<std::uint32_t> out, int threads);

// Total assignment cost: squared distance (classical) or 1 - cosine
// (spherical, rows need not be unit norm).
double assignment_cost_serial(const Matrix& x, const Matrix& centroids, bool spherical,
                              std::span<const std::uint32_t> assign);
double assignment_cost(const Matrix& x, const Matrix& centroids, bool spherical,
                       std::span<const std::uint32_t> assign, int threads);

// Per-cluster row sums and counts.
void accumulate_clusters_serial(const Matrix& x, std::span<const std::uint32_t> assign,
                                Matrix& sums, std::vector<std::uint64_t>& counts);
void accumulate_clusters(const Matrix& x, std::span<const std::uint32_t> assign, Matrix& sums,
                         std::vector<std::uint64_t>& counts, int threads);

// out[i][j] = (x[i][j] - mean[j]) / scale[j]
void standardize_serial(const Matrix& x, std::span<const double> mean,
                        std::span<const double> scale, Matrix& out);
void standardize(const Matrix& x, std::span<const double> mean, std::span<const double> scale,
                 Matrix& out, int threads);

}  // namespace sada::kernels
