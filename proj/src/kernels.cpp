#include "sada/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sada/kahan.hpp"

namespace sada::kernels {

namespace {

struct Chunk {
  std::size_t begin;
  std::size_t end;
};

std::vector<Chunk> make_chunks(std::size_t n, int threads) {
  const auto t = static_cast<std::size_t>(std::max(threads, 1));
  const std::size_t k = std::min(t, std::max<std::size_t>(n, 1));
  std::vector<Chunk> chunks(k);
  const std::size_t base = n / k;
  const std::size_t rem = n % k;
  std::size_t pos = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t len = base + (c < rem ? 1 : 0);
    chunks[c] = {pos, pos + len};
    pos += len;
  }
  return chunks;
}

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void assign_range(const Matrix& x, const Matrix& centroids, bool spherical, std::size_t begin,
                  std::size_t end, std::span<std::uint32_t> out) {
  const std::size_t k = centroids.rows;
  for (std::size_t i = begin; i < end; ++i) {
    const auto xi = x.row(i);
    std::uint32_t best = 0;
    if (spherical) {
      double best_dot = dot(xi, centroids.row(0));
      for (std::size_t c = 1; c < k; ++c) {
        const double d = dot(xi, centroids.row(c));
        if (d > best_dot) {
          best_dot = d;
          best = static_cast<std::uint32_t>(c);
        }
      }
    } else {
      double best_d = sq_dist(xi, centroids.row(0));
      for (std::size_t c = 1; c < k; ++c) {
        const double d = sq_dist(xi, centroids.row(c));
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::uint32_t>(c);
        }
      }
    }
    out[i] = best;
  }
}

double cost_range(const Matrix& x, const Matrix& centroids, bool spherical, std::size_t begin,
                  std::size_t end, std::span<const std::uint32_t> assign) {
  KahanSum acc;
  for (std::size_t i = begin; i < end; ++i) {
    const auto xi = x.row(i);
    const auto c = centroids.row(assign[i]);
    if (spherical) {
      const double nx = norm(xi);
      acc.add(1.0 - dot(xi, c) / nx);
    } else {
      acc.add(sq_dist(xi, c));
    }
  }
  return acc.value();
}

}  // namespace

int effective_threads(int requested) {
#ifdef _OPENMP
  if (requested < 1) return omp_get_max_threads();
  return requested;
#else
  (void)requested;
  return 1;
#endif
}

void assign_nearest_serial(const Matrix& x, const Matrix& centroids, bool spherical,
                           std::span<std::uint32_t> out) {
  assign_range(x, centroids, spherical, 0, x.rows, out);
}

void assign_nearest(const Matrix& x, const Matrix& centroids, bool spherical,
                    std::span<std::uint32_t> out, int threads) {
  if (threads <= 1 || x.rows < 2) {
    assign_nearest_serial(x, centroids, spherical, out);
    return;
  }
  const auto chunks = make_chunks(x.rows, threads);
#pragma omp parallel for schedule(static) num_threads(static_cast<int>(chunks.size()))
  for (std::size_t c = 0; c < chunks.size(); ++c)
    assign_range(x, centroids, spherical, chunks[c].begin, chunks[c].end, out);
}

double assignment_cost_serial(const Matrix& x, const Matrix& centroids, bool spherical,
                              std::span<const std::uint32_t> assign) {
  return cost_range(x, centroids, spherical, 0, x.rows, assign);
}

double assignment_cost(const Matrix& x, const Matrix& centroids, bool spherical,
                       std::span<const std::uint32_t> assign, int threads) {
  if (threads <= 1 || x.rows < 2)
    return assignment_cost_serial(x, centroids, spherical, assign);
  const auto chunks = make_chunks(x.rows, threads);
  std::vector<double> partial(chunks.size(), 0.0);
#pragma omp parallel for schedule(static) num_threads(static_cast<int>(chunks.size()))
  for (std::size_t c = 0; c < chunks.size(); ++c)
    partial[c] = cost_range(x, centroids, spherical, chunks[c].begin, chunks[c].end, assign);
  KahanSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

void accumulate_clusters_serial(const Matrix& x, std::span<const std::uint32_t> assign,
                                Matrix& sums, std::vector<std::uint64_t>& counts) {
  std::fill(sums.data.begin(), sums.data.end(), 0.0);
  std::fill(counts.begin(), counts.end(), 0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto xi = x.row(i);
    auto dst = sums.row(assign[i]);
    for (std::size_t j = 0; j < xi.size(); ++j) dst[j] += xi[j];
    ++counts[assign[i]];
  }
}

void accumulate_clusters(const Matrix& x, std::span<const std::uint32_t> assign, Matrix& sums,
                         std::vector<std::uint64_t>& counts, int threads) {
  if (threads <= 1 || x.rows < 2) {
    accumulate_clusters_serial(x, assign, sums, counts);
    return;
  }
  const auto chunks = make_chunks(x.rows, threads);
  std::vector<Matrix> part_sums(chunks.size(), Matrix(sums.rows, sums.cols));
  std::vector<std::vector<std::uint64_t>> part_counts(
      chunks.size(), std::vector<std::uint64_t>(counts.size(), 0));
#pragma omp parallel for schedule(static) num_threads(static_cast<int>(chunks.size()))
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    auto& ps = part_sums[c];
    auto& pc = part_counts[c];
    for (std::size_t i = chunks[c].begin; i < chunks[c].end; ++i) {
      const auto xi = x.row(i);
      auto dst = ps.row(assign[i]);
      for (std::size_t j = 0; j < xi.size(); ++j) dst[j] += xi[j];
      ++pc[assign[i]];
    }
  }
  std::fill(sums.data.begin(), sums.data.end(), 0.0);
  std::fill(counts.begin(), counts.end(), 0);
  // merge in chunk order
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    for (std::size_t k = 0; k < sums.data.size(); ++k) sums.data[k] += part_sums[c].data[k];
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += part_counts[c][k];
  }
}

void standardize_serial(const Matrix& x, std::span<const double> mean,
                        std::span<const double> scale, Matrix& out) {
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto src = x.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = (src[j] - mean[j]) / scale[j];
  }
}

void standardize(const Matrix& x, std::span<const double> mean, std::span<const double> scale,
                 Matrix& out, int threads) {
  if (threads <= 1 || x.rows < 2) {
    standardize_serial(x, mean, scale, out);
    return;
  }
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto src = x.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = (src[j] - mean[j]) / scale[j];
  }
}

}  // namespace sada::kernels
