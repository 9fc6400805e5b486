#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sada/matrix.hpp"

namespace sada {

enum class KMeansVariant : std::uint8_t { Classical = 0, Spherical = 1 };

struct KMeansConfig {
  std::size_t n_c = 8;
  KMeansVariant variant = KMeansVariant::Classical;
  std::uint64_t seed = 0;
  std::size_t max_iter = 300;
  double tol = 1e-6;  // max centroid displacement
  int threads = 1;
};

// Fitted model; immutable after fit, assignment and cost queries are
// read-only and safe to call concurrently.
struct KMeansModel {
  Matrix centroids;  // n_c x D; unit rows for the spherical variant
  KMeansVariant variant = KMeansVariant::Classical;
  std::uint64_t seed = 0;
  std::size_t n_iter_run = 0;
  std::vector<double> inertia_history;  // nonincreasing, one entry per iteration

  std::size_t n_clusters() const { return centroids.rows; }

  // Classical: argmin squared Euclidean distance. Spherical: argmax cosine
  // similarity of the L2-normalized row. Ties break to the lowest id.
  std::vector<std::uint32_t> assign(const Matrix& x, int threads = 1) const;

  // Sum of squared distances (classical) or 1 - cosine (spherical) to the
  // assigned centroid.
  double inertia(const Matrix& x, int threads = 1) const;

  void save(const std::string& path) const;
  static KMeansModel load(const std::string& path);
};

// Lloyd iterations from a greedy distance-weighted seeding; an empty cluster
// is re-seeded to the point farthest from its assigned centroid.
KMeansModel kmeans_fit(const Matrix& x, const KMeansConfig& cfg);

}  // namespace sada
