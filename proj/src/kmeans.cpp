#include "sada/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "sada/common.hpp"
#include "sada/kahan.hpp"
#include "sada/kernels.hpp"
#include "sada/rng.hpp"

namespace sada {

namespace {

constexpr char kModelMagic[4] = {'S', 'A', 'D', 'K'};
constexpr std::uint32_t kModelVersion = 1;
constexpr double kZeroNormTol = 1e-30;

bool spherical(KMeansVariant v) { return v == KMeansVariant::Spherical; }

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

// Point cost under the variant metric; rows and centroids must already be
// unit norm in the spherical case.
double point_cost(std::span<const double> x, std::span<const double> c, bool sph) {
  return sph ? 1.0 - dot(x, c) : sq_dist(x, c);
}

// Returns a copy with unit-norm rows; throws on a zero-norm row.
Matrix normalized_rows(const Matrix& x) {
  Matrix out = x;
  for (std::size_t i = 0; i < out.rows; ++i) {
    auto r = out.row(i);
    const double n = std::sqrt(dot(r, r));
    if (n < kZeroNormTol)
      throw DataError("zero-norm row " + std::to_string(i) + " under spherical variant");
    for (double& v : r) v /= n;
  }
  return out;
}

// Greedy seeding: first centroid uniform, then rows sampled with probability
// proportional to their current cost (squared distance for classical,
// 1 - cosine for spherical).
Matrix seed_centroids(const Matrix& x, std::size_t n_c, bool sph, RandomStream& rng) {
  const std::size_t n = x.rows;
  Matrix centroids(n_c, x.cols);

  const std::size_t first = rng.uniform_index(n);
  std::copy(x.row(first).begin(), x.row(first).end(), centroids.row(0).begin());

  std::vector<double> cost(n);
  for (std::size_t i = 0; i < n; ++i) cost[i] = point_cost(x.row(i), centroids.row(0), sph);

  for (std::size_t k = 1; k < n_c; ++k) {
    KahanSum total;
    for (double c : cost) total.add(std::max(c, 0.0));
    std::size_t pick;
    if (total.value() <= 0.0) {
      // all remaining cost exhausted (duplicate points); fall back to uniform
      pick = rng.uniform_index(n);
    } else {
      const double r = rng.uniform() * total.value();
      double cum = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cum += std::max(cost[i], 0.0);
        if (cum >= r) {
          pick = i;
          break;
        }
      }
    }
    std::copy(x.row(pick).begin(), x.row(pick).end(), centroids.row(k).begin());
    for (std::size_t i = 0; i < n; ++i)
      cost[i] = std::min(cost[i], point_cost(x.row(i), centroids.row(k), sph));
  }
  return centroids;
}

}  // namespace

KMeansModel kmeans_fit(const Matrix& x, const KMeansConfig& cfg) {
  if (cfg.n_c < 1) throw DataError("n_c must be >= 1");
  if (cfg.n_c > x.rows)
    throw DataError("n_c (" + std::to_string(cfg.n_c) + ") exceeds sample count (" +
                    std::to_string(x.rows) + ")");
  const bool sph = spherical(cfg.variant);
  const Matrix work = sph ? normalized_rows(x) : x;
  const std::size_t n = work.rows;
  const std::size_t d = work.cols;

  RandomStream rng(cfg.seed);
  KMeansModel m;
  m.variant = cfg.variant;
  m.seed = cfg.seed;
  m.centroids = seed_centroids(work, cfg.n_c, sph, rng);

  std::vector<std::uint32_t> assign(n);
  Matrix sums(cfg.n_c, d);
  std::vector<std::uint64_t> counts(cfg.n_c, 0);

  for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
    kernels::assign_nearest(work, m.centroids, sph, assign, cfg.threads);

    // Re-seed empty clusters to the point farthest from its assigned
    // centroid, then refresh assignments; bounded in case re-seeding empties
    // another cluster.
    for (std::size_t round = 0; round <= cfg.n_c; ++round) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::uint32_t a : assign) ++counts[a];
      std::vector<std::size_t> empties;
      for (std::size_t c = 0; c < cfg.n_c; ++c)
        if (counts[c] == 0) empties.push_back(c);
      if (empties.empty()) break;
      std::vector<bool> taken(n, false);
      for (std::size_t c : empties) {
        std::size_t far_i = 0;
        double far_cost = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (taken[i]) continue;
          const double ci = point_cost(work.row(i), m.centroids.row(assign[i]), sph);
          if (ci > far_cost) {
            far_cost = ci;
            far_i = i;
          }
        }
        std::copy(work.row(far_i).begin(), work.row(far_i).end(), m.centroids.row(c).begin());
        taken[far_i] = true;
      }
      kernels::assign_nearest(work, m.centroids, sph, assign, cfg.threads);
    }

    m.inertia_history.push_back(kernels::assignment_cost(work, m.centroids, sph, assign,
                                                         cfg.threads));
    m.n_iter_run = iter;

    kernels::accumulate_clusters(work, assign, sums, counts, cfg.threads);
    double max_shift_sq = 0.0;
    for (std::size_t c = 0; c < cfg.n_c; ++c) {
      if (counts[c] == 0) continue;  // unreachable after re-seeding; keep centroid
      auto dst = m.centroids.row(c);
      const auto src = sums.row(c);
      double shift_sq = 0.0;
      const auto cnt = static_cast<double>(counts[c]);
      if (sph) {
        double nrm = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double v = src[j] / cnt;
          nrm += v * v;
        }
        nrm = std::sqrt(nrm);
        if (nrm < kZeroNormTol) continue;  // degenerate mean, keep previous direction
        for (std::size_t j = 0; j < d; ++j) {
          const double v = (src[j] / cnt) / nrm;
          const double diff = v - dst[j];
          shift_sq += diff * diff;
          dst[j] = v;
        }
      } else {
        for (std::size_t j = 0; j < d; ++j) {
          const double v = src[j] / cnt;
          const double diff = v - dst[j];
          shift_sq += diff * diff;
          dst[j] = v;
        }
      }
      max_shift_sq = std::max(max_shift_sq, shift_sq);
    }
    if (std::sqrt(max_shift_sq) < cfg.tol) break;
  }
  return m;
}

std::vector<std::uint32_t> KMeansModel::assign(const Matrix& x, int threads) const {
  if (x.cols != centroids.cols)
    throw DataError("dimension mismatch: model has " + std::to_string(centroids.cols) +
                    " columns, input has " + std::to_string(x.cols));
  if (variant == KMeansVariant::Spherical) {
    for (std::size_t i = 0; i < x.rows; ++i) {
      const auto r = x.row(i);
      if (dot(r, r) < kZeroNormTol * kZeroNormTol)
        throw DataError("zero-norm row " + std::to_string(i) + " under spherical variant");
    }
  }
  std::vector<std::uint32_t> out(x.rows);
  kernels::assign_nearest(x, centroids, variant == KMeansVariant::Spherical, out, threads);
  return out;
}

double KMeansModel::inertia(const Matrix& x, int threads) const {
  const auto a = assign(x, threads);
  return kernels::assignment_cost(x, centroids, variant == KMeansVariant::Spherical, a, threads);
}

void KMeansModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out.write(kModelMagic, 4);
  out.write(reinterpret_cast<const char*>(&kModelVersion), sizeof(kModelVersion));
  const std::uint8_t var = static_cast<std::uint8_t>(variant);
  out.write(reinterpret_cast<const char*>(&var), 1);
  const std::uint64_t n_c = centroids.rows, d = centroids.cols;
  out.write(reinterpret_cast<const char*>(&n_c), sizeof(n_c));
  out.write(reinterpret_cast<const char*>(&d), sizeof(d));
  out.write(reinterpret_cast<const char*>(centroids.data.data()),
            static_cast<std::streamsize>(centroids.data.size() * sizeof(double)));
}

KMeansModel KMeansModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kModelMagic, 4) != 0)
    throw DataError("model file magic mismatch: " + path);
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || version != kModelVersion)
    throw DataError("model file version mismatch: " + path);
  std::uint8_t var = 0;
  in.read(reinterpret_cast<char*>(&var), 1);
  if (var > 1) throw DataError("unknown variant code in model file: " + path);
  std::uint64_t n_c = 0, d = 0;
  in.read(reinterpret_cast<char*>(&n_c), sizeof(n_c));
  in.read(reinterpret_cast<char*>(&d), sizeof(d));
  if (!in || n_c < 1 || d < 1) throw DataError("corrupt model header: " + path);
  KMeansModel m;
  m.variant = static_cast<KMeansVariant>(var);
  m.centroids = Matrix(n_c, d);
  in.read(reinterpret_cast<char*>(m.centroids.data.data()),
          static_cast<std::streamsize>(m.centroids.data.size() * sizeof(double)));
  if (!in) throw DataError("truncated model file: " + path);
  return m;
}

}  // namespace sada
