#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sada/kahan.hpp"

namespace sada {

// Per-cluster driving-behavior statistics: a count and a compensated sum of
// d_CL per cluster plus one global pair. State size is fixed at 2*n_c + 2
// accumulators regardless of how many samples have streamed through, which
// is what makes incremental adaptation immune to forgetting: re-streaming
// the same data in any chunking reproduces the same table.
class DsdsTable {
 public:
  DsdsTable() = default;
  explicit DsdsTable(std::size_t n_c);

  static DsdsTable fit(std::span<const std::uint32_t> assignments,
                       std::span<const double> behavior, std::size_t n_c);

  // Accumulates a batch onto the existing statistics.
  void update(std::span<const std::uint32_t> assignments, std::span<const double> behavior);

  // Same result as update, built from one table per contiguous chunk and
  // merged in chunk order.
  void update_parallel(std::span<const std::uint32_t> assignments,
                       std::span<const double> behavior, int threads);

  // Elementwise addition of counts and sums; commutative and associative up
  // to floating-point rounding.
  void merge(const DsdsTable& other);

  // Cluster mean when the cluster has samples, the global mean when it has
  // none, 0.0 when the whole table is empty (see cold()).
  double predict(std::size_t cluster) const;

  bool cold() const { return global_count_ == 0; }

  std::size_t n_clusters() const { return counts_.size(); }
  std::uint64_t count(std::size_t cluster) const;
  double sum(std::size_t cluster) const;
  std::uint64_t global_count() const { return global_count_; }
  double global_sum() const { return global_sum_.value(); }

  // Number of (count or sum) accumulators held: always 2*n_c + 2.
  std::size_t state_accumulators() const { return 2 * counts_.size() + 2; }

  // Header `cluster_id,count,sum,mean`, one row per cluster, trailing
  // `__global__` row.
  void save_csv(const std::string& path) const;
  static DsdsTable load_csv(const std::string& path);

 private:
  void check_range(std::size_t cluster) const;

  std::vector<std::uint64_t> counts_;
  std::vector<KahanSum> sums_;
  std::uint64_t global_count_ = 0;
  KahanSum global_sum_;
};

}  // namespace sada
