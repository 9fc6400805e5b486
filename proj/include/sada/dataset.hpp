#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sada/matrix.hpp"

namespace sada {

inline constexpr std::size_t kNumProxyLabels = 6;

// Column order of the proxy-label block.
inline constexpr std::size_t kLabelRoadType = 0;
inline constexpr std::size_t kLabelCurvature = 1;
inline constexpr std::size_t kLabelOncomingType = 2;
inline constexpr std::size_t kLabelOncomingDist = 3;
inline constexpr std::size_t kLabelLeadType = 4;
inline constexpr std::size_t kLabelLeadDist = 5;

inline constexpr const char* kBehaviorHeader =
    "sample_id,driver_id,segment_hint,order_index,d_cl,"
    "road_type,curvature,oncoming_type,oncoming_dist,lead_type,lead_dist";

enum class Split : std::uint8_t { Unassigned = 0, Train = 1, Val = 2 };

// One recording stream: per-sample embeddings, the behavior target d_CL
// (meters), raw proxy labels, and driver/segment/order metadata. Immutable
// after load except for split tagging.
struct Dataset {
  Matrix embeddings;                       // N x D
  std::vector<double> behavior;            // d_CL, meters
  Matrix proxy_labels;                     // N x kNumProxyLabels, NaN = absent
  std::vector<std::int64_t> sample_id;
  std::vector<int> driver_id;
  std::vector<std::int64_t> segment_id;    // -1 until derived or hinted
  std::vector<std::int64_t> order_index;   // strictly increasing per driver
  std::vector<Split> split;

  std::size_t size() const { return behavior.size(); }
  std::size_t dim() const { return embeddings.cols; }

  // Checks the structural invariants; throws DataError on violation.
  void validate() const;

  std::vector<std::size_t> rows_with(Split tag) const;
  std::vector<int> distinct_drivers() const;
  std::vector<std::size_t> rows_of_driver(int driver, Split tag) const;
};

struct SplitConfig {
  std::size_t segment_len = 30;   // samples per segment (3 s at 10 Hz)
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
};

Dataset load_dataset(const std::string& behavior_table_path, const std::string& embeddings_path);

void save_behavior_csv(const Dataset& d, const std::string& path);
void save_embeddings(const Dataset& d, const std::string& path);

// Groups each driver's samples into consecutive runs of cfg.segment_len (the
// trailing partial run counts as a segment), then assigns whole segments to
// train/val. The val segment count is round-half-up of val_fraction times the
// total segment count; assignment is a seeded shuffle.
void segment_split(Dataset& d, const SplitConfig& cfg);

// Splits the train rows (in row order) into ceil(1/fraction) contiguous
// chunks whose sizes differ by at most one; chunk size floors at one sample.
std::vector<std::vector<std::size_t>> temporal_subsets(const Dataset& d, double fraction);

}  // namespace sada
