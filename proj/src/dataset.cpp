#include "sada/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "sada/common.hpp"
#include "sada/rng.hpp"

namespace sada {

namespace {

constexpr char kEmbeddingMagic[4] = {'S', 'A', 'D', 'C'};
constexpr std::uint32_t kEmbeddingVersion = 1;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

template <typename T>
void read_raw(std::ifstream& in, T* out, std::size_t count, const char* what) {
  in.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(sizeof(T) * count));
  if (!in) throw DataError(std::string("truncated embedding file while reading ") + what);
}

template <typename T>
void write_raw(std::ofstream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(sizeof(T) * count));
}

}  // namespace

void Dataset::validate() const {
  const std::size_t n = size();
  if (embeddings.rows != n || proxy_labels.rows != n || sample_id.size() != n ||
      driver_id.size() != n || segment_id.size() != n || order_index.size() != n ||
      split.size() != n)
    throw DataError("per-sample vectors have inconsistent lengths");
  if (n == 0) throw DataError("empty dataset");
  if (embeddings.cols < 1) throw DataError("embedding dimension must be >= 1");
  if (proxy_labels.cols < 1) throw DataError("label table must have >= 1 column");
  for (double v : embeddings.data)
    if (!std::isfinite(v)) throw DataError("non-finite embedding value");
  for (double v : behavior)
    if (!std::isfinite(v)) throw DataError("non-finite behavior value");
  std::map<int, std::int64_t> last_order;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = last_order.find(driver_id[i]);
    if (it != last_order.end() && order_index[i] <= it->second)
      throw DataError("order_index not strictly increasing within driver " +
                      std::to_string(driver_id[i]));
    last_order[driver_id[i]] = order_index[i];
  }
}

std::vector<std::size_t> Dataset::rows_with(Split tag) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (split[i] == tag) out.push_back(i);
  return out;
}

std::vector<int> Dataset::distinct_drivers() const {
  std::vector<int> out(driver_id);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> Dataset::rows_of_driver(int driver, Split tag) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (driver_id[i] == driver && split[i] == tag) out.push_back(i);
  return out;
}

Dataset load_dataset(const std::string& behavior_table_path, const std::string& embeddings_path) {
  std::ifstream table(behavior_table_path);
  if (!table) throw DataError("cannot open behavior table: " + behavior_table_path);

  std::string line;
  if (!std::getline(table, line)) throw DataError("behavior table is empty");
  if (strip_cr(line) != kBehaviorHeader)
    throw DataError("malformed header in " + behavior_table_path + ": expected '" +
                    std::string(kBehaviorHeader) + "'");

  Dataset d;
  d.proxy_labels.cols = kNumProxyLabels;
  while (std::getline(table, line)) {
    const auto sv = strip_cr(line);
    if (sv.empty()) continue;
    const auto f = split_fields(sv);
    if (f.size() != 11)
      throw DataError("behavior table row " + std::to_string(d.size() + 1) + " has " +
                      std::to_string(f.size()) + " fields, expected 11");
    d.sample_id.push_back(parse_int(f[0]));
    d.driver_id.push_back(static_cast<int>(parse_int(f[1])));
    d.segment_id.push_back(parse_int(f[2]));
    d.order_index.push_back(parse_int(f[3]));
    d.behavior.push_back(parse_double(f[4]));
    for (std::size_t l = 0; l < kNumProxyLabels; ++l)
      d.proxy_labels.data.push_back(parse_double(f[5 + l]));
    ++d.proxy_labels.rows;
  }
  d.split.assign(d.size(), Split::Unassigned);

  std::ifstream emb(embeddings_path, std::ios::binary);
  if (!emb) throw DataError("cannot open embedding file: " + embeddings_path);
  char magic[4];
  read_raw(emb, magic, 4, "magic");
  if (std::memcmp(magic, kEmbeddingMagic, 4) != 0)
    throw DataError("embedding file magic mismatch in " + embeddings_path);
  std::uint32_t version = 0;
  read_raw(emb, &version, 1, "version");
  if (version != kEmbeddingVersion)
    throw DataError("embedding file version mismatch: got " + std::to_string(version));
  std::uint64_t n = 0, dim = 0;
  read_raw(emb, &n, 1, "row count");
  read_raw(emb, &dim, 1, "dimension");
  if (n != d.size())
    throw DataError("row count mismatch: table has " + std::to_string(d.size()) +
                    " rows, embedding file has " + std::to_string(n));
  if (dim < 1) throw DataError("embedding dimension must be >= 1");

  std::vector<float> buf(static_cast<std::size_t>(n) * dim);
  read_raw(emb, buf.data(), buf.size(), "embedding values");
  d.embeddings.rows = n;
  d.embeddings.cols = dim;
  d.embeddings.data.resize(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    if (!std::isfinite(buf[i])) throw DataError("non-finite embedding value");
    d.embeddings.data[i] = static_cast<double>(buf[i]);
  }

  d.validate();
  return d;
}

void save_behavior_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << kBehaviorHeader << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << d.sample_id[i] << ',' << d.driver_id[i] << ',' << d.segment_id[i] << ','
        << d.order_index[i] << ',' << format_double(d.behavior[i]);
    for (std::size_t l = 0; l < kNumProxyLabels; ++l)
      out << ',' << format_double(d.proxy_labels(i, l));
    out << '\n';
  }
}

void save_embeddings(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  write_raw(out, kEmbeddingMagic, 4);
  write_raw(out, &kEmbeddingVersion, 1);
  const std::uint64_t n = d.embeddings.rows;
  const std::uint64_t dim = d.embeddings.cols;
  write_raw(out, &n, 1);
  write_raw(out, &dim, 1);
  std::vector<float> buf(d.embeddings.data.size());
  for (std::size_t i = 0; i < buf.size(); ++i)
    buf[i] = static_cast<float>(d.embeddings.data[i]);
  write_raw(out, buf.data(), buf.size());
}

void segment_split(Dataset& d, const SplitConfig& cfg) {
  if (cfg.segment_len < 1) throw DataError("segment_len must be >= 1");
  if (!(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0))
    throw DataError("val_fraction must be in (0, 1)");
  for (Split s : d.split)
    if (s != Split::Unassigned) throw DataError("dataset already has split tags");

  // Segment membership per row. Hints are honored only when every row has
  // one; otherwise segments are derived from per-driver order runs.
  const bool all_hinted =
      std::all_of(d.segment_id.begin(), d.segment_id.end(), [](std::int64_t s) { return s >= 0; });

  std::vector<std::int64_t> seg(d.size());
  std::int64_t n_segments = 0;
  if (all_hinted) {
    std::map<std::int64_t, std::int64_t> remap;
    for (std::size_t i = 0; i < d.size(); ++i) {
      auto [it, inserted] = remap.try_emplace(d.segment_id[i], n_segments);
      if (inserted) ++n_segments;
      seg[i] = it->second;
    }
  } else {
    // Rows of one driver ordered by order_index, chunked into runs of
    // segment_len; the final partial run is kept as a full segment.
    std::map<int, std::vector<std::size_t>> by_driver;
    for (std::size_t i = 0; i < d.size(); ++i) by_driver[d.driver_id[i]].push_back(i);
    for (auto& [driver, rows] : by_driver) {
      std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        return d.order_index[a] < d.order_index[b];
      });
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (k % cfg.segment_len == 0) ++n_segments;
        seg[rows[k]] = n_segments - 1;
      }
    }
  }

  const auto n_val = static_cast<std::int64_t>(
      std::floor(cfg.val_fraction * static_cast<double>(n_segments) + 0.5));

  std::vector<std::int64_t> order(static_cast<std::size_t>(n_segments));
  std::iota(order.begin(), order.end(), 0);
  RandomStream rng(cfg.seed);
  rng.shuffle(order);

  std::vector<Split> seg_tag(static_cast<std::size_t>(n_segments), Split::Train);
  for (std::int64_t k = 0; k < n_val; ++k)
    seg_tag[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = Split::Val;

  for (std::size_t i = 0; i < d.size(); ++i) {
    d.segment_id[i] = seg[i];
    d.split[i] = seg_tag[static_cast<std::size_t>(seg[i])];
  }
}

std::vector<std::vector<std::size_t>> temporal_subsets(const Dataset& d, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw DataError("fraction must be in (0, 1], got " + format_double(fraction));
  std::vector<std::size_t> rows = d.rows_with(Split::Train);
  if (rows.empty()) throw DataError("no train rows; run segment_split first");

  // ceil(1/fraction) with a guard against values like 1/0.1 landing a hair
  // above the integer.
  const auto requested = static_cast<std::size_t>(std::ceil(1.0 / fraction - 1e-9));
  const std::size_t n_chunks = std::min(requested, rows.size());
  const std::size_t base = rows.size() / n_chunks;
  const std::size_t rem = rows.size() % n_chunks;

  std::vector<std::vector<std::size_t>> out;
  out.reserve(n_chunks);
  std::size_t pos = 0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t len = base + (c < rem ? 1 : 0);
    out.emplace_back(rows.begin() + static_cast<std::ptrdiff_t>(pos),
                     rows.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return out;
}

}  // namespace sada
