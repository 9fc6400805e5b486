#include "sada/dsds.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sada/common.hpp"

namespace sada {

DsdsTable::DsdsTable(std::size_t n_c) : counts_(n_c, 0), sums_(n_c) {
  if (n_c < 1) throw DataError("lookup table needs at least one cluster");
}

void DsdsTable::check_range(std::size_t cluster) const {
  if (cluster >= counts_.size())
    throw DataError("cluster id " + std::to_string(cluster) + " out of range [0, " +
                    std::to_string(counts_.size()) + ")");
}

DsdsTable DsdsTable::fit(std::span<const std::uint32_t> assignments,
                         std::span<const double> behavior, std::size_t n_c) {
  DsdsTable t(n_c);
  t.update(assignments, behavior);
  return t;
}

void DsdsTable::update(std::span<const std::uint32_t> assignments,
                       std::span<const double> behavior) {
  if (assignments.size() != behavior.size())
    throw DataError("assignment/behavior length mismatch: " + std::to_string(assignments.size()) +
                    " vs " + std::to_string(behavior.size()));
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    check_range(assignments[i]);
    sums_[assignments[i]].add(behavior[i]);
    ++counts_[assignments[i]];
    global_sum_.add(behavior[i]);
    ++global_count_;
  }
}

void DsdsTable::update_parallel(std::span<const std::uint32_t> assignments,
                                std::span<const double> behavior, int threads) {
  if (threads <= 1 || assignments.size() < 2) {
    update(assignments, behavior);
    return;
  }
  const std::size_t n = assignments.size();
  const auto t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<DsdsTable> partial(t, DsdsTable(counts_.size()));
  const std::size_t base = n / t, rem = n % t;
#pragma omp parallel for schedule(static) num_threads(static_cast<int>(t))
  for (std::size_t c = 0; c < t; ++c) {
    const std::size_t begin = c * base + std::min(c, rem);
    const std::size_t len = base + (c < rem ? 1 : 0);
    partial[c].update(assignments.subspan(begin, len), behavior.subspan(begin, len));
  }
  for (const auto& p : partial) merge(p);
}

void DsdsTable::merge(const DsdsTable& other) {
  if (other.counts_.size() != counts_.size())
    throw DataError("cannot merge lookup tables of sizes " + std::to_string(counts_.size()) +
                    " and " + std::to_string(other.counts_.size()));
  for (std::size_t c = 0; c < counts_.size(); ++c) {
    counts_[c] += other.counts_[c];
    sums_[c].merge(other.sums_[c]);
  }
  global_count_ += other.global_count_;
  global_sum_.merge(other.global_sum_);
}

double DsdsTable::predict(std::size_t cluster) const {
  check_range(cluster);
  if (counts_[cluster] > 0)
    return sums_[cluster].value() / static_cast<double>(counts_[cluster]);
  if (global_count_ > 0) return global_sum_.value() / static_cast<double>(global_count_);
  return 0.0;
}

std::uint64_t DsdsTable::count(std::size_t cluster) const {
  check_range(cluster);
  return counts_[cluster];
}

double DsdsTable::sum(std::size_t cluster) const {
  check_range(cluster);
  return sums_[cluster].value();
}

void DsdsTable::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "cluster_id,count,sum,mean\n";
  for (std::size_t c = 0; c < counts_.size(); ++c) {
    const double mean = counts_[c] > 0 ? sums_[c].value() / static_cast<double>(counts_[c]) : 0.0;
    out << c << ',' << counts_[c] << ',' << format_double(sums_[c].value()) << ','
        << format_double(mean) << '\n';
  }
  const double gmean = global_count_ > 0
                           ? global_sum_.value() / static_cast<double>(global_count_)
                           : 0.0;
  out << "__global__," << global_count_ << ',' << format_double(global_sum_.value()) << ','
      << format_double(gmean) << '\n';
}

DsdsTable DsdsTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lookup table file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "cluster_id,count,sum,mean")
    throw DataError("malformed lookup table header in " + path);
  std::vector<std::uint64_t> counts;
  std::vector<KahanSum> sums;
  std::uint64_t global_count = 0;
  double global_sum = 0.0;
  bool saw_global = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, count_s, sum_s, mean_s;
    if (!std::getline(ss, id, ',') || !std::getline(ss, count_s, ',') ||
        !std::getline(ss, sum_s, ',') || !std::getline(ss, mean_s, ','))
      throw DataError("malformed lookup table row in " + path);
    if (id == "__global__") {
      global_count = static_cast<std::uint64_t>(parse_int(count_s));
      global_sum = parse_double(sum_s);
      saw_global = true;
    } else {
      counts.push_back(static_cast<std::uint64_t>(parse_int(count_s)));
      KahanSum s;
      s.sum = parse_double(sum_s);
      sums.push_back(s);
    }
  }
  if (!saw_global || counts.empty()) throw DataError("incomplete lookup table file: " + path);
  DsdsTable t(counts.size());
  t.counts_ = std::move(counts);
  t.sums_ = std::move(sums);
  t.global_count_ = global_count;
  t.global_sum_.sum = global_sum;
  return t;
}

}  // namespace sada
