#pragma once

#include <string>
#include <vector>

#include "sada/matrix.hpp"

namespace sada {

// Per-dimension standardization fitted once on training data and applied
// everywhere; immutable after fit.
struct Standardizer {
  std::vector<double> mean;   // length D
  std::vector<double> scale;  // population std with floor, length D

  static constexpr double kScaleFloor = 1e-8;

  // mean[j] = column mean, scale[j] = max(population std of column j, floor)
  static Standardizer fit(const Matrix& x);

  Matrix transform(const Matrix& x, int threads = 1) const;
  Matrix inverse_transform(const Matrix& x) const;

  // Two-row comma-separated file: mean row, scale row.
  void save_csv(const std::string& path) const;
  static Standardizer load_csv(const std::string& path);
};

}  // namespace sada
