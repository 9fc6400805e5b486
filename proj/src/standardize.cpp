#include "sada/standardize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sada/common.hpp"
#include "sada/kahan.hpp"
#include "sada/kernels.hpp"

namespace sada {

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows == 0 || x.cols == 0) throw DataError("cannot fit standardizer on an empty matrix");
  const std::size_t d = x.cols;
  Standardizer s;
  s.mean.resize(d);
  s.scale.resize(d);
  const auto n = static_cast<double>(x.rows);
  for (std::size_t j = 0; j < d; ++j) {
    KahanSum sum;
    for (std::size_t i = 0; i < x.rows; ++i) sum.add(x(i, j));
    const double mu = sum.value() / n;
    KahanSum sq;
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double delta = x(i, j) - mu;
      sq.add(delta * delta);
    }
    s.mean[j] = mu;
    s.scale[j] = std::max(std::sqrt(sq.value() / n), kScaleFloor);
  }
  return s;
}

Matrix Standardizer::transform(const Matrix& x, int threads) const {
  if (x.cols != mean.size())
    throw DataError("standardizer dimension mismatch: fitted on " + std::to_string(mean.size()) +
                    " columns, input has " + std::to_string(x.cols));
  Matrix out(x.rows, x.cols);
  kernels::standardize(x, mean, scale, out, threads);
  return out;
}

Matrix Standardizer::inverse_transform(const Matrix& x) const {
  if (x.cols != mean.size()) throw DataError("standardizer dimension mismatch");
  Matrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) out(i, j) = x(i, j) * scale[j] + mean[j];
  return out;
}

void Standardizer::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (std::size_t j = 0; j < mean.size(); ++j)
    out << (j ? "," : "") << format_double(mean[j]);
  out << '\n';
  for (std::size_t j = 0; j < scale.size(); ++j)
    out << (j ? "," : "") << format_double(scale[j]);
  out << '\n';
}

Standardizer Standardizer::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open standardizer file: " + path);
  auto read_row = [&](std::vector<double>& row) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("truncated standardizer file: " + path);
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(parse_double(field));
  };
  Standardizer s;
  read_row(s.mean);
  read_row(s.scale);
  if (s.mean.size() != s.scale.size() || s.mean.empty())
    throw DataError("inconsistent standardizer file: " + path);
  return s;
}

}  // namespace sada
