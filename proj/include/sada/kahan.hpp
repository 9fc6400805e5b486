#pragma once

namespace sada {

// Kahan compensated accumulator: one (sum, carry) pair per tracked quantity.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  // Folds another accumulator in; the carry is pending correction, so it
  // enters negated.
  void merge(const KahanSum& o) {
    add(o.sum);
    add(-o.carry);
  }

  double value() const { return sum; }
};

}  // namespace sada
