#pragma once
#include <cstdint>

namespace aisbn {

// Kahan compensated summation. Deterministic for a fixed feed order; keeps
// absolute error near one ulp of the running sum even over millions of terms.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
  void reset() { sum = 0.0; carry = 0.0; }
};

} // namespace aisbn
