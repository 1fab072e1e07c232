#pragma once
// Extended-precision (long double) evaluations of the sample-size formulas,
// kept independent of the double-precision implementations they check.

#include <cmath>

namespace testsupport {

inline long double oracle_eq3(long double b, long double mu, long double eps, long double delta) {
  return std::ceil((b / mu) * std::log(2.0L / delta) /
                   ((1.0L + eps) * std::log(1.0L + eps) - eps));
}

inline long double oracle_eq4(long double b, long double mu, long double s2, long double eps,
                              long double delta) {
  const long double inner =
      (1.0L + s2 / (b * eps * mu)) * std::log(1.0L + b * eps * mu / s2) - 1.0L;
  return std::ceil((b / mu) * std::log(2.0L / delta) / (eps * inner));
}

inline long double oracle_alpha(long double eps, long double delta_s) {
  return std::log(2.0L / delta_s) / (eps * (1.0L - eps));
}

inline long double oracle_fig1(long double b, long double mu, long double s2, long double eps,
                               long double delta_s) {
  const long double denom =
      (mu + s2 / (b * eps)) * std::log(1.0L + b * eps * mu / s2) - mu;
  return std::ceil(oracle_alpha(eps, delta_s) * b / denom);
}

inline long double oracle_eq6(long double mu, long double s2, long double eps, long double delta) {
  const long double lambda = std::exp(1.0L) - 2.0L;
  const long double rho = s2 > eps * mu ? s2 : eps * mu;
  return std::ceil(4.0L * lambda * rho / (mu * mu * eps * eps) * std::log(2.0L / delta));
}

} // namespace testsupport
