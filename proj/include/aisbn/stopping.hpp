#pragma once
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aisbn {

// Optional lookup for the delta_s <- f_sigma^-1(delta, eps_r) adjustment.
// The exact f_sigma lives in the stopping-rule literature and is not
// reproduced here; the identity is its own small-eps approximation. One
// published point ships as a ready-made table (paper_delta_s_table).
struct DeltaSEntry {
  double delta;
  double eps_r;
  double delta_s;
};
struct DeltaSTable {
  std::vector<DeltaSEntry> entries;
};

inline const DeltaSTable& paper_delta_s_table() {
  static const DeltaSTable t{{{0.025, 0.025, 0.0223}}};
  return t;
}

// delta_s for a requested (delta, eps_r). Defaults to the identity. A table
// entry matching (delta, eps_r) overrides it, except that for eps_r <= 0.01
// delta_s must stay within 5% of delta; entries breaking that are ignored
// with a warning rather than rejected outright.
inline double f_sigma_inv(double delta, double eps_r, const DeltaSTable* table = nullptr,
                          std::string* warning = nullptr) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta out of (0,1)");
  if (table) {
    for (const DeltaSEntry& e : table->entries) {
      if (std::fabs(e.delta - delta) <= 1e-12 && std::fabs(e.eps_r - eps_r) <= 1e-12) {
        if (eps_r <= 0.01 && std::fabs(e.delta_s - delta) > 0.05 * delta) {
          if (warning)
            *warning = "delta_s table entry deviates more than 5% from delta at eps_r <= 0.01; "
                       "using delta_s = delta";
          return delta;
        }
        return e.delta_s;
      }
    }
  }
  return delta;
}

// (eps_r, delta, delta_s) plus the precomputed stage-loop prefactor
//   alpha = ln(2/delta_s) / (eps_r * (1 - eps_r)).
struct StoppingParams {
  double eps_r = 0.025;
  double delta = 0.025;
  double delta_s = 0.025;
  double alpha = 0.0;

  static StoppingParams make(double eps_r, double delta, const DeltaSTable* table = nullptr,
                             std::string* warning = nullptr) {
    if (!(eps_r > 0.0 && eps_r < 1.0)) throw std::invalid_argument("eps_r out of (0,1)");
    StoppingParams p;
    p.eps_r = eps_r;
    p.delta = delta;
    p.delta_s = f_sigma_inv(delta, eps_r, table, warning);
    p.alpha = std::log(2.0 / p.delta_s) / (eps_r * (1.0 - eps_r));
    return p;
  }
};

// Estimated moments of the score variable: upper bound b, mean, variance.
struct MomentEstimates {
  double b = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;
};

// Sample counts are returned as ceiled doubles: requirements blow past any
// integer type when the mean is tiny, and they are only ever compared
// against counters or folded into stage weights.

// N >= (b/mu) * [1/((1+e)ln(1+e) - e)] * ln(2/delta); needs the bound only.
inline double min_samples_mu(double b, double mu, double eps_r, double delta) {
  if (!(b > 0.0 && mu > 0.0 && mu <= b)) throw std::invalid_argument("need 0 < mu <= b");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta out of (0,1)");
  if (!(eps_r > 0.0 && eps_r < std::min(1.0, b / mu - 1.0)))
    throw std::invalid_argument("epsilon out of range for Theorem 3.1");
  const double denom = (1.0 + eps_r) * std::log1p(eps_r) - eps_r;
  return std::ceil((b / mu) * std::log(2.0 / delta) / denom);
}

// N >= (b/mu) * [1/(e[(1 + s2/(b e mu)) ln(1 + b e mu/s2) - 1])] * ln(2/delta).
inline double min_samples_sigma(double b, double mu, double sigma2, double eps_r, double delta) {
  if (!(b > 0.0 && mu > 0.0)) throw std::invalid_argument("need b > 0 and mu > 0");
  if (!(eps_r > 0.0 && eps_r < 1.0)) throw std::invalid_argument("eps_r out of (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta out of (0,1)");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("degenerate variance");
  const double r = b * eps_r * mu / sigma2;
  const double denom = eps_r * ((1.0 + 1.0 / r) * std::log1p(r) - 1.0);
  return std::ceil((b / mu) * std::log(2.0 / delta) / denom);
}

// The stage-loop requirement:
//   N~ = alpha * b~ / [(mu~ + s2~/(b~ e)) ln(1 + b~ e mu~/s2~) - mu~].
// Zero variance (all scores equal so far) substitutes s2 = b*e*mu, the scale
// at which the zero-one rule's max clause switches; the true s2 -> 0 limit
// is 0 samples, unsafe when the zero is a small-sample artifact. Callers can
// observe the substitution through `degenerate`.
inline double required_samples_fig1(const StoppingParams& p, MomentEstimates est,
                                    bool* degenerate = nullptr) {
  if (degenerate) *degenerate = false;
  if (!(est.b > 0.0)) throw std::invalid_argument("no positive score observed");
  if (!(est.mu > 0.0)) throw std::invalid_argument("mean must be positive");
  if (est.sigma2 <= 0.0) {
    est.sigma2 = est.b * p.eps_r * est.mu;
    if (degenerate) *degenerate = true;
  }
  const double r = est.b * p.eps_r * est.mu / est.sigma2;
  const double denom = (est.mu + est.sigma2 / (est.b * p.eps_r)) * std::log1p(r) - est.mu;
  return std::ceil(p.alpha * est.b / denom);
}

// Theorem 3.1 requirement with the stage-loop delta_s substitution; used by
// the mu-driven engine variant. No eps-range gate: b and mu are themselves
// estimates here, and the formula stays finite regardless.
inline double required_samples_mu_stage(const StoppingParams& p, const MomentEstimates& est) {
  if (!(est.b > 0.0)) throw std::invalid_argument("no positive score observed");
  if (!(est.mu > 0.0)) throw std::invalid_argument("mean must be positive");
  const double denom = (1.0 + p.eps_r) * std::log1p(p.eps_r) - p.eps_r;
  return std::ceil((est.b / est.mu) * std::log(2.0 / p.delta_s) / denom);
}

// Generalized zero-one estimator rule: N >= 4*lambda*rho/(mu^2 e^2) ln(2/delta)
// with lambda = e - 2 and rho = max{sigma2, e*mu}. Scores presumed in [0,1].
inline double min_samples_zero_one(double mu, double sigma2, double eps_r, double delta) {
  if (!(mu > 0.0)) throw std::invalid_argument("mean must be positive");
  if (!(eps_r > 0.0 && eps_r < 1.0)) throw std::invalid_argument("eps_r out of (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta out of (0,1)");
  const double lambda = std::exp(1.0) - 2.0;
  const double rho = std::max(sigma2, eps_r * mu);
  return std::ceil(4.0 * lambda * rho / (mu * mu * eps_r * eps_r) * std::log(2.0 / delta));
}

// Unbiased sample variance from running sums, clamped at 0: the cancellation
// in (sum_z2 - n*mean^2) can go slightly negative in finite precision.
inline double variance_estimate(double sum_z, double sum_z2, std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("variance needs at least 2 samples");
  const double mean = sum_z / static_cast<double>(n);
  const double v = (sum_z2 - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
  return std::max(0.0, v);
}

// Relative-error interval for a ratio of two (eps_r, delta) relative
// approximations: [-2e/(1+e), +2e/(1-e)], holding with confidence >= 1-2*delta.
struct RelativeErrorInterval {
  double lower = 0.0;
  double upper = 0.0;
};

inline RelativeErrorInterval posterior_error_bounds(double eps_r) {
  if (!(eps_r > 0.0 && eps_r < 1.0)) throw std::invalid_argument("eps_r out of (0,1)");
  return RelativeErrorInterval{-2.0 * eps_r / (1.0 + eps_r), 2.0 * eps_r / (1.0 - eps_r)};
}

inline double posterior_confidence(double delta) { return 1.0 - 2.0 * delta; }

} // namespace aisbn
