#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uc/common.hpp"

namespace uc {

/// ARMA(p, q) forecast-error process specification. The white-noise terms
/// are standard normal scaled by `sigma` (MW).
struct ArmaSpec {
  std::vector<double> ar_coeffs;
  std::vector<double> ma_coeffs;
  double sigma = 0.0;

  /// Checks that all AR characteristic roots lie inside the unit circle
  /// (equivalently, the AR polynomial roots lie outside). Throws DataError
  /// for a non-stationary process.
  void check_stationary() const;

  bool operator==(const ArmaSpec&) const = default;
};

/// One sampled error trajectory plus the final process lags, so sampling can
/// be resumed from where a trajectory ended.
struct ErrorTrajectory {
  std::vector<double> values;
  std::vector<double> final_ar_lags;     // most recent first
  std::vector<double> final_noise_lags;  // most recent first
};

/// Stateful single-step sampler for an ARMA process. Initial lags are zero:
/// the error is zero at forecast issuance.
class ArmaProcess {
 public:
  ArmaProcess(const ArmaSpec& spec, std::uint64_t seed);

  /// Advances one step and returns the new error value.
  double step();

  const ArmaSpec& spec() const { return spec_; }
  const std::vector<double>& ar_lags() const { return ar_lags_; }
  const std::vector<double>& noise_lags() const { return noise_lags_; }

 private:
  ArmaSpec spec_;
  Rng rng_;
  std::vector<double> ar_lags_;     // most recent first
  std::vector<double> noise_lags_;  // most recent first
};

/// Samples a length-T trajectory with zero initial lags; fully deterministic
/// given the seed.
ErrorTrajectory sample_arma(const ArmaSpec& spec, int T, std::uint64_t seed);

ArmaSpec load_arma_spec(const std::string& path);
void save_arma_spec(const ArmaSpec& spec, const std::string& path);

}  // namespace uc
