#include "uc/forecast.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace uc {

void ArmaSpec::check_stationary() const {
  if (sigma < 0.0) throw DataError("ARMA spec: sigma must be >= 0");
  const int p = static_cast<int>(ar_coeffs.size());
  if (p == 0) return;
  // Characteristic roots of z^p - a1 z^{p-1} - ... - ap must lie strictly
  // inside the unit circle.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) companion(0, i) = ar_coeffs[i];
  for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  const auto roots = companion.eigenvalues();
  for (int i = 0; i < p; ++i)
    if (std::abs(roots[i]) >= 1.0 - 1e-9)
      throw DataError("ARMA spec: AR polynomial is not stationary");
}

ArmaProcess::ArmaProcess(const ArmaSpec& spec, std::uint64_t seed)
    : spec_(spec),
      rng_(seed),
      ar_lags_(spec.ar_coeffs.size(), 0.0),
      noise_lags_(spec.ma_coeffs.size(), 0.0) {}

double ArmaProcess::step() {
  const double eps = spec_.sigma * rng_.normal();
  double value = eps;
  for (size_t i = 0; i < spec_.ar_coeffs.size(); ++i)
    value += spec_.ar_coeffs[i] * ar_lags_[i];
  for (size_t i = 0; i < spec_.ma_coeffs.size(); ++i)
    value += spec_.ma_coeffs[i] * noise_lags_[i];
  if (!ar_lags_.empty()) {
    std::rotate(ar_lags_.rbegin(), ar_lags_.rbegin() + 1, ar_lags_.rend());
    ar_lags_[0] = value;
  }
  if (!noise_lags_.empty()) {
    std::rotate(noise_lags_.rbegin(), noise_lags_.rbegin() + 1,
                noise_lags_.rend());
    noise_lags_[0] = eps;
  }
  return value;
}

ErrorTrajectory sample_arma(const ArmaSpec& spec, int T, std::uint64_t seed) {
  spec.check_stationary();
  ArmaProcess process(spec, seed);
  ErrorTrajectory traj;
  traj.values.reserve(T);
  for (int t = 0; t < T; ++t) traj.values.push_back(process.step());
  traj.final_ar_lags = process.ar_lags();
  traj.final_noise_lags = process.noise_lags();
  return traj;
}

using nlohmann::json;

ArmaSpec load_arma_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ARMA spec file: " + path);
  json j;
  in >> j;
  ArmaSpec spec;
  spec.ar_coeffs = j.at("ar").get<std::vector<double>>();
  spec.ma_coeffs = j.at("ma").get<std::vector<double>>();
  spec.sigma = j.at("sigma").get<double>();
  spec.check_stationary();
  return spec;
}

void save_arma_spec(const ArmaSpec& spec, const std::string& path) {
  json j = {{"ar", spec.ar_coeffs}, {"ma", spec.ma_coeffs}, {"sigma", spec.sigma}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot write ARMA spec file: " + path);
  out << j.dump(2) << "\n";
}

// --- net-demand forecast error machinery ---

namespace {

constexpr std::uint64_t kDemandTag = 0xD0;
constexpr std::uint64_t kWindTag = 0x10D;

// Clipped demand/wind errors differenced into one net-demand error, for
// sample index `s` of the master seed.
std::vector<double> one_ndfe_sample(const ProblemInstance& inst,
                                    std::uint64_t seed, std::uint64_t s) {
  const auto eta_d =
      sample_arma(inst.demand_arma, inst.T, substream_seed(seed, s, kDemandTag));
  const auto eta_w =
      sample_arma(inst.wind_arma, inst.T, substream_seed(seed, s, kWindTag));
  std::vector<double> ndfe(inst.T);
  for (int t = 0; t < inst.T; ++t) {
    const double d_err =
        std::max(0.0, inst.demand[t] + eta_d.values[t]) - inst.demand[t];
    const double w_err =
        std::max(0.0, inst.wind[t] + eta_w.values[t]) - inst.wind[t];
    ndfe[t] = d_err - w_err;
  }
  return ndfe;
}

// Linear interpolation between order statistics of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const size_t n = sorted.size();
  const double pos = q * static_cast<double>(n - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::uint64_t net_demand_error_stream_seed(std::uint64_t master,
                                           std::uint64_t sample_index,
                                           bool wind) {
  return substream_seed(master, sample_index, wind ? kWindTag : kDemandTag);
}

std::vector<std::vector<double>> net_demand_error_samples(
    const ProblemInstance& inst, int n_samples, std::uint64_t seed) {
  if (n_samples < 1)
    throw InvalidArgument("net_demand_error_samples: n_samples must be >= 1");
  std::vector<std::vector<double>> samples;
  samples.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s)
    samples.push_back(one_ndfe_sample(inst, seed, s));
  return samples;
}

std::vector<double> scenario_probabilities(const std::vector<double>& quantiles) {
  const int N = static_cast<int>(quantiles.size());
  if (N < 4) throw InvalidArgument("unsupported-tree-size: requires N >= 4");
  for (int n = 0; n < N; ++n) {
    if (quantiles[n] <= 0.0 || quantiles[n] >= 1.0)
      throw InvalidArgument("quantiles must lie strictly in (0,1)");
    if (n > 0 && quantiles[n] <= quantiles[n - 1])
      throw InvalidArgument("quantiles must be strictly ascending");
  }
  const auto& q = quantiles;
  std::vector<double> phi(N);
  phi[0] = 0.5 * q[1] * q[1] / (q[1] - q[0]);
  phi[1] = 0.5 * (q[2] - q[0] - q[0] * q[0] / (q[1] - q[0]));
  for (int n = 2; n < N - 2; ++n) phi[n] = 0.5 * (q[n + 1] - q[n - 1]);
  phi[N - 2] = 0.5 * (q[N - 1] - q[N - 3] -
                      (1.0 - q[N - 1]) * (1.0 - q[N - 1]) / (q[N - 1] - q[N - 2]));
  phi[N - 1] =
      0.5 * (1.0 - q[N - 2]) * (1.0 - q[N - 2]) / (q[N - 1] - q[N - 2]);
  for (int n = 0; n < N; ++n)
    if (phi[n] <= 0.0)
      throw InvalidArgument("degenerate-quantile-spacing: phi_" +
                            std::to_string(n + 1) + " <= 0");
  return phi;
}

ScenarioTree build_scenario_tree(const ProblemInstance& inst,
                                 const std::vector<double>& quantiles,
                                 int n_samples, std::uint64_t seed) {
  ScenarioTree tree;
  tree.quantiles = quantiles;
  tree.probabilities = scenario_probabilities(quantiles);  // validates quantiles
  const int N = static_cast<int>(quantiles.size());

  auto samples = net_demand_error_samples(inst, n_samples, seed);
  tree.ndfe.assign(inst.T, std::vector<double>(N, 0.0));
  std::vector<double> column(n_samples);
  for (int t = 0; t < inst.T; ++t) {
    for (int s = 0; s < n_samples; ++s) column[s] = samples[s][t];
    std::sort(column.begin(), column.end());
    for (int n = 0; n < N; ++n)
      tree.ndfe[t][n] = quantile_sorted(column, quantiles[n]);
  }
  return tree;
}

ScenarioTree ScenarioTree::deterministic(int T) {
  ScenarioTree tree;
  tree.quantiles = {0.5};
  tree.probabilities = {1.0};
  tree.ndfe.assign(T, std::vector<double>(1, 0.0));
  return tree;
}

ScenarioTree ScenarioTree::from_trajectory(const std::vector<double>& ndfe) {
  ScenarioTree tree;
  tree.quantiles = {0.5};
  tree.probabilities = {1.0};
  tree.ndfe.assign(ndfe.size(), std::vector<double>(1, 0.0));
  for (size_t t = 0; t < ndfe.size(); ++t) tree.ndfe[t][0] = ndfe[t];
  return tree;
}

std::vector<double> ndfe_std(const ProblemInstance& inst, int n_samples,
                             std::uint64_t seed) {
  if (n_samples < 2) throw InvalidArgument("ndfe_std: n_samples must be >= 2");
  auto samples = net_demand_error_samples(inst, n_samples, seed);
  std::vector<double> sigma(inst.T, 0.0);
  for (int t = 0; t < inst.T; ++t) {
    double mean = 0.0;
    for (int s = 0; s < n_samples; ++s) mean += samples[s][t];
    mean /= n_samples;
    double ss = 0.0;
    for (int s = 0; s < n_samples; ++s) {
      const double d = samples[s][t] - mean;
      ss += d * d;
    }
    sigma[t] = std::sqrt(ss / (n_samples - 1));
  }
  return sigma;
}

void export_scenario_tree_csv(const ScenarioTree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write scenario tree file: " + path);
  out << "period,scenario,ndfe_mw,probability\n";
  out.precision(12);
  for (size_t t = 0; t < tree.ndfe.size(); ++t)
    for (size_t n = 0; n < tree.ndfe[t].size(); ++n)
      out << (t + 1) << "," << (n + 1) << "," << tree.ndfe[t][n] << ","
          << tree.probabilities[n] << "\n";
}

}  // namespace uc
