#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uc/environment.hpp"
#include "uc/system_model.hpp"

namespace uc {

/// Feed-forward network with tanh hidden layers and a scalar linear head.
/// Parameters are exposed flat for optimisation and serialisation.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input_size, std::vector<int> hidden, std::uint64_t seed);

  double forward(const std::vector<double>& x) const;
  /// Accumulates upstream * d(output)/d(theta) into `grad` (same layout as
  /// parameters()).
  void backward(const std::vector<double>& x, double upstream,
                std::vector<double>& grad) const;

  int input_size() const { return input_size_; }
  const std::vector<int>& hidden() const { return hidden_; }
  int num_parameters() const { return static_cast<int>(theta_.size()); }
  const std::vector<double>& parameters() const { return theta_; }
  void set_parameters(const std::vector<double>& theta);

  bool operator==(const Mlp&) const = default;

 private:
  int input_size_ = 0;
  std::vector<int> hidden_;
  std::vector<double> theta_;  // layer-major: W then b per layer
};

/// Actor-critic parameters for one fleet size. The actor scores one
/// commitment bit at a time, conditioned on the observation, the generator
/// index and the bits already decided.
struct PolicyParams {
  int fleet_size = 0;
  int obs_size = 0;
  Mlp actor;   // input: obs + normalised index + prefix bits (length G)
  Mlp critic;  // input: obs

  static PolicyParams init(const ProblemInstance& inst,
                           const std::vector<int>& hidden, std::uint64_t seed);
  void save(const std::string& path) const;
  static PolicyParams load(const std::string& path);
  bool operator==(const PolicyParams&) const = default;
};

/// Probability that the next bit is 1, given the decided prefix.
double policy_bit_prob(const PolicyParams& params,
                       const std::vector<double>& obs_encoded,
                       const std::vector<int>& prefix);

struct SampledAction {
  std::vector<int> bits;
  double log_prob = 0.0;
};

SampledAction sample_action(const PolicyParams& params,
                            const std::vector<double>& obs_encoded, Rng& rng);

/// Greedy per-bit decoding; a tie at probability exactly 0.5 commits.
std::vector<int> argmax_action(const PolicyParams& params,
                               const std::vector<double>& obs_encoded);

/// Joint log-probability of a full action under the sequential policy.
double action_log_prob(const PolicyParams& params,
                       const std::vector<double>& obs_encoded,
                       const std::vector<int>& bits);

struct TrainConfig {
  std::vector<int> hidden = {64, 64};
  int iterations = 50;
  int episodes_per_iteration = 8;
  int epochs = 4;
  double clip_eps = 0.2;
  double lr_actor = 3e-4;
  double lr_critic = 1e-3;
  double gamma = 1.0;
  double gae_lambda = 0.95;
  double entropy_coeff = 0.01;
  double reward_scale = 0.0;  // 0: default_reward_scale(inst)
  std::uint64_t seed = 1;
};

struct TrainLogRow {
  int iteration = 0;
  double mean_cost = 0.0;
  double mean_reward = 0.0;
  double loss_actor = 0.0;
  double loss_critic = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<TrainLogRow> curve;
};

/// PPO with a clipped surrogate objective; rewards pass through the log
/// transform, advantages are GAE-estimated and batch-normalised. Fully
/// deterministic given cfg.seed. Days are drawn per episode from the
/// training set.
TrainResult ppo_train(const std::vector<ProblemInstance>& training_days,
                      const TrainConfig& cfg);

void save_training_log(const std::vector<TrainLogRow>& curve,
                       const std::string& path);

/// Model-free agent: greedy policy rollout under zero realised noise;
/// masking guarantees a feasible schedule.
Schedule rl_mf_solve(const PolicyParams& params, const ProblemInstance& inst);

/// One-step lookahead agent: enumerates the actions whose joint probability
/// meets `rho` (at most floor(1/rho) of them) plus do-nothing, scores each
/// by mean immediate cost over `n_scenarios` seeded error draws, and takes
/// the cheapest (ties by higher probability).
Schedule rl_la_solve(const PolicyParams& params, const ProblemInstance& inst,
                     double rho = 0.05, int n_scenarios = 100,
                     std::uint64_t seed = 0);

/// Exposed for tests: the thresholded candidate set at one state.
std::vector<SampledAction> enumerate_candidates(
    const PolicyParams& params, const std::vector<double>& obs_encoded,
    double rho);

}  // namespace uc
