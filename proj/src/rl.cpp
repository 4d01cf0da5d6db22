#include "uc/rl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace uc {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double safe_log(double p) { return std::log(std::max(p, 1e-12)); }

/// Actor input layout: [obs | (g+1)/G | decided bits as +-1, undecided 0].
std::vector<double> actor_input(const PolicyParams& params,
                                const std::vector<double>& obs_encoded,
                                const std::vector<int>& prefix) {
  const int g = static_cast<int>(prefix.size());
  std::vector<double> x(obs_encoded);
  x.push_back(static_cast<double>(g + 1) / params.fleet_size);
  x.resize(obs_encoded.size() + 1 + params.fleet_size, 0.0);
  for (int i = 0; i < g; ++i) {
    x[obs_encoded.size() + 1 + i] = prefix[i] ? 1.0 : -1.0;
  }
  return x;
}

struct Adam {
  std::vector<double> m, v;
  long t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  explicit Adam(int n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double>& theta, const std::vector<double>& grad,
            double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
      theta[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

// --- Mlp ---

Mlp::Mlp(int input_size, std::vector<int> hidden, std::uint64_t seed)
    : input_size_(input_size), hidden_(std::move(hidden)) {
  if (input_size_ <= 0) throw InvalidArgument("mlp: nonpositive input size");
  for (int h : hidden_) {
    if (h <= 0) throw InvalidArgument("mlp: nonpositive hidden size");
  }
  Rng rng(seed);
  std::vector<int> sizes;
  sizes.push_back(input_size_);
  sizes.insert(sizes.end(), hidden_.begin(), hidden_.end());
  sizes.push_back(1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l], fan_out = sizes[l + 1];
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    for (int i = 0; i < fan_out * fan_in; ++i) {
      theta_.push_back((2.0 * rng.uniform01() - 1.0) * s);
    }
    for (int i = 0; i < fan_out; ++i) theta_.push_back(0.0);
  }
}

void Mlp::set_parameters(const std::vector<double>& theta) {
  if (theta.size() != theta_.size()) {
    throw InvalidArgument("mlp: parameter size mismatch");
  }
  theta_ = theta;
}

double Mlp::forward(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != input_size_) {
    throw InvalidArgument("mlp: input size mismatch");
  }
  std::vector<double> a(x);
  std::size_t off = 0;
  std::vector<int> sizes;
  sizes.push_back(input_size_);
  sizes.insert(sizes.end(), hidden_.begin(), hidden_.end());
  sizes.push_back(1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int n_in = sizes[l], n_out = sizes[l + 1];
    std::vector<double> z(n_out);
    for (int i = 0; i < n_out; ++i) {
      double s = theta_[off + static_cast<std::size_t>(n_out) * n_in + i];
      const double* w = &theta_[off + static_cast<std::size_t>(i) * n_in];
      for (int j = 0; j < n_in; ++j) s += w[j] * a[j];
      z[i] = (l + 2 < sizes.size()) ? std::tanh(s) : s;
    }
    off += static_cast<std::size_t>(n_out) * n_in + n_out;
    a = std::move(z);
  }
  return a[0];
}

void Mlp::backward(const std::vector<double>& x, double upstream,
                   std::vector<double>& grad) const {
  if (grad.size() != theta_.size()) grad.resize(theta_.size(), 0.0);
  std::vector<int> sizes;
  sizes.push_back(input_size_);
  sizes.insert(sizes.end(), hidden_.begin(), hidden_.end());
  sizes.push_back(1);

  // Forward pass caching post-activation values per layer.
  std::vector<std::vector<double>> acts;
  acts.push_back(x);
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    offsets.push_back(off);
    const int n_in = sizes[l], n_out = sizes[l + 1];
    std::vector<double> z(n_out);
    for (int i = 0; i < n_out; ++i) {
      double s = theta_[off + static_cast<std::size_t>(n_out) * n_in + i];
      const double* w = &theta_[off + static_cast<std::size_t>(i) * n_in];
      for (int j = 0; j < n_in; ++j) s += w[j] * acts[l][j];
      z[i] = (l + 2 < sizes.size()) ? std::tanh(s) : s;
    }
    off += static_cast<std::size_t>(n_out) * n_in + n_out;
    acts.push_back(std::move(z));
  }

  // Backward pass: delta = dL/dz for the current layer's pre-activations.
  std::vector<double> delta = {upstream};
  for (int l = static_cast<int>(sizes.size()) - 2; l >= 0; --l) {
    const int n_in = sizes[l], n_out = sizes[l + 1];
    const std::size_t o = offsets[l];
    std::vector<double> prev(n_in, 0.0);
    for (int i = 0; i < n_out; ++i) {
      const double d = delta[i];
      double* gw = &grad[o + static_cast<std::size_t>(i) * n_in];
      const double* w = &theta_[o + static_cast<std::size_t>(i) * n_in];
      for (int j = 0; j < n_in; ++j) {
        gw[j] += d * acts[l][j];
        prev[j] += d * w[j];
      }
      grad[o + static_cast<std::size_t>(n_out) * n_in + i] += d;
    }
    if (l > 0) {
      // Chain through the tanh of the layer below.
      for (int j = 0; j < n_in; ++j) {
        const double a = acts[l][j];
        prev[j] *= (1.0 - a * a);
      }
    }
    delta = std::move(prev);
  }
}

// --- PolicyParams ---

PolicyParams PolicyParams::init(const ProblemInstance& inst,
                                const std::vector<int>& hidden,
                                std::uint64_t seed) {
  PolicyParams p;
  p.fleet_size = inst.num_generators();
  p.obs_size = Observation::encoded_size(inst);
  p.actor = Mlp(p.obs_size + 1 + p.fleet_size, hidden,
                substream_seed(seed, 1, 0xAC));
  p.critic = Mlp(p.obs_size, hidden, substream_seed(seed, 2, 0xC1));
  return p;
}

void PolicyParams::save(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "uc-policy-v1";
  j["fleet_size"] = fleet_size;
  j["obs_size"] = obs_size;
  j["hidden"] = actor.hidden();
  j["actor"] = actor.parameters();
  j["critic"] = critic.parameters();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write policy file: " + path);
  out << j.dump(2) << "\n";
}

PolicyParams PolicyParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read policy file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError("malformed policy file " + path + ": " + e.what());
  }
  if (!j.contains("format") || j["format"] != "uc-policy-v1") {
    throw DataError("unrecognised policy format in " + path);
  }
  PolicyParams p;
  p.fleet_size = j.at("fleet_size").get<int>();
  p.obs_size = j.at("obs_size").get<int>();
  const auto hidden = j.at("hidden").get<std::vector<int>>();
  p.actor = Mlp(p.obs_size + 1 + p.fleet_size, hidden, 0);
  p.critic = Mlp(p.obs_size, hidden, 0);
  const auto actor_theta = j.at("actor").get<std::vector<double>>();
  const auto critic_theta = j.at("critic").get<std::vector<double>>();
  if (static_cast<int>(actor_theta.size()) != p.actor.num_parameters() ||
      static_cast<int>(critic_theta.size()) != p.critic.num_parameters()) {
    throw DataError("policy parameter count mismatch in " + path);
  }
  p.actor.set_parameters(actor_theta);
  p.critic.set_parameters(critic_theta);
  return p;
}

// --- sequential policy ---

double policy_bit_prob(const PolicyParams& params,
                       const std::vector<double>& obs_encoded,
                       const std::vector<int>& prefix) {
  if (static_cast<int>(obs_encoded.size()) != params.obs_size) {
    throw InvalidArgument("policy: observation size mismatch");
  }
  if (static_cast<int>(prefix.size()) >= params.fleet_size) {
    throw InvalidArgument("policy: prefix already covers the fleet");
  }
  return sigmoid(params.actor.forward(actor_input(params, obs_encoded, prefix)));
}

SampledAction sample_action(const PolicyParams& params,
                            const std::vector<double>& obs_encoded, Rng& rng) {
  SampledAction out;
  for (int g = 0; g < params.fleet_size; ++g) {
    const double p = policy_bit_prob(params, obs_encoded, out.bits);
    const int bit = rng.bernoulli(p) ? 1 : 0;
    out.log_prob += bit ? safe_log(p) : safe_log(1.0 - p);
    out.bits.push_back(bit);
  }
  return out;
}

std::vector<int> argmax_action(const PolicyParams& params,
                               const std::vector<double>& obs_encoded) {
  std::vector<int> bits;
  for (int g = 0; g < params.fleet_size; ++g) {
    const double p = policy_bit_prob(params, obs_encoded, bits);
    bits.push_back(p >= 0.5 ? 1 : 0);
  }
  return bits;
}

double action_log_prob(const PolicyParams& params,
                       const std::vector<double>& obs_encoded,
                       const std::vector<int>& bits) {
  if (static_cast<int>(bits.size()) != params.fleet_size) {
    throw InvalidArgument("policy: action size mismatch");
  }
  double logp = 0.0;
  std::vector<int> prefix;
  for (int g = 0; g < params.fleet_size; ++g) {
    const double p = policy_bit_prob(params, obs_encoded, prefix);
    logp += bits[g] ? safe_log(p) : safe_log(1.0 - p);
    prefix.push_back(bits[g]);
  }
  return logp;
}

std::vector<SampledAction> enumerate_candidates(
    const PolicyParams& params, const std::vector<double>& obs_encoded,
    double rho) {
  if (rho <= 0.0 || rho > 1.0) throw InvalidArgument("rho must be in (0, 1]");
  const double log_rho = std::log(rho) - 1e-12;
  std::vector<SampledAction> out;
  std::vector<int> prefix;
  // DFS over bit assignments; a prefix whose probability is already below
  // the threshold cannot lead to a qualifying action.
  auto dfs = [&](auto&& self, double logp) -> void {
    if (logp < log_rho) return;
    if (static_cast<int>(prefix.size()) == params.fleet_size) {
      out.push_back({prefix, logp});
      return;
    }
    const double p = policy_bit_prob(params, obs_encoded, prefix);
    for (int bit : {0, 1}) {
      prefix.push_back(bit);
      self(self, logp + (bit ? safe_log(p) : safe_log(1.0 - p)));
      prefix.pop_back();
    }
  };
  dfs(dfs, 0.0);
  return out;
}

// --- PPO ---

namespace {

struct Sample {
  std::vector<double> obs;
  std::vector<int> bits;
  double log_prob_old = 0.0;
  double reward = 0.0;  // transformed
  double value = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
};

}  // namespace

TrainResult ppo_train(const std::vector<ProblemInstance>& training_days,
                      const TrainConfig& cfg) {
  if (training_days.empty()) {
    throw InvalidArgument("ppo_train: no training days");
  }
  const ProblemInstance& first = training_days[0];
  for (const auto& day : training_days) {
    if (day.num_generators() != first.num_generators() || day.T != first.T) {
      throw InvalidArgument("ppo_train: training days disagree on fleet or horizon");
    }
  }
  const double kappa = cfg.reward_scale > 0.0 ? cfg.reward_scale
                                              : default_reward_scale(first);

  TrainResult result;
  result.params = PolicyParams::init(first, cfg.hidden,
                                     substream_seed(cfg.seed, 0, 0x11));
  PolicyParams& params = result.params;
  Adam adam_actor(params.actor.num_parameters());
  Adam adam_critic(params.critic.num_parameters());

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    // --- collect ---
    Rng day_rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(iter), 0xDA));
    std::vector<Sample> batch;
    double cost_sum = 0.0, reward_sum = 0.0;
    for (int e = 0; e < cfg.episodes_per_iteration; ++e) {
      const std::uint64_t episode =
          static_cast<std::uint64_t>(iter) * cfg.episodes_per_iteration + e;
      const ProblemInstance& day =
          training_days[day_rng.below(training_days.size())];
      UcEnvironment env(day, substream_seed(cfg.seed, episode, 0xE9));
      Rng policy_rng(substream_seed(cfg.seed, episode, 0xA7));
      std::vector<Sample> episode_samples;
      while (!env.done()) {
        Sample s;
        s.obs = env.observe().encode(day);
        SampledAction a = sample_action(params, s.obs, policy_rng);
        s.bits = a.bits;
        s.log_prob_old = a.log_prob;
        s.value = params.critic.forward(s.obs);
        const StepResult step = env.step(a.bits);
        s.reward = transform_reward(step.reward, kappa);
        cost_sum += -step.reward;
        reward_sum += s.reward;
        episode_samples.push_back(std::move(s));
      }
      // GAE over this episode (terminal value zero).
      double gae = 0.0;
      for (int t = static_cast<int>(episode_samples.size()) - 1; t >= 0; --t) {
        const double v_next = (t + 1 < static_cast<int>(episode_samples.size()))
                                  ? episode_samples[t + 1].value
                                  : 0.0;
        const double delta = episode_samples[t].reward + cfg.gamma * v_next -
                             episode_samples[t].value;
        gae = delta + cfg.gamma * cfg.gae_lambda * gae;
        episode_samples[t].advantage = gae;
        episode_samples[t].ret = gae + episode_samples[t].value;
      }
      for (auto& s : episode_samples) batch.push_back(std::move(s));
    }
    const int n = static_cast<int>(batch.size());
    double adv_mean = 0.0, adv_sq = 0.0;
    for (const auto& s : batch) adv_mean += s.advantage;
    adv_mean /= n;
    for (const auto& s : batch) {
      adv_sq += (s.advantage - adv_mean) * (s.advantage - adv_mean);
    }
    const double adv_std = std::sqrt(adv_sq / n) + 1e-8;
    for (auto& s : batch) s.advantage = (s.advantage - adv_mean) / adv_std;

    // --- optimise ---
    double loss_actor = 0.0, loss_critic = 0.0, mean_entropy = 0.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::vector<double> grad_actor(params.actor.num_parameters(), 0.0);
      std::vector<double> grad_critic(params.critic.num_parameters(), 0.0);
      loss_actor = loss_critic = mean_entropy = 0.0;
      for (const auto& s : batch) {
        // Per-bit probabilities along the taken action.
        std::vector<double> probs, logits;
        std::vector<std::vector<double>> inputs;
        std::vector<int> prefix;
        double logp_new = 0.0, entropy = 0.0;
        for (int g = 0; g < params.fleet_size; ++g) {
          inputs.push_back(actor_input(params, s.obs, prefix));
          const double z = params.actor.forward(inputs.back());
          const double p = sigmoid(z);
          probs.push_back(p);
          logits.push_back(z);
          logp_new += s.bits[g] ? safe_log(p) : safe_log(1.0 - p);
          entropy -= p * safe_log(p) + (1.0 - p) * safe_log(1.0 - p);
          prefix.push_back(s.bits[g]);
        }
        const double ratio = std::exp(logp_new - s.log_prob_old);
        const double clipped =
            std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
        const double surr1 = ratio * s.advantage;
        const double surr2 = clipped * s.advantage;
        loss_actor += -std::min(surr1, surr2) / n;
        mean_entropy += entropy / n;
        const double dj_dlogp = (surr1 <= surr2) ? s.advantage * ratio : 0.0;
        for (int g = 0; g < params.fleet_size; ++g) {
          const double p = probs[g];
          // d(objective)/d(logit): policy-gradient term plus entropy bonus.
          const double up = dj_dlogp * (s.bits[g] - p) -
                            cfg.entropy_coeff * logits[g] * p * (1.0 - p);
          // Minimise the negated objective.
          params.actor.backward(inputs[g], -up / n, grad_actor);
        }
        const double v = params.critic.forward(s.obs);
        loss_critic += (v - s.ret) * (v - s.ret) / n;
        params.critic.backward(s.obs, 2.0 * (v - s.ret) / n, grad_critic);
      }
      if (!std::isfinite(loss_actor) || !std::isfinite(loss_critic) ||
          !all_finite(grad_actor) || !all_finite(grad_critic)) {
        throw DataError("training diverged at iteration " +
                        std::to_string(iter));
      }
      std::vector<double> theta = params.actor.parameters();
      adam_actor.step(theta, grad_actor, cfg.lr_actor);
      params.actor.set_parameters(theta);
      theta = params.critic.parameters();
      adam_critic.step(theta, grad_critic, cfg.lr_critic);
      params.critic.set_parameters(theta);
      if (!all_finite(params.actor.parameters()) ||
          !all_finite(params.critic.parameters())) {
        throw DataError("training diverged at iteration " +
                        std::to_string(iter));
      }
    }

    TrainLogRow row;
    row.iteration = iter;
    row.mean_cost = cost_sum / cfg.episodes_per_iteration;
    row.mean_reward = reward_sum / cfg.episodes_per_iteration;
    row.loss_actor = loss_actor;
    row.loss_critic = loss_critic;
    row.entropy = mean_entropy;
    result.curve.push_back(row);
  }
  return result;
}

void save_training_log(const std::vector<TrainLogRow>& curve,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write training log: " + path);
  out << "iteration,mean_cost,mean_reward,loss_actor,loss_critic,entropy\n";
  out.precision(12);
  for (const auto& r : curve) {
    out << r.iteration << "," << r.mean_cost << "," << r.mean_reward << ","
        << r.loss_actor << "," << r.loss_critic << "," << r.entropy << "\n";
  }
}

// --- agents ---

Schedule rl_mf_solve(const PolicyParams& params, const ProblemInstance& inst) {
  if (params.fleet_size != inst.num_generators() ||
      params.obs_size != Observation::encoded_size(inst)) {
    throw InvalidArgument("policy does not match the instance dimensions");
  }
  UcEnvironment env(inst, 0, /*zero_noise=*/true);
  while (!env.done()) {
    env.step(argmax_action(params, env.observe().encode(inst)));
  }
  return Schedule::from_u(env.realised_u(), inst.generators);
}

Schedule rl_la_solve(const PolicyParams& params, const ProblemInstance& inst,
                     double rho, int n_scenarios, std::uint64_t seed) {
  if (params.fleet_size != inst.num_generators() ||
      params.obs_size != Observation::encoded_size(inst)) {
    throw InvalidArgument("policy does not match the instance dimensions");
  }
  if (n_scenarios <= 0) throw InvalidArgument("n_scenarios must be positive");
  const int G = inst.num_generators(), T = inst.T;

  // Seeded error realisations, one independent substream pair per scenario.
  std::vector<std::vector<double>> ndfe(n_scenarios);
  for (int s = 0; s < n_scenarios; ++s) {
    const auto ed = sample_arma(inst.demand_arma, T,
                                net_demand_error_stream_seed(seed, s, false));
    const auto ew = sample_arma(inst.wind_arma, T,
                                net_demand_error_stream_seed(seed, s, true));
    ndfe[s].resize(T);
    for (int t = 0; t < T; ++t) {
      const double d_err =
          std::max(0.0, inst.demand[t] + ed.values[t]) - inst.demand[t];
      const double w_err =
          std::max(0.0, inst.wind[t] + ew.values[t]) - inst.wind[t];
      ndfe[s][t] = d_err - w_err;
    }
  }

  UcEnvironment env(inst, 0, /*zero_noise=*/true);
  while (!env.done()) {
    const int t = env.timestep();
    const std::vector<double> obs = env.observe().encode(inst);
    std::vector<SampledAction> raw = enumerate_candidates(params, obs, rho);
    raw.push_back({env.current_commitment(),
                   action_log_prob(params, obs, env.current_commitment())});

    // Deduplicate by the feasibility-masked action, keeping the highest
    // probability label for tie-breaking.
    std::vector<std::pair<std::vector<int>, double>> candidates;
    for (const auto& a : raw) {
      std::vector<int> applied = env.mask_action(a.bits);
      bool merged = false;
      for (auto& c : candidates) {
        if (c.first == applied) {
          c.second = std::max(c.second, a.log_prob);
          merged = true;
          break;
        }
      }
      if (!merged) candidates.emplace_back(std::move(applied), a.log_prob);
    }

    const std::vector<int>& commit = env.current_commitment();
    std::vector<int> best;
    double best_cost = kInf, best_logp = -kInf;
    for (const auto& [applied, logp] : candidates) {
      std::vector<int> starts(G, 0);
      for (int g = 0; g < G; ++g) starts[g] = (!commit[g] && applied[g]) ? 1 : 0;
      double mean_cost = 0.0;
      for (int s = 0; s < n_scenarios; ++s) {
        const double net = inst.demand[t] - inst.wind[t] + ndfe[s][t];
        const DispatchResult d = dispatch(inst, applied, net);
        mean_cost += period_cost(inst, applied, d, starts);
      }
      mean_cost /= n_scenarios;
      if (mean_cost < best_cost ||
          (mean_cost == best_cost && logp > best_logp)) {
        best_cost = mean_cost;
        best_logp = logp;
        best = applied;
      }
    }
    env.step(best);
  }
  return Schedule::from_u(env.realised_u(), inst.generators);
}

}  // namespace uc
