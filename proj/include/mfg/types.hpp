#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mfg/errors.hpp"

namespace mfg {

using Eigen::Index;

template <class Scalar>
using VectorX = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Tolerance for "sums to one" checks on probability rows.
inline constexpr double kDistributionTol = 1e-9;

// Whether returns, policy evaluation and best responses weight step n by
// gamma^n or by 1. One switch applied consistently everywhere.
enum class DiscountMode { discounted, undiscounted };

template <class Scalar>
bool is_distribution(const VectorX<Scalar>& v, double tol = kDistributionTol) {
  if (v.size() == 0) return false;
  if ((v.array() < Scalar(0)).any()) return false;
  return std::abs(static_cast<double>(v.sum()) - 1.0) <= tol;
}

// Population state distribution over an episode: row n is mu_n, n = 0..N_T.
template <class Scalar>
struct MeanFieldFlow {
  MatrixX<Scalar> dist;  // (N_T + 1) x |S|

  Index steps() const { return dist.rows() - 1; }  // N_T
  Index num_states() const { return dist.cols(); }

  VectorX<Scalar> at(Index n) const { return dist.row(n).transpose(); }
};

// Time-dependent policy table: probs[n](s, a) = pi_n(a | s) for n = 0..N_T-1.
template <class Scalar>
struct TabularPolicy {
  std::vector<MatrixX<Scalar>> probs;

  Index steps() const { return static_cast<Index>(probs.size()); }
  Index num_states() const { return probs.empty() ? 0 : probs.front().rows(); }
  Index num_actions() const { return probs.empty() ? 0 : probs.front().cols(); }
};

// Finite-state, finite-action, finite-horizon MFG with mean-field-dependent
// transitions and rewards. Transition and reward are arbitrary callables so
// the same solver core serves grid environments and synthetic test models.
template <class Scalar>
struct MfgModel {
  Index num_states = 0;
  Index num_actions = 0;
  Index horizon = 0;  // N_T
  Scalar discount = Scalar(1);
  DiscountMode discount_mode = DiscountMode::discounted;

  // P(. | s, a, mu); must return a probability vector of length num_states.
  std::function<VectorX<Scalar>(Index, Index, const VectorX<Scalar>&)> transition;
  // R(s, a, mu)
  std::function<Scalar(Index, Index, const VectorX<Scalar>&)> reward;
  // Reward collected at the terminal tag n = N_T, where no action is taken.
  // When unset it defaults to max_a R(s, a, mu), the value a stopped agent
  // can still claim (for the grid environments this is the stay reward).
  std::function<Scalar(Index, const VectorX<Scalar>&)> terminal_reward;

  VectorX<Scalar> initial_dist;  // m_0

  Scalar step_weight(Index n) const {
    return discount_mode == DiscountMode::discounted
               ? static_cast<Scalar>(std::pow(static_cast<double>(discount),
                                              static_cast<double>(n)))
               : Scalar(1);
  }

  Scalar effective_discount() const {
    return discount_mode == DiscountMode::discounted ? discount : Scalar(1);
  }

  Scalar terminal_reward_at(Index s, const VectorX<Scalar>& mu) const {
    if (terminal_reward) return terminal_reward(s, mu);
    Scalar best = reward(s, 0, mu);
    for (Index a = 1; a < num_actions; ++a) {
      best = std::max(best, reward(s, a, mu));
    }
    return best;
  }
};

template <class Scalar>
struct ExploitabilityReport {
  Scalar value{};          // phi = br_return - policy_return
  Scalar br_return{};      // J(pi', mu)
  Scalar policy_return{};  // J(pi, mu)
  TabularPolicy<Scalar> br_policy;
};

template <class Scalar>
void validate_model(const MfgModel<Scalar>& model) {
  if (model.num_states < 1 || model.num_actions < 1 || model.horizon < 1) {
    throw ConfigError("model requires at least one state, one action and horizon >= 1");
  }
  if (!(model.discount > Scalar(0)) || model.discount > Scalar(1)) {
    throw ConfigError("discount must lie in (0, 1]");
  }
  if (!model.transition || !model.reward) {
    throw ConfigError("model transition and reward must be set");
  }
  if (model.initial_dist.size() != model.num_states) {
    throw ConfigError("initial_dist length does not match num_states");
  }
  if (!is_distribution(model.initial_dist)) {
    throw ModelError("initial_dist is not a probability distribution");
  }
}

template <class Scalar>
void validate_policy_shape(const MfgModel<Scalar>& model,
                           const TabularPolicy<Scalar>& policy) {
  if (policy.steps() != model.horizon) {
    throw ConfigError("policy has " + std::to_string(policy.steps()) +
                      " steps, model horizon is " + std::to_string(model.horizon));
  }
  for (const auto& table : policy.probs) {
    if (table.rows() != model.num_states || table.cols() != model.num_actions) {
      throw ConfigError("policy table shape does not match (|S|, |A|)");
    }
  }
}

template <class Scalar>
void validate_flow_shape(const MfgModel<Scalar>& model,
                         const MeanFieldFlow<Scalar>& flow) {
  if (flow.dist.rows() != model.horizon + 1 || flow.dist.cols() != model.num_states) {
    throw ConfigError("flow shape does not match (N_T + 1, |S|)");
  }
}

template <class Scalar>
TabularPolicy<Scalar> uniform_policy(const MfgModel<Scalar>& model) {
  TabularPolicy<Scalar> policy;
  policy.probs.assign(
      static_cast<std::size_t>(model.horizon),
      MatrixX<Scalar>::Constant(model.num_states, model.num_actions,
                                Scalar(1) / static_cast<Scalar>(model.num_actions)));
  return policy;
}

// Mean over (n, s) of the total-variation distance between action rows.
template <class Scalar>
Scalar policy_total_variation(const TabularPolicy<Scalar>& a,
                              const TabularPolicy<Scalar>& b) {
  if (a.steps() != b.steps() || a.num_states() != b.num_states() ||
      a.num_actions() != b.num_actions()) {
    throw ConfigError("policies have mismatched shapes");
  }
  Scalar total = Scalar(0);
  for (Index n = 0; n < a.steps(); ++n) {
    total += Scalar(0.5) * (a.probs[n] - b.probs[n]).cwiseAbs().sum();
  }
  return total / static_cast<Scalar>(a.steps() * a.num_states());
}

}  // namespace mfg
