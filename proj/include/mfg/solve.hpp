#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <string>
#include <utility>
#include <vector>

#include "mfg/random.hpp"
#include "mfg/types.hpp"

namespace mfg {

namespace detail {

template <class Scalar>
VectorX<Scalar> checked_transition(const MfgModel<Scalar>& model, Index n, Index s,
                                   Index a, const VectorX<Scalar>& mu) {
  VectorX<Scalar> row = model.transition(s, a, mu);
  if (row.size() != model.num_states) {
    throw ConfigError("transition output length does not match num_states");
  }
  if ((row.array() < Scalar(0)).any() ||
      std::abs(static_cast<double>(row.sum()) - 1.0) > kDistributionTol) {
    throw ModelError("transition row is not a probability distribution at (n=" +
                     std::to_string(n) + ", s=" + std::to_string(s) +
                     ", a=" + std::to_string(a) + ")");
  }
  return row;
}

}  // namespace detail

// Exact mean-field flow induced by a policy:
//   mu_0 = m_0,  mu_{n+1}(s') = sum_{s,a} mu_n(s) pi_n(a|s) P(s'|s,a,mu_n).
// Rows are renormalized when drift stays within kDistributionTol; larger
// deviations indicate a broken model and raise ModelError.
template <class Scalar>
MeanFieldFlow<Scalar> propagate_flow(const MfgModel<Scalar>& model,
                                     const TabularPolicy<Scalar>& policy) {
  validate_model(model);
  validate_policy_shape(model, policy);

  MeanFieldFlow<Scalar> flow;
  flow.dist.resize(model.horizon + 1, model.num_states);
  flow.dist.row(0) = model.initial_dist.transpose();

  for (Index n = 0; n < model.horizon; ++n) {
    const VectorX<Scalar> mu = flow.at(n);
    VectorX<Scalar> next = VectorX<Scalar>::Zero(model.num_states);
    for (Index s = 0; s < model.num_states; ++s) {
      if (mu[s] <= Scalar(0)) continue;
      for (Index a = 0; a < model.num_actions; ++a) {
        const Scalar weight = mu[s] * policy.probs[n](s, a);
        if (weight <= Scalar(0)) continue;
        next += weight * detail::checked_transition(model, n, s, a, mu);
      }
    }
    const double drift = std::abs(static_cast<double>(next.sum()) - 1.0);
    if (drift > kDistributionTol) {
      throw ModelError("flow row " + std::to_string(n + 1) +
                       " lost normalization (drift " + std::to_string(drift) + ")");
    }
    next /= next.sum();
    flow.dist.row(n + 1) = next.transpose();
  }
  return flow;
}

// Analytic policy value under a frozen flow:
//   J(pi, mu) = sum_{n<N_T} w(n) sum_{s,a} mu_n(s) pi_n(a|s) R(s,a,mu_n)
//             + w(N_T)     sum_s   mu_NT(s) R_term(s, mu_NT)
// with w(n) = gamma^n in discounted mode and 1 otherwise.
template <class Scalar>
Scalar evaluate_policy(const MfgModel<Scalar>& model, const TabularPolicy<Scalar>& policy,
                       const MeanFieldFlow<Scalar>& flow) {
  validate_model(model);
  validate_policy_shape(model, policy);
  validate_flow_shape(model, flow);

  Scalar value = Scalar(0);
  for (Index n = 0; n < model.horizon; ++n) {
    const VectorX<Scalar> mu = flow.at(n);
    Scalar step_value = Scalar(0);
    for (Index s = 0; s < model.num_states; ++s) {
      if (mu[s] <= Scalar(0)) continue;
      for (Index a = 0; a < model.num_actions; ++a) {
        const Scalar weight = policy.probs[n](s, a);
        if (weight <= Scalar(0)) continue;
        step_value += mu[s] * weight * model.reward(s, a, mu);
      }
    }
    value += model.step_weight(n) * step_value;
  }

  const VectorX<Scalar> mu_last = flow.at(model.horizon);
  Scalar terminal_value = Scalar(0);
  for (Index s = 0; s < model.num_states; ++s) {
    if (mu_last[s] <= Scalar(0)) continue;
    terminal_value += mu_last[s] * model.terminal_reward_at(s, mu_last);
  }
  value += model.step_weight(model.horizon) * terminal_value;
  return value;
}

template <class Scalar>
struct BestResponse {
  TabularPolicy<Scalar> policy;
  Scalar value{};  // J(pi', mu) from the initial distribution
};

// Optimal deterministic time-dependent policy for the MDP induced by the
// frozen flow, via backward induction. Ties in the argmax go to the lowest
// action index. The terminal value is the action-free terminal reward, so
// evaluate_policy(model, br.policy, flow) reproduces br.value.
template <class Scalar>
BestResponse<Scalar> best_response(const MfgModel<Scalar>& model,
                                   const MeanFieldFlow<Scalar>& flow) {
  validate_model(model);
  validate_flow_shape(model, flow);

  const Scalar gamma = model.effective_discount();
  BestResponse<Scalar> br;
  br.policy.probs.assign(static_cast<std::size_t>(model.horizon),
                         MatrixX<Scalar>::Zero(model.num_states, model.num_actions));

  const VectorX<Scalar> mu_last = flow.at(model.horizon);
  VectorX<Scalar> value_next(model.num_states);
  for (Index s = 0; s < model.num_states; ++s) {
    value_next[s] = model.terminal_reward_at(s, mu_last);
  }

  for (Index n = model.horizon - 1; n >= 0; --n) {
    const VectorX<Scalar> mu = flow.at(n);
    VectorX<Scalar> value_here(model.num_states);
    for (Index s = 0; s < model.num_states; ++s) {
      Index best_action = 0;
      Scalar best_q = Scalar(0);
      for (Index a = 0; a < model.num_actions; ++a) {
        const VectorX<Scalar> row = detail::checked_transition(model, n, s, a, mu);
        const Scalar q = model.reward(s, a, mu) + gamma * row.dot(value_next);
        if (a == 0 || q > best_q) {
          best_q = q;
          best_action = a;
        }
      }
      br.policy.probs[static_cast<std::size_t>(n)](s, best_action) = Scalar(1);
      value_here[s] = best_q;
    }
    value_next.swap(value_here);
  }

  br.value = model.initial_dist.dot(value_next);
  return br;
}

// Exploitability of a policy against the flow it induces itself.
template <class Scalar>
ExploitabilityReport<Scalar> exploitability(const MfgModel<Scalar>& model,
                                            const TabularPolicy<Scalar>& policy,
                                            const MeanFieldFlow<Scalar>& flow) {
  BestResponse<Scalar> br = best_response(model, flow);
  ExploitabilityReport<Scalar> report;
  report.br_return = br.value;
  report.policy_return = evaluate_policy(model, policy, flow);
  report.value = report.br_return - report.policy_return;
  report.br_policy = std::move(br.policy);
  return report;
}

template <class Scalar>
ExploitabilityReport<Scalar> exploitability(const MfgModel<Scalar>& model,
                                            const TabularPolicy<Scalar>& policy) {
  return exploitability(model, policy, propagate_flow(model, policy));
}

template <class Scalar>
struct Transition {
  Index n;
  Index s;
  Index a;
  Scalar r;
  Index s_next;
};

// One representative-agent episode against a frozen flow. The policy is any
// callable (n, s) -> action distribution; exactly N_T transitions come back
// and the sequence is a pure function of the rng state.
template <class Scalar, class PolicyFn>
  requires std::invocable<PolicyFn, Index, Index>
std::vector<Transition<Scalar>> sample_trajectory(const MfgModel<Scalar>& model,
                                                  PolicyFn&& policy_at,
                                                  const MeanFieldFlow<Scalar>& flow,
                                                  Rng& rng) {
  validate_model(model);
  validate_flow_shape(model, flow);

  std::vector<Transition<Scalar>> episode;
  episode.reserve(static_cast<std::size_t>(model.horizon));

  Index s = rng.categorical(model.initial_dist);
  for (Index n = 0; n < model.horizon; ++n) {
    const VectorX<Scalar> mu = flow.at(n);
    const VectorX<Scalar> action_dist = policy_at(n, s);
    const Index a = rng.categorical(action_dist);
    const Scalar r = model.reward(s, a, mu);
    const VectorX<Scalar> row = detail::checked_transition(model, n, s, a, mu);
    const Index s_next = rng.categorical(row);
    episode.push_back({n, s, a, r, s_next});
    s = s_next;
  }
  return episode;
}

template <class Scalar>
std::vector<Transition<Scalar>> sample_trajectory(const MfgModel<Scalar>& model,
                                                  const TabularPolicy<Scalar>& policy,
                                                  const MeanFieldFlow<Scalar>& flow,
                                                  Rng& rng) {
  validate_policy_shape(model, policy);
  return sample_trajectory(
      model,
      [&policy](Index n, Index s) -> VectorX<Scalar> {
        return policy.probs[static_cast<std::size_t>(n)].row(s).transpose();
      },
      flow, rng);
}

// Discounted episode return including the terminal tail.
template <class Scalar>
Scalar trajectory_return(const MfgModel<Scalar>& model,
                         const std::vector<Transition<Scalar>>& episode,
                         const MeanFieldFlow<Scalar>& flow) {
  Scalar value = Scalar(0);
  for (const Transition<Scalar>& t : episode) {
    value += model.step_weight(t.n) * t.r;
  }
  const VectorX<Scalar> mu_last = flow.at(model.horizon);
  value += model.step_weight(model.horizon) *
           model.terminal_reward_at(episode.back().s_next, mu_last);
  return value;
}

}  // namespace mfg
