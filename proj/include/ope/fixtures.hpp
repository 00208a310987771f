#pragma once

#include "ope/mdp.hpp"

namespace ope {

/// pi(a|s) proportional to exp(Q(s,a) / temperature).
Policy softmax_policy(const QTable& q, double temperature);

/// Row-wise mixture alpha * a + (1 - alpha) * b.
Policy mix_policies(const Policy& a, const Policy& b, double alpha);

/// One state, one action, deterministic reward 1, gamma 0.9. The normalized
/// return of its only policy is exactly 1.
TabularMDP fixture_m1();

/// Two states, two actions: action 0 stays in place w.p. 0.9, action 1 swaps
/// w.p. 0.9; mean reward 0.2 + 0.5 s + 0.3 a with noise std 0.1; gamma 0.9;
/// d0 concentrated on state 0.
TabularMDP fixture_chain2();
Policy chain2_behavior();  // uniform
Policy chain2_target();    // pi(a=1|s) = 0.8

/// 5x5 gridworld with four moves and slip noise 0.1; reward peaks when the
/// intended move enters the goal corner; the chain never absorbs, so the
/// stationary distribution exists for any soft policy.
TabularMDP fixture_minitaxi();
/// Softmax over Q of the uniform policy at the given temperature.
Policy minitaxi_softmax(const TabularMDP& mdp, double temperature);
/// pi_b = alpha * pi_e + (1 - alpha) * pi_plus, with pi_e a sharp softmax
/// (temperature 0.3) and pi_plus a flat one (temperature 5).
Policy minitaxi_target(const TabularMDP& mdp);
Policy minitaxi_behavior(const TabularMDP& mdp, double alpha);

/// Fixture lookup by name ("m1", "chain2", "minitaxi"); throws ConfigError on
/// unknown names.
TabularMDP fixture_by_name(const std::string& name);

}  // namespace ope
