#pragma once

#include "ope/data.hpp"
#include "ope/mdp.hpp"

namespace ope {

/// Empirical doubly-robust estimate
///   (1-gamma) E_{d0}[q(s,pi_e)] + E_n[w(s,a){r + gamma q(s',pi_e) - q(s,a)}],
/// with the d0 term computed exactly from d0 and pi_e. With w = 0 this is the
/// pure Q-side value; with q = 0 it is the weighted-reward value.
double dr_estimate(const Dataset& ds, const WeightTable& w, const QTable& q,
                   const Eigen::VectorXd& d0, const Policy& pi_e, double gamma);

/// Exact-expectation doubly-robust value under the true MDP: the data term is
/// summed over data_dist(s,a) P(s'|s,a) with r replaced by its mean. Equals
/// the true return of pi_e whenever either w or q is exact.
double population_dr(const TabularMDP& mdp, const OccupancyTable& data_dist,
                     const WeightTable& w, const QTable& q, const Policy& pi_e);

/// Truncated step-wise importance sampling over episodic data:
///   (1-gamma) * mean_ep sum_t gamma^t rho_{0:t} r_t,
/// rho_{0:t} the cumulative pi_e/pi_b action-probability ratio. Truncation at
/// the episode horizon h leaves a bias of at most gamma^h r_max / (1-gamma).
double stepwise_is(const EpisodeSet& eps, const Policy& pi_e, const Policy& pi_b,
                   double gamma);

/// Mean reward of the dataset; estimates the behavior policy's value when the
/// data distribution is stationary.
double naive_behavior_value(const Dataset& ds);

}  // namespace ope
