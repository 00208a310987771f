#pragma once

#include "ope/mdp.hpp"

namespace ope {

/// Transition matrix between state-action pairs:
/// P_pi[(s,a),(s',a')] = P(s'|s,a) * pi(a'|s').
Eigen::MatrixXd pair_transition_matrix(const TabularMDP& mdp, const Policy& pi);

/// Exact Q^pi via the linear solve (I - gamma * P_pi) Q = r_mean.
QTable solve_q(const TabularMDP& mdp, const Policy& pi);

/// V[s] = sum_a pi(a|s) Q[s,a].
VTable state_value(const QTable& q, const Policy& pi);

/// Normalized discounted occupancy d_{pi,gamma} over state-action pairs,
/// computed as the row-vector solve (1-gamma) (d0 x pi) (I - gamma P_pi)^-1.
OccupancyTable discounted_occupancy(const TabularMDP& mdp, const Policy& pi);

/// Normalized return of pi. Computes both the occupancy-weighted reward sum
/// and (1-gamma) d0' V and cross-checks them to 1e-10.
double true_return(const TabularMDP& mdp, const Policy& pi);

/// Stationary distribution of the chain induced by pi over state-action
/// pairs, by power iteration. Throws ErgodicityError on non-convergence.
OccupancyTable stationary_distribution(const TabularMDP& mdp, const Policy& pi);

/// w(s,a) = d_{pi_e,gamma}(s,a) / data_dist(s,a); 0 where both vanish.
/// Throws CoverageError where the numerator is positive on a zero cell.
WeightTable true_weight(const TabularMDP& mdp, const Policy& pi_e,
                        const OccupancyTable& data_dist);

}  // namespace ope
