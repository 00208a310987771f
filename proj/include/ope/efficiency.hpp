#pragma once

#include "ope/mdp.hpp"

namespace ope {

struct VarianceReport {
    double semiparametric_lb = 0.0;
    double mswl_var = 0.0;
    double mvl_var = 0.0;
};

/// Semiparametric lower bound for OPE under data_dist:
///   sum_{s,a,s'} data_dist(s,a) P(s'|s,a) w(s,a)^2 [(Rbar + gamma V' - Q)^2 + sigma^2],
/// with w, Q, V the exact weight and value functions of pi_e. The reward
/// noise enters through its conditional variance sigma^2(s,a).
double semiparametric_variance(const TabularMDP& mdp, const Policy& pi_e,
                               const OccupancyTable& data_dist);

/// Asymptotic variance of state-weight minimax learning (off-policy LSTD over
/// state features):
///   sum_s d_b(s) (d_e(s)/d_b(s))^2 var[rho {r + gamma V(s') - V(s)} | s],
/// rho = pi_e/pi_b, conditioned on s with (a, r, s') drawn from the data law.
double mswl_asymptotic_variance(const TabularMDP& mdp, const Policy& pi_e,
                                const Policy& pi_b,
                                const OccupancyTable& data_dist);

/// Asymptotic variance of the state-value minimax variant:
///   sum_s d_b(s) (d_e(s)/d_b(s))^2 var[rho {r + gamma V(s')} | s].
double mvl_asymptotic_variance(const TabularMDP& mdp, const Policy& pi_e,
                               const Policy& pi_b,
                               const OccupancyTable& data_dist);

/// All three formulas on one input set.
VarianceReport variance_report(const TabularMDP& mdp, const Policy& pi_e,
                               const Policy& pi_b,
                               const OccupancyTable& data_dist);

}  // namespace ope
