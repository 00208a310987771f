#pragma once

#include <vector>

#include "ope/data.hpp"
#include "ope/mdp.hpp"

namespace ope {

/// Maximum-likelihood tabular model of a dataset. Unvisited pairs receive a
/// self-loop with reward 0 and are listed in unvisited_pairs.
struct EmpiricalMDP {
    TabularMDP mdp;
    Eigen::MatrixXd visit_counts;     // S x A
    std::vector<int> unvisited_pairs;  // flat s * n_actions + a ids
};

EmpiricalMDP fit_empirical_mdp(const Dataset& ds, int n_states, int n_actions,
                               double gamma, const Eigen::VectorXd& d0,
                               double r_max);

/// Certainty-equivalence value: exact return of pi_e in the fitted model.
double model_based_estimate(const EmpiricalMDP& emdp, const Policy& pi_e);

}  // namespace ope
