#include "ope/model_based.hpp"

#include "ope/errors.hpp"
#include "ope/solve.hpp"

namespace ope {

EmpiricalMDP fit_empirical_mdp(const Dataset& ds, int n_states, int n_actions,
                               double gamma, const Eigen::VectorXd& d0,
                               double r_max) {
    if (ds.size() == 0) throw EmptyDataset("fit_empirical_mdp requires data");

    EmpiricalMDP out;
    out.mdp.n_states = n_states;
    out.mdp.n_actions = n_actions;
    out.mdp.gamma = gamma;
    out.mdp.d0 = d0;
    out.mdp.r_max = r_max;
    out.mdp.transition = Eigen::MatrixXd::Zero(n_states * n_actions, n_states);
    out.mdp.reward_mean = Eigen::MatrixXd::Zero(n_states, n_actions);
    out.mdp.reward_noise_std = Eigen::MatrixXd::Zero(n_states, n_actions);
    out.visit_counts = Eigen::MatrixXd::Zero(n_states, n_actions);

    for (const Transition& t : ds.transitions) {
        out.visit_counts(t.s, t.a) += 1.0;
        out.mdp.transition(t.s * n_actions + t.a, t.s_next) += 1.0;
        out.mdp.reward_mean(t.s, t.a) += t.r;
    }
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            const int row = s * n_actions + a;
            const double count = out.visit_counts(s, a);
            if (count > 0.0) {
                out.mdp.transition.row(row) /= count;
                out.mdp.reward_mean(s, a) /= count;
            } else {
                out.mdp.transition(row, s) = 1.0;  // self-loop, reward 0
                out.unvisited_pairs.push_back(row);
            }
        }
    return out;
}

double model_based_estimate(const EmpiricalMDP& emdp, const Policy& pi_e) {
    return true_return(emdp.mdp, pi_e);
}

}  // namespace ope
