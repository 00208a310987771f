#pragma once

#include <string>

#include <Eigen/Dense>

namespace ope {

/**
 * Finite discounted MDP. Transition probabilities are stored row-major over
 * state-action pairs: row s * n_actions + a of `transition` is P(.|s,a).
 * Rewards are Gaussian around reward_mean with per-pair std reward_noise_std,
 * clipped to [0, r_max] at sampling time.
 */
struct TabularMDP {
    int n_states = 0;
    int n_actions = 0;
    Eigen::MatrixXd transition;         // (S*A) x S
    Eigen::MatrixXd reward_mean;        // S x A, entries in [0, r_max]
    Eigen::MatrixXd reward_noise_std;   // S x A, entries >= 0
    double gamma = 0.0;                 // in [0, 1)
    Eigen::VectorXd d0;                 // initial state distribution
    double r_max = 1.0;

    int n_pairs() const { return n_states * n_actions; }
    int pair_index(int s, int a) const { return s * n_actions + a; }

    /// Throws InvalidMdp if any stochasticity or range invariant fails.
    void validate() const;
};

/// Stochastic policy; row s is a distribution over actions.
struct Policy {
    Eigen::MatrixXd probs;  // S x A

    int n_states() const { return static_cast<int>(probs.rows()); }
    int n_actions() const { return static_cast<int>(probs.cols()); }
    void validate() const;

    static Policy uniform(int n_states, int n_actions);
    /// pi(a=1|s) = p1 for two-action problems.
    static Policy bernoulli(int n_states, double p1);
};

/// Normalized occupancy (or any distribution) over state-action pairs.
struct OccupancyTable {
    Eigen::MatrixXd values;  // S x A

    double total_mass() const { return values.sum(); }
    /// Marginal distribution over states.
    Eigen::VectorXd state_marginal() const { return values.rowwise().sum(); }
};

struct QTable {
    Eigen::MatrixXd values;  // S x A
};

struct VTable {
    Eigen::VectorXd values;  // S
};

/// Marginalized importance weights d_e(s,a) / d_data(s,a); entries >= 0.
struct WeightTable {
    Eigen::MatrixXd values;  // S x A

    double max_weight() const { return values.maxCoeff(); }
};

/// JSON fixture IO (schema: n_states, n_actions, transition, reward_mean,
/// reward_noise_std, gamma, d0, r_max).
TabularMDP load_mdp_json(const std::string& path);
void save_mdp_json(const TabularMDP& mdp, const std::string& path);

}  // namespace ope
