#pragma once

#include "ope/data.hpp"
#include "ope/mdp.hpp"

namespace ope {

/// Feature map over state-action pairs; row pair_index(s,a) is phi(s,a).
struct FeatureMap {
    int dim = 0;
    int n_states = 0;
    int n_actions = 0;
    Eigen::MatrixXd table;  // (S*A) x dim

    Eigen::VectorXd at(int s, int a) const {
        return table.row(s * n_actions + a).transpose();
    }
};

/// Feature map over states only (MSWL / MVL discriminators).
struct StateFeatureMap {
    int dim = 0;
    Eigen::MatrixXd table;  // S x dim

    Eigen::VectorXd at(int s) const { return table.row(s).transpose(); }
};

struct KernelSpec {
    enum class Kind { rbf, linear };
    Kind kind = Kind::rbf;
    double bandwidth = 1.0;  // sigma > 0; unused for the linear kernel

    static KernelSpec rbf(double sigma) { return {Kind::rbf, sigma}; }
    static KernelSpec linear() { return {Kind::linear, 1.0}; }
};

/// One-hot indicator basis; phi(s,a) has a single 1 at index s*n_actions + a.
FeatureMap tabular_features(int n_states, int n_actions);

/// One-hot indicator basis over states.
StateFeatureMap tabular_state_features(int n_states);

/// phi(s, pi) = sum_a pi(a|s) phi(s,a).
Eigen::VectorXd feature_expectation_pi(const FeatureMap& fm, const Policy& pi, int s);

/// (1-gamma)-free initial feature vector: sum_s d0(s) phi(s, pi).
Eigen::VectorXd feature_expectation_d0(const FeatureMap& fm, const Policy& pi,
                                       const Eigen::VectorXd& d0);

double rbf_eval(const KernelSpec& kspec, const Eigen::VectorXd& x,
                const Eigen::VectorXd& y);

/// Kernel evaluation dispatching on kind (rbf_eval for the rbf kind).
double kernel_eval(const KernelSpec& kspec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

/// Gram matrix of the kernel over every state-action pair, encoded one-hot.
Eigen::MatrixXd kernel_gram_all_pairs(const KernelSpec& kspec, int n_states,
                                      int n_actions);

/// Median pairwise Euclidean distance among encoded dataset points,
/// subsampled to at most `max_points`.
double median_bandwidth(const Dataset& ds, const FeatureMap& encode,
                        std::size_t max_points = 2000);

}  // namespace ope
