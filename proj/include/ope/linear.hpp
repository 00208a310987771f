#pragma once

#include <vector>

#include "ope/data.hpp"
#include "ope/features.hpp"
#include "ope/mdp.hpp"

namespace ope {

struct LinearFitReport {
    Eigen::VectorXd alpha;
    double estimate = 0.0;
    double matrix_cond = 0.0;
    double ridge_used = 0.0;
    bool ridge_fallback = false;              // set when the automatic 1e-8 ridge kicked in
    std::vector<int> unvisited_pairs;         // flat s*n_actions+a ids (tabular diagnostics)
};

enum class MswlVariant { v2, v4 };

/// MWL with the same linear class for weights and discriminators:
/// solves (A + ridge I) alpha = b with
///   A = E_n[-gamma phi(s',pi_e) phi(s,a)^T + phi(s,a) phi(s,a)^T],
///   b = (1-gamma) E_{d0}[phi(s,pi_e)],
/// estimate = E_n[r phi(s,a)^T] alpha.
LinearFitReport mwl_linear(const Dataset& ds, const FeatureMap& fm,
                           const Eigen::VectorXd& d0, const Policy& pi_e,
                           double gamma, double ridge = 0.0);

/// MQL over the same linear class; transposed system with
/// b = E_n[r phi(s,a)], estimate = (1-gamma) E_{d0}[phi(s,pi_e)]^T alpha.
LinearFitReport mql_linear(const Dataset& ds, const FeatureMap& fm,
                           const Eigen::VectorXd& d0, const Policy& pi_e,
                           double gamma, double ridge = 0.0);

/// Off-policy LSTD over state features; estimate D1^T (Dv + ridge I)^-1 D3.
/// Variant v2 weights the whole temporal difference by pi_e/pi_b; variant v4
/// weights only the next-state feature.
LinearFitReport mswl_linear(const Dataset& ds, const StateFeatureMap& sfm,
                            const Eigen::VectorXd& d0, const Policy& pi_e,
                            const Policy& pi_b, MswlVariant variant,
                            double gamma, double ridge = 0.0);

/// Empirical-frequency behavior policy; unobserved states get uniform rows.
Policy estimate_behavior_policy(const Dataset& ds, int n_states, int n_actions);

/// Empirical MWL loss L_{w,n}(w, f) for w = phi^T alpha against the basis
/// discriminator f = phi_k (used by the zero-loss certificate tests).
Eigen::VectorXd mwl_empirical_loss_per_basis(const Dataset& ds, const FeatureMap& fm,
                                             const Eigen::VectorXd& d0,
                                             const Policy& pi_e, double gamma,
                                             const Eigen::VectorXd& alpha);

}  // namespace ope
