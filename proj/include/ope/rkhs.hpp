#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ope/data.hpp"
#include "ope/features.hpp"
#include "ope/linear.hpp"
#include "ope/mdp.hpp"

namespace ope {

struct RkhsLossReport {
    double loss_value = 0.0;  // >= -1e-10 up to rounding
    // Additive terms of the closed form: self and (doubled) cross quadratic
    // forms between the parts of the witness expansion.
    std::vector<std::pair<std::string, double>> breakdown;
};

/**
 * Closed-form V-statistic value of max_f L_{w,n}(w, f)^2 over the unit RKHS
 * ball, for per-pair weight values w. The d0 x pi_e expectation is computed
 * exactly from d0 and pi_e. Kernel sums are aggregated over the finite
 * state-action support, which reproduces the all-pairs V-statistic exactly.
 */
RkhsLossReport mwl_rkhs_loss(const WeightTable& w, const Dataset& ds,
                             const Eigen::VectorXd& d0, const Policy& pi_e,
                             double gamma, const KernelSpec& k);

/// Closed-form V-statistic of max_g L_{q,n}(q, g)^2 with the Bellman
/// residual delta = r + gamma q(s',pi_e) - q(s,a).
RkhsLossReport mql_rkhs_loss(const QTable& q, const Dataset& ds,
                             const Policy& pi_e, double gamma,
                             const KernelSpec& k);

/// Minimize the closed-form loss over w = phi^T alpha (PSD quadratic in
/// alpha); estimate = E_n[r phi^T] alpha.
LinearFitReport mwl_rkhs_fit(const Dataset& ds, const FeatureMap& fm,
                             const Eigen::VectorXd& d0, const Policy& pi_e,
                             double gamma, const KernelSpec& k,
                             double ridge = 0.0);

/// Minimize the closed-form loss over q = phi^T alpha; estimate =
/// (1-gamma) E_{d0}[phi(s,pi_e)^T] alpha.
LinearFitReport mql_rkhs_fit(const Dataset& ds, const FeatureMap& fm,
                             const Eigen::VectorXd& d0, const Policy& pi_e,
                             double gamma, const KernelSpec& k,
                             double ridge = 0.0);

struct RkhsMaxReport {
    double closed_form = 0.0;
    double max_probe = 0.0;    // largest squared loss over random unit-ball probes
    double witness_value = 0.0;  // squared loss at the normalized witness
    bool violated = false;     // any probe exceeded closed_form + 1e-8
};

/// Certifies the closed form: `trials` random unit-norm RKHS functions never
/// beat it, and the normalized witness attains it. The probe losses are
/// evaluated by the direct empirical sum, not through the closed form.
RkhsMaxReport verify_rkhs_max(const WeightTable& w, const Dataset& ds,
                              const Eigen::VectorXd& d0, const Policy& pi_e,
                              double gamma, const KernelSpec& k,
                              int trials, std::uint64_t seed);

}  // namespace ope
