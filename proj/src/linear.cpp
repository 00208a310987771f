#include "ope/linear.hpp"

#include <set>

#include <Eigen/Dense>

#include "ope/errors.hpp"

namespace ope {

namespace {

constexpr double kCondLimit = 1e12;
constexpr double kFallbackRidge = 1e-8;

struct SolveResult {
    Eigen::VectorXd x;
    double cond = 0.0;
    double ridge_used = 0.0;
    bool fallback = false;
};

SolveResult solve_with_ridge(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             double ridge) {
    SolveResult res;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    res.cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();

    double effective = ridge;
    if (ridge == 0.0 && res.cond > kCondLimit) {
        // The full-rank assumption failed on this sample; fall back to a tiny
        // ridge and flag it in the report.
        effective = kFallbackRidge;
        res.fallback = true;
    }
    res.ridge_used = effective;

    const Eigen::MatrixXd sys =
        a + effective * Eigen::MatrixXd::Identity(a.rows(), a.cols());
    res.x = Eigen::PartialPivLU<Eigen::MatrixXd>(sys).solve(b);
    if (!res.x.allFinite())
        throw SingularMatrix("linear system unsolvable even with ridge");
    return res;
}

// Sufficient statistics of a dataset for the linear estimators: transition
// counts over (s,a,s') and reward sums over (s,a). Exact because every
// moment below is linear in these.
struct Aggregates {
    int n_states = 0;
    int n_actions = 0;
    Eigen::MatrixXd triple_counts;  // (S*A) x S
    Eigen::MatrixXd reward_sum;     // S x A
    double n = 0.0;
};

Aggregates aggregate(const Dataset& ds, int n_states, int n_actions) {
    Aggregates agg;
    agg.n_states = n_states;
    agg.n_actions = n_actions;
    agg.triple_counts = Eigen::MatrixXd::Zero(n_states * n_actions, n_states);
    agg.reward_sum = Eigen::MatrixXd::Zero(n_states, n_actions);
    for (const Transition& t : ds.transitions) {
        agg.triple_counts(t.s * n_actions + t.a, t.s_next) += 1.0;
        agg.reward_sum(t.s, t.a) += t.r;
    }
    agg.n = static_cast<double>(ds.size());
    return agg;
}

// phi(s, pi_e) for every state, as rows.
Eigen::MatrixXd all_phi_pi(const FeatureMap& fm, const Policy& pi) {
    Eigen::MatrixXd out(fm.n_states, fm.dim);
    for (int s = 0; s < fm.n_states; ++s)
        out.row(s) = feature_expectation_pi(fm, pi, s).transpose();
    return out;
}

std::vector<int> unvisited_tabular_pairs(const Aggregates& agg, const FeatureMap& fm) {
    if (fm.dim != fm.n_states * fm.n_actions) return {};
    std::vector<int> missing;
    for (int i = 0; i < fm.dim; ++i)
        if (agg.triple_counts.row(i).sum() == 0.0) missing.push_back(i);
    return missing;
}

}  // namespace

LinearFitReport mwl_linear(const Dataset& ds, const FeatureMap& fm,
                           const Eigen::VectorXd& d0, const Policy& pi_e,
                           double gamma, double ridge) {
    if (ds.size() == 0) throw EmptyDataset("mwl_linear requires data");
    const Aggregates agg = aggregate(ds, fm.n_states, fm.n_actions);
    const Eigen::MatrixXd phi_pi = all_phi_pi(fm, pi_e);
    const int d = fm.dim;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd r_phi = Eigen::VectorXd::Zero(d);
    for (int s = 0; s < fm.n_states; ++s)
        for (int act = 0; act < fm.n_actions; ++act) {
            const int row = s * fm.n_actions + act;
            const double count = agg.triple_counts.row(row).sum();
            if (count == 0.0) continue;
            const Eigen::VectorXd phi = fm.at(s, act);
            Eigen::VectorXd phi_next_avg =
                phi_pi.transpose() * agg.triple_counts.row(row).transpose();
            a.noalias() += (count * phi - gamma * phi_next_avg) * phi.transpose();
            r_phi += agg.reward_sum(s, act) * phi;
        }
    a /= agg.n;
    r_phi /= agg.n;
    const Eigen::VectorXd b = (1.0 - gamma) * feature_expectation_d0(fm, pi_e, d0);

    const SolveResult sol = solve_with_ridge(a, b, ridge);
    LinearFitReport rep;
    rep.alpha = sol.x;
    rep.estimate = r_phi.dot(sol.x);
    rep.matrix_cond = sol.cond;
    rep.ridge_used = sol.ridge_used;
    rep.ridge_fallback = sol.fallback;
    rep.unvisited_pairs = unvisited_tabular_pairs(agg, fm);
    return rep;
}

LinearFitReport mql_linear(const Dataset& ds, const FeatureMap& fm,
                           const Eigen::VectorXd& d0, const Policy& pi_e,
                           double gamma, double ridge) {
    if (ds.size() == 0) throw EmptyDataset("mql_linear requires data");
    const Aggregates agg = aggregate(ds, fm.n_states, fm.n_actions);
    const Eigen::MatrixXd phi_pi = all_phi_pi(fm, pi_e);
    const int d = fm.dim;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    for (int s = 0; s < fm.n_states; ++s)
        for (int act = 0; act < fm.n_actions; ++act) {
            const int row = s * fm.n_actions + act;
            const double count = agg.triple_counts.row(row).sum();
            if (count == 0.0) continue;
            const Eigen::VectorXd phi = fm.at(s, act);
            Eigen::VectorXd phi_next_avg =
                phi_pi.transpose() * agg.triple_counts.row(row).transpose();
            a.noalias() += phi * (count * phi - gamma * phi_next_avg).transpose();
            b += agg.reward_sum(s, act) * phi;
        }
    a /= agg.n;
    b /= agg.n;

    const SolveResult sol = solve_with_ridge(a, b, ridge);
    LinearFitReport rep;
    rep.alpha = sol.x;
    rep.estimate =
        (1.0 - gamma) * feature_expectation_d0(fm, pi_e, d0).dot(sol.x);
    rep.matrix_cond = sol.cond;
    rep.ridge_used = sol.ridge_used;
    rep.ridge_fallback = sol.fallback;
    rep.unvisited_pairs = unvisited_tabular_pairs(agg, fm);
    return rep;
}

LinearFitReport mswl_linear(const Dataset& ds, const StateFeatureMap& sfm,
                            const Eigen::VectorXd& d0, const Policy& pi_e,
                            const Policy& pi_b, MswlVariant variant,
                            double gamma, double ridge) {
    if (ds.size() == 0) throw EmptyDataset("mswl_linear requires data");
    const int n_states = static_cast<int>(pi_b.probs.rows());
    const int n_actions = static_cast<int>(pi_b.probs.cols());
    const Aggregates agg = aggregate(ds, n_states, n_actions);
    const int d = sfm.dim;

    Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd d3 = Eigen::VectorXd::Zero(d);
    for (int s = 0; s < n_states; ++s)
        for (int act = 0; act < n_actions; ++act) {
            const int row = s * n_actions + act;
            const double count = agg.triple_counts.row(row).sum();
            if (count == 0.0) continue;
            const double pb = pi_b.probs(s, act);
            if (pb <= 0.0)
                throw BehaviorSupportError(
                    "behavior policy has zero mass on observed action");
            const double rho = pi_e.probs(s, act) / pb;
            const Eigen::VectorXd phi_s = sfm.at(s);
            Eigen::VectorXd phi_next_sum =
                sfm.table.transpose() * agg.triple_counts.row(row).transpose();
            if (variant == MswlVariant::v2)
                dv.noalias() +=
                    rho * phi_s * (count * phi_s - gamma * phi_next_sum).transpose();
            else
                dv.noalias() +=
                    phi_s * (count * phi_s - gamma * rho * phi_next_sum).transpose();
            d3 += agg.reward_sum(s, act) * rho * phi_s;
        }
    dv /= agg.n;
    d3 /= agg.n;

    Eigen::VectorXd d1 = Eigen::VectorXd::Zero(d);
    for (int s = 0; s < static_cast<int>(d0.size()); ++s)
        if (d0[s] > 0.0) d1 += d0[s] * sfm.at(s);
    d1 *= (1.0 - gamma);

    const SolveResult sol = solve_with_ridge(dv, d3, ridge);
    LinearFitReport rep;
    rep.alpha = sol.x;
    rep.estimate = d1.dot(sol.x);
    rep.matrix_cond = sol.cond;
    rep.ridge_used = sol.ridge_used;
    rep.ridge_fallback = sol.fallback;
    return rep;
}

Policy estimate_behavior_policy(const Dataset& ds, int n_states, int n_actions) {
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n_states, n_actions);
    for (const Transition& t : ds.transitions) counts(t.s, t.a) += 1.0;

    Policy pi;
    pi.probs.resize(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
        const double total = counts.row(s).sum();
        if (total > 0.0)
            pi.probs.row(s) = counts.row(s) / total;
        else
            pi.probs.row(s).setConstant(1.0 / n_actions);
    }
    return pi;
}

Eigen::VectorXd mwl_empirical_loss_per_basis(const Dataset& ds, const FeatureMap& fm,
                                             const Eigen::VectorXd& d0,
                                             const Policy& pi_e, double gamma,
                                             const Eigen::VectorXd& alpha) {
    const int d = fm.dim;
    const double inv_n = 1.0 / static_cast<double>(ds.size());
    // L_{w,n}(w, phi_k) for every basis discriminator phi_k at once.
    Eigen::VectorXd loss = Eigen::VectorXd::Zero(d);
    for (const Transition& t : ds.transitions) {
        const double w = fm.at(t.s, t.a).dot(alpha);
        loss += gamma * w * feature_expectation_pi(fm, pi_e, t.s_next);
        loss -= w * fm.at(t.s, t.a);
    }
    loss *= inv_n;
    loss += (1.0 - gamma) * feature_expectation_d0(fm, pi_e, d0);
    return loss;
}

}  // namespace ope
