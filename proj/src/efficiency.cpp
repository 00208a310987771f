#include "ope/efficiency.hpp"

#include "ope/errors.hpp"
#include "ope/solve.hpp"

namespace ope {

namespace {

// Conditional variance given s of rho(s,a) {r + gamma V(s') - offset(s)} when
// (a, r, s') follow the data law at s. Shared by the two state-level variance
// formulas, which differ only in whether V(s) is subtracted.
double state_conditional_variance(const TabularMDP& mdp, const Policy& pi_e,
                                  const Policy& pi_b, const Eigen::VectorXd& v,
                                  const OccupancyTable& data_dist, int s,
                                  double offset) {
    const double d_b = data_dist.values.row(s).sum();
    double mean = 0.0;
    double second = 0.0;
    for (int a = 0; a < mdp.n_actions; ++a) {
        const double mass = data_dist.values(s, a);
        if (mass == 0.0) continue;
        const double p_a = mass / d_b;
        const double pb = pi_b.probs(s, a);
        if (pb <= 0.0)
            throw BehaviorSupportError(
                "behavior policy has zero mass where the data distribution "
                "does not");
        const double rho = pi_e.probs(s, a) / pb;
        double mean_sa = 0.0;
        double second_sa = 0.0;
        for (int sn = 0; sn < mdp.n_states; ++sn) {
            const double p = mdp.transition(mdp.pair_index(s, a), sn);
            if (p == 0.0) continue;
            const double core = mdp.reward_mean(s, a) + mdp.gamma * v[sn] - offset;
            mean_sa += p * core;
            const double sigma = mdp.reward_noise_std(s, a);
            second_sa += p * (core * core + sigma * sigma);
        }
        mean += p_a * rho * mean_sa;
        second += p_a * rho * rho * second_sa;
    }
    return second - mean * mean;
}

}  // namespace

double semiparametric_variance(const TabularMDP& mdp, const Policy& pi_e,
                               const OccupancyTable& data_dist) {
    const QTable q = solve_q(mdp, pi_e);
    const VTable v = state_value(q, pi_e);
    const WeightTable w = true_weight(mdp, pi_e, data_dist);

    double acc = 0.0;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double mass = data_dist.values(s, a);
            if (mass == 0.0) continue;
            const double wv = w.values(s, a);
            if (wv == 0.0) continue;
            const double sigma = mdp.reward_noise_std(s, a);
            // sigma^2 + sum_s' P(s'|s,a) (Rbar + gamma V' - Q)^2
            double inner = sigma * sigma;
            for (int sn = 0; sn < mdp.n_states; ++sn) {
                const double p = mdp.transition(mdp.pair_index(s, a), sn);
                if (p == 0.0) continue;
                const double residual = mdp.reward_mean(s, a) +
                                        mdp.gamma * v.values[sn] -
                                        q.values(s, a);
                inner += p * residual * residual;
            }
            acc += mass * wv * wv * inner;
        }
    return acc;
}

double mswl_asymptotic_variance(const TabularMDP& mdp, const Policy& pi_e,
                                const Policy& pi_b,
                                const OccupancyTable& data_dist) {
    const QTable q = solve_q(mdp, pi_e);
    const VTable v = state_value(q, pi_e);
    const Eigen::VectorXd d_e =
        discounted_occupancy(mdp, pi_e).state_marginal();
    const Eigen::VectorXd d_b = data_dist.state_marginal();

    double acc = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        if (d_b[s] == 0.0) {
            if (d_e[s] > 0.0)
                throw CoverageError("target occupancy escapes the data support");
            continue;
        }
        const double ratio = d_e[s] / d_b[s];
        acc += d_b[s] * ratio * ratio *
               state_conditional_variance(mdp, pi_e, pi_b, v.values, data_dist,
                                          s, v.values[s]);
    }
    return acc;
}

double mvl_asymptotic_variance(const TabularMDP& mdp, const Policy& pi_e,
                               const Policy& pi_b,
                               const OccupancyTable& data_dist) {
    const QTable q = solve_q(mdp, pi_e);
    const VTable v = state_value(q, pi_e);
    const Eigen::VectorXd d_e =
        discounted_occupancy(mdp, pi_e).state_marginal();
    const Eigen::VectorXd d_b = data_dist.state_marginal();

    double acc = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        if (d_b[s] == 0.0) {
            if (d_e[s] > 0.0)
                throw CoverageError("target occupancy escapes the data support");
            continue;
        }
        const double ratio = d_e[s] / d_b[s];
        acc += d_b[s] * ratio * ratio *
               state_conditional_variance(mdp, pi_e, pi_b, v.values, data_dist,
                                          s, 0.0);
    }
    return acc;
}

VarianceReport variance_report(const TabularMDP& mdp, const Policy& pi_e,
                               const Policy& pi_b,
                               const OccupancyTable& data_dist) {
    VarianceReport rep;
    rep.semiparametric_lb = semiparametric_variance(mdp, pi_e, data_dist);
    rep.mswl_var = mswl_asymptotic_variance(mdp, pi_e, pi_b, data_dist);
    rep.mvl_var = mvl_asymptotic_variance(mdp, pi_e, pi_b, data_dist);
    return rep;
}

}  // namespace ope
