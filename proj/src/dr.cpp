#include "ope/dr.hpp"

#include <cmath>

#include "ope/errors.hpp"

namespace ope {

namespace {

double q_under_pi(const QTable& q, const Policy& pi, int s) {
    return q.values.row(s).dot(pi.probs.row(s));
}

double exact_d0_term(const QTable& q, const Eigen::VectorXd& d0,
                     const Policy& pi_e, double gamma) {
    double acc = 0.0;
    for (int s = 0; s < static_cast<int>(d0.size()); ++s)
        if (d0[s] > 0.0) acc += d0[s] * q_under_pi(q, pi_e, s);
    return (1.0 - gamma) * acc;
}

}  // namespace

double dr_estimate(const Dataset& ds, const WeightTable& w, const QTable& q,
                   const Eigen::VectorXd& d0, const Policy& pi_e, double gamma) {
    if (ds.size() == 0) throw EmptyDataset("dr_estimate requires data");
    double correction = 0.0;
    for (const Transition& t : ds.transitions)
        correction += w.values(t.s, t.a) *
                      (t.r + gamma * q_under_pi(q, pi_e, t.s_next) -
                       q.values(t.s, t.a));
    correction /= static_cast<double>(ds.size());
    return exact_d0_term(q, d0, pi_e, gamma) + correction;
}

double population_dr(const TabularMDP& mdp, const OccupancyTable& data_dist,
                     const WeightTable& w, const QTable& q, const Policy& pi_e) {
    double correction = 0.0;
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double mass = data_dist.values(s, a);
            if (mass == 0.0) continue;
            double expected_next = 0.0;
            for (int sn = 0; sn < mdp.n_states; ++sn) {
                const double p = mdp.transition(mdp.pair_index(s, a), sn);
                if (p > 0.0) expected_next += p * q_under_pi(q, pi_e, sn);
            }
            correction += mass * w.values(s, a) *
                          (mdp.reward_mean(s, a) + mdp.gamma * expected_next -
                           q.values(s, a));
        }
    return exact_d0_term(q, mdp.d0, pi_e, mdp.gamma) + correction;
}

double stepwise_is(const EpisodeSet& eps, const Policy& pi_e, const Policy& pi_b,
                   double gamma) {
    if (eps.episodes.empty()) throw EmptyDataset("stepwise_is requires episodes");
    double acc = 0.0;
    for (const Episode& ep : eps.episodes) {
        double rho = 1.0;
        double disc = 1.0;
        double value = 0.0;
        for (std::size_t t = 0; t < ep.states.size(); ++t) {
            const int s = ep.states[t];
            const int a = ep.actions[t];
            const double pb = pi_b.probs(s, a);
            if (pb <= 0.0)
                throw BehaviorSupportError(
                    "behavior policy has zero mass on observed action");
            rho *= pi_e.probs(s, a) / pb;
            value += disc * rho * ep.rewards[t];
            disc *= gamma;
        }
        acc += value;
    }
    return (1.0 - gamma) * acc / static_cast<double>(eps.episodes.size());
}

double naive_behavior_value(const Dataset& ds) {
    if (ds.size() == 0) throw EmptyDataset("naive_behavior_value requires data");
    double acc = 0.0;
    for (const Transition& t : ds.transitions) acc += t.r;
    return acc / static_cast<double>(ds.size());
}

}  // namespace ope
