#include "ope/solve.hpp"

#include <cmath>

#include <Eigen/LU>

#include "ope/errors.hpp"

namespace ope {

Eigen::MatrixXd pair_transition_matrix(const TabularMDP& mdp, const Policy& pi) {
    const int n = mdp.n_pairs();
    Eigen::MatrixXd p(n, n);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            const int row = mdp.pair_index(s, a);
            for (int sn = 0; sn < mdp.n_states; ++sn)
                for (int an = 0; an < mdp.n_actions; ++an)
                    p(row, mdp.pair_index(sn, an)) =
                        mdp.transition(row, sn) * pi.probs(sn, an);
        }
    return p;
}

QTable solve_q(const TabularMDP& mdp, const Policy& pi) {
    mdp.validate();
    pi.validate();
    const int n = mdp.n_pairs();
    const Eigen::MatrixXd p_pi = pair_transition_matrix(mdp, pi);
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - mdp.gamma * p_pi;
    Eigen::VectorXd r(n);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            r[mdp.pair_index(s, a)] = mdp.reward_mean(s, a);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    const Eigen::VectorXd q_flat = lu.solve(r);
    // (I - gamma P_pi) is strictly diagonally dominant for gamma < 1, but
    // guard against a degenerate factorization anyway.
    if (!q_flat.allFinite())
        throw InternalError("singular Bellman system despite gamma < 1");

    QTable q;
    q.values.resize(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            q.values(s, a) = q_flat[mdp.pair_index(s, a)];
    return q;
}

VTable state_value(const QTable& q, const Policy& pi) {
    if (q.values.rows() != pi.probs.rows() || q.values.cols() != pi.probs.cols())
        throw InvalidPolicy("Q table and policy shapes disagree");
    VTable v;
    v.values = (q.values.array() * pi.probs.array()).rowwise().sum();
    return v;
}

OccupancyTable discounted_occupancy(const TabularMDP& mdp, const Policy& pi) {
    mdp.validate();
    pi.validate();
    const int n = mdp.n_pairs();
    Eigen::VectorXd start(n);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            start[mdp.pair_index(s, a)] = mdp.d0[s] * pi.probs(s, a);

    // Row-vector solve d (I - gamma P_pi) = (1-gamma) start, done on the
    // transposed system to stay in column form.
    const Eigen::MatrixXd p_pi = pair_transition_matrix(mdp, pi);
    Eigen::MatrixXd system_t =
        (Eigen::MatrixXd::Identity(n, n) - mdp.gamma * p_pi).transpose();
    const Eigen::VectorXd d_flat =
        Eigen::PartialPivLU<Eigen::MatrixXd>(system_t).solve(
            ((1.0 - mdp.gamma) * start).eval());

    OccupancyTable d;
    d.values.resize(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            d.values(s, a) = d_flat[mdp.pair_index(s, a)];
    return d;
}

double true_return(const TabularMDP& mdp, const Policy& pi) {
    const OccupancyTable d = discounted_occupancy(mdp, pi);
    const double via_occupancy = (d.values.array() * mdp.reward_mean.array()).sum();

    const QTable q = solve_q(mdp, pi);
    const VTable v = state_value(q, pi);
    const double via_value = (1.0 - mdp.gamma) * mdp.d0.dot(v.values);

    if (std::abs(via_occupancy - via_value) > 1e-10)
        throw InternalError("return identities disagree beyond tolerance");
    return via_occupancy;
}

OccupancyTable stationary_distribution(const TabularMDP& mdp, const Policy& pi) {
    mdp.validate();
    pi.validate();
    const int n = mdp.n_pairs();
    const Eigen::MatrixXd p_pi = pair_transition_matrix(mdp, pi);

    constexpr int kMaxIters = 100000;
    constexpr double kTol = 1e-12;
    Eigen::VectorXd d = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int it = 0; it < kMaxIters; ++it) {
        Eigen::VectorXd next = p_pi.transpose() * d;
        next /= next.sum();
        const double delta = (next - d).lpNorm<1>();
        d = next;
        if (delta < kTol) {
            OccupancyTable out;
            out.values.resize(mdp.n_states, mdp.n_actions);
            for (int s = 0; s < mdp.n_states; ++s)
                for (int a = 0; a < mdp.n_actions; ++a)
                    out.values(s, a) = d[mdp.pair_index(s, a)];
            return out;
        }
    }
    throw ErgodicityError("power iteration did not converge; chain may be non-ergodic");
}

WeightTable true_weight(const TabularMDP& mdp, const Policy& pi_e,
                        const OccupancyTable& data_dist) {
    const OccupancyTable d_e = discounted_occupancy(mdp, pi_e);
    WeightTable w;
    w.values.resize(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double num = d_e.values(s, a);
            const double den = data_dist.values(s, a);
            if (den <= 0.0) {
                if (num > 0.0)
                    throw CoverageError("target occupancy uncovered at (s=" +
                                        std::to_string(s) + ", a=" + std::to_string(a) + ")");
                w.values(s, a) = 0.0;
            } else {
                w.values(s, a) = num / den;
            }
        }
    return w;
}

}  // namespace ope
