#include "ope/fixtures.hpp"

#include <cmath>

#include "ope/errors.hpp"
#include "ope/solve.hpp"

namespace ope {

Policy softmax_policy(const QTable& q, double temperature) {
    if (temperature <= 0.0)
        throw ConfigError("softmax temperature must be positive");
    Policy pi;
    pi.probs.resize(q.values.rows(), q.values.cols());
    for (int s = 0; s < q.values.rows(); ++s) {
        const Eigen::VectorXd row = q.values.row(s).transpose() / temperature;
        const Eigen::VectorXd ex = (row.array() - row.maxCoeff()).exp();
        pi.probs.row(s) = ex.transpose() / ex.sum();
    }
    return pi;
}

Policy mix_policies(const Policy& a, const Policy& b, double alpha) {
    Policy out;
    out.probs = alpha * a.probs + (1.0 - alpha) * b.probs;
    return out;
}

TabularMDP fixture_m1() {
    TabularMDP m;
    m.n_states = 1;
    m.n_actions = 1;
    m.transition = Eigen::MatrixXd::Ones(1, 1);
    m.reward_mean = Eigen::MatrixXd::Ones(1, 1);
    m.reward_noise_std = Eigen::MatrixXd::Zero(1, 1);
    m.gamma = 0.9;
    m.d0 = Eigen::VectorXd::Ones(1);
    m.r_max = 1.0;
    m.validate();
    return m;
}

TabularMDP fixture_chain2() {
    TabularMDP m;
    m.n_states = 2;
    m.n_actions = 2;
    m.transition = Eigen::MatrixXd::Zero(4, 2);
    for (int s = 0; s < 2; ++s) {
        m.transition(s * 2 + 0, s) = 0.9;      // stay
        m.transition(s * 2 + 0, 1 - s) = 0.1;
        m.transition(s * 2 + 1, 1 - s) = 0.9;  // swap
        m.transition(s * 2 + 1, s) = 0.1;
    }
    m.reward_mean.resize(2, 2);
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a)
            m.reward_mean(s, a) = 0.2 + 0.5 * s + 0.3 * a;
    m.reward_noise_std = Eigen::MatrixXd::Constant(2, 2, 0.1);
    m.gamma = 0.9;
    m.d0.resize(2);
    m.d0 << 1.0, 0.0;
    // The top reward mean is 1.0; r_max = 2 keeps the clipped Gaussian noise
    // effectively unclipped so sampled rewards stay unbiased.
    m.r_max = 2.0;
    m.validate();
    return m;
}

Policy chain2_behavior() { return Policy::uniform(2, 2); }

Policy chain2_target() { return Policy::bernoulli(2, 0.8); }

namespace {

constexpr int kGrid = 5;
constexpr double kSlip = 0.1;

int cell(int row, int col) { return row * kGrid + col; }

// Destination of a deterministic move; walls keep the agent in place.
int move(int s, int dir) {
    int row = s / kGrid;
    int col = s % kGrid;
    switch (dir) {
        case 0: row = row > 0 ? row - 1 : row; break;
        case 1: row = row < kGrid - 1 ? row + 1 : row; break;
        case 2: col = col > 0 ? col - 1 : col; break;
        case 3: col = col < kGrid - 1 ? col + 1 : col; break;
        default: throw InternalError("bad direction");
    }
    return cell(row, col);
}

}  // namespace

TabularMDP fixture_minitaxi() {
    TabularMDP m;
    m.n_states = kGrid * kGrid;
    m.n_actions = 4;
    const int goal = cell(kGrid - 1, kGrid - 1);
    m.transition = Eigen::MatrixXd::Zero(m.n_states * m.n_actions, m.n_states);
    m.reward_mean = Eigen::MatrixXd::Zero(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) {
            const int row = s * m.n_actions + a;
            // Intended move w.p. 1 - slip; otherwise a uniform random move.
            m.transition(row, move(s, a)) += 1.0 - kSlip;
            for (int d = 0; d < 4; ++d)
                m.transition(row, move(s, d)) += kSlip / 4.0;
            m.reward_mean(s, a) = move(s, a) == goal ? 1.0 : 0.02;
        }
    m.reward_noise_std = Eigen::MatrixXd::Constant(m.n_states, m.n_actions, 0.05);
    m.gamma = 0.9;
    m.d0 = Eigen::VectorXd::Zero(m.n_states);
    m.d0[cell(0, 0)] = 1.0;
    m.r_max = 1.5;  // headroom above the goal reward keeps clipping negligible
    m.validate();
    return m;
}

Policy minitaxi_softmax(const TabularMDP& mdp, double temperature) {
    const QTable q = solve_q(mdp, Policy::uniform(mdp.n_states, mdp.n_actions));
    return softmax_policy(q, temperature);
}

Policy minitaxi_target(const TabularMDP& mdp) {
    return minitaxi_softmax(mdp, 0.3);
}

Policy minitaxi_behavior(const TabularMDP& mdp, double alpha) {
    return mix_policies(minitaxi_target(mdp), minitaxi_softmax(mdp, 5.0), alpha);
}

TabularMDP fixture_by_name(const std::string& name) {
    if (name == "m1") return fixture_m1();
    if (name == "chain2") return fixture_chain2();
    if (name == "minitaxi") return fixture_minitaxi();
    throw ConfigError("unknown fixture: " + name);
}

}  // namespace ope
