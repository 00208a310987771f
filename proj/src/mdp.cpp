#include "ope/mdp.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "ope/errors.hpp"

namespace ope {

namespace {
constexpr double kStochTol = 1e-12;
}

void TabularMDP::validate() const {
    if (n_states <= 0 || n_actions <= 0)
        throw InvalidMdp("n_states and n_actions must be positive");
    if (transition.rows() != n_pairs() || transition.cols() != n_states)
        throw InvalidMdp("transition has wrong shape");
    if (reward_mean.rows() != n_states || reward_mean.cols() != n_actions)
        throw InvalidMdp("reward_mean has wrong shape");
    if (reward_noise_std.rows() != n_states || reward_noise_std.cols() != n_actions)
        throw InvalidMdp("reward_noise_std has wrong shape");
    if (d0.size() != n_states) throw InvalidMdp("d0 has wrong length");
    if (gamma < 0.0 || gamma >= 1.0) throw InvalidMdp("gamma must lie in [0,1)");

    for (int row = 0; row < transition.rows(); ++row) {
        if (transition.row(row).minCoeff() < 0.0)
            throw InvalidMdp("negative transition probability");
        if (std::abs(transition.row(row).sum() - 1.0) > kStochTol)
            throw InvalidMdp("transition row does not sum to 1");
    }
    if (d0.minCoeff() < 0.0 || std::abs(d0.sum() - 1.0) > kStochTol)
        throw InvalidMdp("d0 is not a probability vector");
    if (reward_mean.minCoeff() < 0.0 || reward_mean.maxCoeff() > r_max)
        throw InvalidMdp("reward_mean outside [0, r_max]");
    if (reward_noise_std.minCoeff() < 0.0)
        throw InvalidMdp("negative reward noise std");
}

void Policy::validate() const {
    for (int s = 0; s < probs.rows(); ++s) {
        if (probs.row(s).minCoeff() < 0.0)
            throw InvalidPolicy("negative action probability");
        if (std::abs(probs.row(s).sum() - 1.0) > kStochTol)
            throw InvalidPolicy("policy row does not sum to 1");
    }
}

Policy Policy::uniform(int n_states, int n_actions) {
    Policy pi;
    pi.probs = Eigen::MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions);
    return pi;
}

Policy Policy::bernoulli(int n_states, double p1) {
    Policy pi;
    pi.probs.resize(n_states, 2);
    pi.probs.col(0).setConstant(1.0 - p1);
    pi.probs.col(1).setConstant(p1);
    return pi;
}

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.size();
    if (rows == 0) throw InvalidMdp("empty matrix in fixture file");
    const auto cols = j.at(0).size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json j = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        j.push_back(row);
    }
    return j;
}

}  // namespace

TabularMDP load_mdp_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open MDP fixture: " + path);
    nlohmann::json j;
    in >> j;

    TabularMDP mdp;
    mdp.n_states = j.at("n_states").get<int>();
    mdp.n_actions = j.at("n_actions").get<int>();
    mdp.gamma = j.at("gamma").get<double>();
    mdp.r_max = j.at("r_max").get<double>();
    // transition is nested [s][a][s'] in the file.
    const auto& pt = j.at("transition");
    mdp.transition.resize(mdp.n_states * mdp.n_actions, mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            for (int sn = 0; sn < mdp.n_states; ++sn)
                mdp.transition(mdp.pair_index(s, a), sn) = pt.at(s).at(a).at(sn).get<double>();
    mdp.reward_mean = matrix_from_json(j.at("reward_mean"));
    mdp.reward_noise_std = matrix_from_json(j.at("reward_noise_std"));
    const auto& jd0 = j.at("d0");
    mdp.d0.resize(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) mdp.d0[s] = jd0.at(s).get<double>();
    mdp.validate();
    return mdp;
}

void save_mdp_json(const TabularMDP& mdp, const std::string& path) {
    nlohmann::json j;
    j["n_states"] = mdp.n_states;
    j["n_actions"] = mdp.n_actions;
    j["gamma"] = mdp.gamma;
    j["r_max"] = mdp.r_max;
    nlohmann::json pt = nlohmann::json::array();
    for (int s = 0; s < mdp.n_states; ++s) {
        nlohmann::json per_action = nlohmann::json::array();
        for (int a = 0; a < mdp.n_actions; ++a) {
            nlohmann::json row = nlohmann::json::array();
            for (int sn = 0; sn < mdp.n_states; ++sn)
                row.push_back(mdp.transition(mdp.pair_index(s, a), sn));
            per_action.push_back(row);
        }
        pt.push_back(per_action);
    }
    j["transition"] = pt;
    j["reward_mean"] = matrix_to_json(mdp.reward_mean);
    j["reward_noise_std"] = matrix_to_json(mdp.reward_noise_std);
    j["d0"] = std::vector<double>(mdp.d0.data(), mdp.d0.data() + mdp.d0.size());

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write MDP fixture: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace ope
