#include "ope/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ope/errors.hpp"
#include "ope/rng.hpp"
#include "ope/solve.hpp"

namespace ope {

namespace {

double sample_reward(const TabularMDP& mdp, int s, int a, SplitMix64& rng) {
    const double mean = mdp.reward_mean(s, a);
    const double std = mdp.reward_noise_std(s, a);
    const double raw = mean + std * rng.next_normal();
    return std::clamp(raw, 0.0, mdp.r_max);
}

}  // namespace

Dataset sample_iid(const TabularMDP& mdp, const Policy& pi_b, std::size_t n,
                   std::uint64_t seed) {
    if (n == 0) throw EmptyDataset("sample_iid requires n >= 1");
    const OccupancyTable stat = stationary_distribution(mdp, pi_b);
    const Eigen::VectorXd state_dist = stat.state_marginal();

    Dataset ds;
    ds.mode = DataMode::iid_stationary;
    ds.seed = seed;
    ds.source_dist = stat;
    ds.transitions.reserve(n);

    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        Transition t;
        t.s = rng.next_categorical(state_dist);
        t.a = rng.next_categorical(pi_b.probs.row(t.s).transpose());
        t.r = sample_reward(mdp, t.s, t.a, rng);
        t.s_next = rng.next_categorical(
            mdp.transition.row(mdp.pair_index(t.s, t.a)).transpose());
        ds.transitions.push_back(t);
    }
    return ds;
}

Dataset sample_trajectory(const TabularMDP& mdp, const Policy& pi_b,
                          std::size_t horizon, std::uint64_t seed) {
    if (horizon == 0) throw EmptyDataset("sample_trajectory requires horizon >= 1");
    const OccupancyTable stat = stationary_distribution(mdp, pi_b);
    const Eigen::VectorXd state_dist = stat.state_marginal();

    Dataset ds;
    ds.mode = DataMode::single_trajectory;
    ds.seed = seed;
    ds.source_dist = stat;
    ds.transitions.reserve(horizon);

    SplitMix64 rng(seed);
    int s = rng.next_categorical(state_dist);
    for (std::size_t i = 0; i < horizon; ++i) {
        Transition t;
        t.s = s;
        t.a = rng.next_categorical(pi_b.probs.row(s).transpose());
        t.r = sample_reward(mdp, t.s, t.a, rng);
        t.s_next = rng.next_categorical(
            mdp.transition.row(mdp.pair_index(t.s, t.a)).transpose());
        ds.transitions.push_back(t);
        s = t.s_next;
    }
    return ds;
}

EpisodeSet sample_episodes(const TabularMDP& mdp, const Policy& pi_b,
                           std::size_t n_episodes, std::size_t h,
                           std::uint64_t seed) {
    if (n_episodes == 0 || h == 0)
        throw EmptyDataset("sample_episodes requires n_episodes >= 1 and h >= 1");

    EpisodeSet out;
    out.seed = seed;
    out.episodes.reserve(n_episodes);
    SplitMix64 rng(seed);
    for (std::size_t e = 0; e < n_episodes; ++e) {
        Episode ep;
        ep.states.reserve(h);
        ep.actions.reserve(h);
        ep.rewards.reserve(h);
        int s = rng.next_categorical(mdp.d0);
        for (std::size_t t = 0; t < h; ++t) {
            const int a = rng.next_categorical(pi_b.probs.row(s).transpose());
            const double r = sample_reward(mdp, s, a, rng);
            ep.states.push_back(s);
            ep.actions.push_back(a);
            ep.rewards.push_back(r);
            s = rng.next_categorical(mdp.transition.row(mdp.pair_index(s, a)).transpose());
        }
        out.episodes.push_back(std::move(ep));
    }
    return out;
}

void save_dataset_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write dataset: " + path);
    out << "s,a,r,s_next\n";
    char buf[64];
    for (const Transition& t : ds.transitions) {
        std::snprintf(buf, sizeof(buf), "%.17g", t.r);
        out << t.s << ',' << t.a << ',' << buf << ',' << t.s_next << '\n';
    }

    nlohmann::json meta;
    meta["mode"] = ds.mode == DataMode::iid_stationary ? "iid_stationary"
                                                       : "single_trajectory";
    meta["seed"] = ds.seed;
    std::ofstream mout(path + ".meta.json");
    mout << meta.dump(2) << "\n";
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset: " + path);
    Dataset ds;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        Transition t;
        char comma;
        ss >> t.s >> comma >> t.a >> comma >> t.r >> comma >> t.s_next;
        ds.transitions.push_back(t);
    }
    if (ds.transitions.empty()) throw EmptyDataset("dataset file has no rows");

    std::ifstream min(path + ".meta.json");
    if (min) {
        nlohmann::json meta;
        min >> meta;
        ds.seed = meta.value("seed", std::uint64_t{0});
        ds.mode = meta.value("mode", std::string("iid_stationary")) == "single_trajectory"
                      ? DataMode::single_trajectory
                      : DataMode::iid_stationary;
    }
    return ds;
}

}  // namespace ope
