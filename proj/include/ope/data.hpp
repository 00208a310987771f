#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ope/mdp.hpp"

namespace ope {

struct Transition {
    int s = 0;
    int a = 0;
    double r = 0.0;
    int s_next = 0;
};

enum class DataMode { iid_stationary, single_trajectory };

struct Dataset {
    std::vector<Transition> transitions;
    DataMode mode = DataMode::iid_stationary;
    std::uint64_t seed = 0;
    std::optional<OccupancyTable> source_dist;  // the d_pib used, when known

    std::size_t size() const { return transitions.size(); }
};

struct Episode {
    std::vector<int> states;    // length h
    std::vector<int> actions;   // length h
    std::vector<double> rewards;  // length h
};

struct EpisodeSet {
    std::vector<Episode> episodes;
    std::uint64_t seed = 0;
};

/// n i.i.d. tuples: s ~ stationary(pi_b), a ~ pi_b(s), r ~ clipped Gaussian,
/// s' ~ P(s,a). Draw order per tuple: state, action, reward, next-state.
Dataset sample_iid(const TabularMDP& mdp, const Policy& pi_b, std::size_t n,
                   std::uint64_t seed);

/// One unbroken trajectory of `horizon` tuples; s_0 from the stationary
/// distribution so the chain is stationary from the first step.
Dataset sample_trajectory(const TabularMDP& mdp, const Policy& pi_b,
                          std::size_t horizon, std::uint64_t seed);

/// n_episodes trajectories of length h starting from d0.
EpisodeSet sample_episodes(const TabularMDP& mdp, const Policy& pi_b,
                           std::size_t n_episodes, std::size_t h,
                           std::uint64_t seed);

/// CSV with header s,a,r,s_next; mode and seed go to `path` + ".meta.json".
void save_dataset_csv(const Dataset& ds, const std::string& path);
Dataset load_dataset_csv(const std::string& path);

}  // namespace ope
