#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ope/data.hpp"
#include "ope/mdp.hpp"

namespace ope {

/**
 * Replication-study configuration. The fixture field names a built-in
 * instance ("m1", "chain2", "minitaxi") or a path to an MDP JSON file.
 * Policies default per fixture (chain2 uses its canonical target/behavior
 * pair); explicit tables or a softmax/mixture spec override them.
 */
struct ExperimentConfig {
    std::string fixture = "chain2";

    // Optional explicit policy tables; when absent the softmax spec applies.
    std::optional<Eigen::MatrixXd> pi_e_table;
    std::optional<Eigen::MatrixXd> pi_b_table;
    // pi_e = softmax(Q^uniform / target_temperature);
    // pi_b = mix_alpha * pi_e + (1 - mix_alpha) * softmax(Q^uniform / plus_temperature).
    double target_temperature = 0.3;
    double plus_temperature = 5.0;
    std::optional<double> mix_alpha;

    // Estimator names: mwl, mql, mswl_v2, mswl_v4, mwl_rkhs, mql_rkhs,
    // model_based, naive.
    std::vector<std::string> estimators = {"mwl"};
    std::vector<std::size_t> sample_sizes = {1000};  // ascending
    int n_replications = 1;
    std::uint64_t base_seed = 0;
    double ridge = 0.0;
    std::string kernel = "rbf";          // "rbf" | "linear"
    double bandwidth_divisor = 1.0;      // rbf sigma = median distance / divisor
    std::string output_path;             // empty: no CSV written
    // Wall-clock runtimes are nondeterministic; they stay 0 unless requested
    // so that identical configs produce byte-identical CSV.
    bool record_runtime = false;

    void validate() const;
};

struct ResultRow {
    std::string estimator;
    std::size_t n = 0;
    int rep = 0;
    double estimate = 0.0;
    double error = 0.0;   // estimate - true_return(pi_e)
    double runtime_ms = 0.0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    double true_value = 0.0;       // exact return of pi_e
    double behavior_value = 0.0;   // exact return of pi_b
};

/// Resolved target/behavior pair for a config and its MDP.
struct PolicyPair {
    Policy pi_e;
    Policy pi_b;
};
PolicyPair resolve_policies(const ExperimentConfig& cfg, const TabularMDP& mdp);

/// One estimator on an existing dataset; kernel and ridge come from cfg.
double evaluate_dataset(const std::string& estimator, const Dataset& ds,
                        const TabularMDP& mdp, const PolicyPair& pols,
                        const ExperimentConfig& cfg);

/// Runs every (estimator, n, rep) cell. Replication r uses seed
/// base_seed + r, shared across sample sizes so larger n extends the same
/// stream. Writes CSV to output_path when set (header
/// estimator,n,rep,estimate,error,runtime_ms, 17 significant digits).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Mean of (estimate - r_e)^2 / (r_b - r_e)^2; the constant-r_b baseline
/// scores exactly 1. Throws DegenerateNormalization when r_e == r_b.
double normalized_mse(const std::vector<double>& estimates, double r_e,
                      double r_b);

ExperimentConfig load_experiment_config(const std::string& path);
void write_results_csv(const std::vector<ResultRow>& rows,
                       const std::string& path);

}  // namespace ope
