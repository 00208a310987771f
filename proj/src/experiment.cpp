#include "ope/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ope/data.hpp"
#include "ope/dr.hpp"
#include "ope/errors.hpp"
#include "ope/features.hpp"
#include "ope/fixtures.hpp"
#include "ope/linear.hpp"
#include "ope/model_based.hpp"
#include "ope/rkhs.hpp"
#include "ope/solve.hpp"

namespace ope {

namespace {

const std::vector<std::string> kKnownEstimators = {
    "mwl", "mql", "mswl_v2", "mswl_v4", "mwl_rkhs",
    "mql_rkhs", "model_based", "naive"};

bool is_fixture_name(const std::string& s) {
    return s == "m1" || s == "chain2" || s == "minitaxi";
}

Policy policy_from_table(const Eigen::MatrixXd& table) {
    Policy p;
    p.probs = table;
    p.validate();
    return p;
}

KernelSpec resolve_kernel(const ExperimentConfig& cfg, const Dataset& ds,
                          const TabularMDP& mdp) {
    if (cfg.kernel == "linear") return KernelSpec::linear();
    const FeatureMap onehot = tabular_features(mdp.n_states, mdp.n_actions);
    return KernelSpec::rbf(median_bandwidth(ds, onehot) / cfg.bandwidth_divisor);
}

}  // namespace

double evaluate_dataset(const std::string& name, const Dataset& ds,
                        const TabularMDP& mdp, const PolicyPair& pols,
                        const ExperimentConfig& cfg) {
    const FeatureMap fm = tabular_features(mdp.n_states, mdp.n_actions);
    const StateFeatureMap sfm = tabular_state_features(mdp.n_states);
    if (name == "mwl")
        return mwl_linear(ds, fm, mdp.d0, pols.pi_e, mdp.gamma, cfg.ridge).estimate;
    if (name == "mql")
        return mql_linear(ds, fm, mdp.d0, pols.pi_e, mdp.gamma, cfg.ridge).estimate;
    if (name == "mswl_v2")
        return mswl_linear(ds, sfm, mdp.d0, pols.pi_e, pols.pi_b, MswlVariant::v2,
                           mdp.gamma, cfg.ridge)
            .estimate;
    if (name == "mswl_v4")
        return mswl_linear(ds, sfm, mdp.d0, pols.pi_e, pols.pi_b, MswlVariant::v4,
                           mdp.gamma, cfg.ridge)
            .estimate;
    if (name == "mwl_rkhs")
        return mwl_rkhs_fit(ds, fm, mdp.d0, pols.pi_e, mdp.gamma,
                            resolve_kernel(cfg, ds, mdp), cfg.ridge)
            .estimate;
    if (name == "mql_rkhs")
        return mql_rkhs_fit(ds, fm, mdp.d0, pols.pi_e, mdp.gamma,
                            resolve_kernel(cfg, ds, mdp), cfg.ridge)
            .estimate;
    if (name == "model_based")
        return model_based_estimate(
            fit_empirical_mdp(ds, mdp.n_states, mdp.n_actions, mdp.gamma,
                              mdp.d0, mdp.r_max),
            pols.pi_e);
    if (name == "naive") return naive_behavior_value(ds);
    throw ConfigError("unknown estimator: " + name);
}

void ExperimentConfig::validate() const {
    if (n_replications < 1)
        throw ConfigError("n_replications must be at least 1");
    if (sample_sizes.empty()) throw ConfigError("sample_sizes is empty");
    if (!std::is_sorted(sample_sizes.begin(), sample_sizes.end()))
        throw ConfigError("sample_sizes must be ascending");
    if (estimators.empty()) throw ConfigError("estimators is empty");
    for (const std::string& e : estimators)
        if (std::find(kKnownEstimators.begin(), kKnownEstimators.end(), e) ==
            kKnownEstimators.end())
            throw ConfigError("unknown estimator: " + e);
    if (kernel != "rbf" && kernel != "linear")
        throw ConfigError("kernel must be rbf or linear");
    if (bandwidth_divisor <= 0.0)
        throw ConfigError("bandwidth_divisor must be positive");
    if (ridge < 0.0) throw ConfigError("ridge must be nonnegative");
}

PolicyPair resolve_policies(const ExperimentConfig& cfg, const TabularMDP& mdp) {
    PolicyPair out;
    if (cfg.pi_e_table) {
        out.pi_e = policy_from_table(*cfg.pi_e_table);
    } else if (cfg.fixture == "chain2") {
        out.pi_e = chain2_target();
    } else if (cfg.fixture == "m1") {
        out.pi_e = Policy::uniform(1, 1);
    } else {
        const QTable q =
            solve_q(mdp, Policy::uniform(mdp.n_states, mdp.n_actions));
        out.pi_e = softmax_policy(q, cfg.target_temperature);
    }

    if (cfg.pi_b_table) {
        out.pi_b = policy_from_table(*cfg.pi_b_table);
    } else if (cfg.mix_alpha) {
        const QTable q =
            solve_q(mdp, Policy::uniform(mdp.n_states, mdp.n_actions));
        out.pi_b = mix_policies(out.pi_e, softmax_policy(q, cfg.plus_temperature),
                                *cfg.mix_alpha);
    } else if (cfg.fixture == "chain2") {
        out.pi_b = chain2_behavior();
    } else {
        out.pi_b = Policy::uniform(mdp.n_states, mdp.n_actions);
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const TabularMDP mdp = is_fixture_name(cfg.fixture)
                               ? fixture_by_name(cfg.fixture)
                               : load_mdp_json(cfg.fixture);
    const PolicyPair pols = resolve_policies(cfg, mdp);

    ExperimentResult result;
    result.true_value = true_return(mdp, pols.pi_e);
    result.behavior_value = true_return(mdp, pols.pi_b);

    for (std::size_t n : cfg.sample_sizes)
        for (int rep = 0; rep < cfg.n_replications; ++rep) {
            const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(rep);
            const Dataset ds = sample_iid(mdp, pols.pi_b, n, seed);
            for (const std::string& name : cfg.estimators) {
                const auto t0 = std::chrono::steady_clock::now();
                const double est = evaluate_dataset(name, ds, mdp, pols, cfg);
                const auto t1 = std::chrono::steady_clock::now();
                ResultRow row;
                row.estimator = name;
                row.n = n;
                row.rep = rep;
                row.estimate = est;
                row.error = est - result.true_value;
                row.runtime_ms =
                    cfg.record_runtime
                        ? std::chrono::duration<double, std::milli>(t1 - t0)
                              .count()
                        : 0.0;
                result.rows.push_back(row);
            }
        }

    if (!cfg.output_path.empty()) write_results_csv(result.rows, cfg.output_path);
    return result;
}

double normalized_mse(const std::vector<double>& estimates, double r_e,
                      double r_b) {
    if (r_e == r_b)
        throw DegenerateNormalization("r_e equals r_b; cannot normalize");
    if (estimates.empty()) throw EmptyDataset("no estimates to average");
    const double denom = (r_b - r_e) * (r_b - r_e);
    double acc = 0.0;
    for (double e : estimates) acc += (e - r_e) * (e - r_e);
    return acc / (denom * static_cast<double>(estimates.size()));
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }

    ExperimentConfig cfg;
    const auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
    };
    get("fixture", cfg.fixture);
    get("target_temperature", cfg.target_temperature);
    get("plus_temperature", cfg.plus_temperature);
    if (j.contains("mix_alpha")) cfg.mix_alpha = j.at("mix_alpha").get<double>();
    get("estimators", cfg.estimators);
    get("sample_sizes", cfg.sample_sizes);
    get("n_replications", cfg.n_replications);
    get("base_seed", cfg.base_seed);
    get("ridge", cfg.ridge);
    get("kernel", cfg.kernel);
    get("bandwidth_divisor", cfg.bandwidth_divisor);
    get("output_path", cfg.output_path);
    get("record_runtime", cfg.record_runtime);

    const auto load_table = [&](const char* key) -> std::optional<Eigen::MatrixXd> {
        if (!j.contains(key)) return std::nullopt;
        const auto rows = j.at(key).get<std::vector<std::vector<double>>>();
        if (rows.empty()) throw ConfigError(std::string(key) + " is empty");
        Eigen::MatrixXd m(rows.size(), rows[0].size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != rows[0].size())
                throw ConfigError(std::string(key) + " rows differ in length");
            for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
        }
        return m;
    };
    cfg.pi_e_table = load_table("pi_e");
    cfg.pi_b_table = load_table("pi_b");

    cfg.validate();
    return cfg;
}

void write_results_csv(const std::vector<ResultRow>& rows,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "estimator,n,rep,estimate,error,runtime_ms\n";
    char buf[96];
    for (const ResultRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", r.estimate, r.error,
                      r.runtime_ms);
        out << r.estimator << ',' << r.n << ',' << r.rep << ',' << buf << '\n';
    }
}

}  // namespace ope
