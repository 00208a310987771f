#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "ope/errors.hpp"
#include "ope/experiment.hpp"
#include "ope/fixtures.hpp"
#include "ope/solve.hpp"

using namespace ope;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("softmax_policy limits and validity") {
    const TabularMDP m = fixture_chain2();
    const QTable q = solve_q(m, Policy::uniform(2, 2));

    const Policy flat = softmax_policy(q, 1e6);
    CHECK((flat.probs.array() - 0.5).abs().maxCoeff() <= 1e-4);

    const Policy sharp = softmax_policy(q, 1e-6);
    for (int s = 0; s < 2; ++s) {
        int argmax;
        q.values.row(s).maxCoeff(&argmax);
        CHECK(sharp.probs(s, argmax) == doctest::Approx(1.0).epsilon(1e-9));
    }

    const Policy mid = softmax_policy(q, 1.0);
    mid.validate();
    for (int s = 0; s < 2; ++s)
        CHECK(mid.probs.row(s).sum() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(softmax_policy(q, 0.0), ConfigError);
}

TEST_CASE("normalized_mse definition and error cases") {
    CHECK(normalized_mse({0.6, 0.6}, 0.6, 0.5) == 0.0);
    CHECK(normalized_mse({0.5, 0.5, 0.5}, 0.6, 0.5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(normalized_mse({0.5}, 0.6, 0.6), DegenerateNormalization);
}

TEST_CASE("config validation catches bad fields") {
    ExperimentConfig cfg;
    cfg.n_replications = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.sample_sizes = {100, 50};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.estimators = {"mwl", "bogus"};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.kernel = "poly";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("one-cell run on the deterministic fixture has zero error") {
    ExperimentConfig cfg;
    cfg.fixture = "m1";
    cfg.estimators = {"mwl"};
    cfg.sample_sizes = {10};
    cfg.n_replications = 1;
    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].error == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(res.true_value == doctest::Approx(1.0));
}

TEST_CASE("identical configs produce byte-identical CSV") {
    ExperimentConfig cfg;
    cfg.fixture = "chain2";
    cfg.estimators = {"mwl", "mswl_v2", "naive"};
    cfg.sample_sizes = {500, 1000};
    cfg.n_replications = 3;
    cfg.base_seed = 77;
    cfg.output_path = "/tmp/ope_test_bench_a.csv";
    run_experiment(cfg);
    cfg.output_path = "/tmp/ope_test_bench_b.csv";
    run_experiment(cfg);
    CHECK(slurp("/tmp/ope_test_bench_a.csv") == slurp("/tmp/ope_test_bench_b.csv"));
}

TEST_CASE("config JSON round trip drives the same experiment") {
    const std::string path = "/tmp/ope_test_config.json";
    {
        std::ofstream out(path);
        out << R"({"fixture":"chain2","estimators":["mwl"],"sample_sizes":[400],)"
            << R"("n_replications":2,"base_seed":5,"ridge":0.0,)"
            << R"("output_path":"/tmp/ope_test_cfg_run.csv"})";
    }
    const ExperimentConfig cfg = load_experiment_config(path);
    CHECK(cfg.fixture == "chain2");
    CHECK(cfg.sample_sizes == std::vector<std::size_t>{400});
    CHECK(cfg.n_replications == 2);
    const ExperimentResult res = run_experiment(cfg);
    CHECK(res.rows.size() == 2);
    CHECK_THROWS_AS(load_experiment_config("/tmp/does_not_exist.json"),
                    ConfigError);
}

TEST_CASE("median MWL error shrinks when n quadruples") {
    ExperimentConfig cfg;
    cfg.fixture = "chain2";
    cfg.estimators = {"mwl"};
    cfg.sample_sizes = {10000, 40000};
    cfg.n_replications = 50;
    cfg.base_seed = 300;
    const ExperimentResult res = run_experiment(cfg);

    std::vector<double> small, big;
    for (const ResultRow& r : res.rows)
        (r.n == 10000 ? small : big).push_back(std::abs(r.error));
    std::sort(small.begin(), small.end());
    std::sort(big.begin(), big.end());
    CHECK(big[big.size() / 2] <= 0.7 * small[small.size() / 2]);
}

TEST_CASE("MWL beats the naive baseline in normalized MSE") {
    ExperimentConfig cfg;
    cfg.fixture = "chain2";
    cfg.estimators = {"mwl"};
    cfg.sample_sizes = {10000};
    cfg.n_replications = 200;
    cfg.base_seed = 400;
    const ExperimentResult res = run_experiment(cfg);
    std::vector<double> estimates;
    for (const ResultRow& r : res.rows) estimates.push_back(r.estimate);
    CHECK(normalized_mse(estimates, res.true_value, res.behavior_value) < 1.0);
}
