#include "ope/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "ope/errors.hpp"

namespace ope {

FeatureMap tabular_features(int n_states, int n_actions) {
    if (n_states <= 0 || n_actions <= 0)
        throw ConfigError("tabular_features requires positive counts");
    FeatureMap fm;
    fm.n_states = n_states;
    fm.n_actions = n_actions;
    fm.dim = n_states * n_actions;
    fm.table = Eigen::MatrixXd::Identity(fm.dim, fm.dim);
    return fm;
}

StateFeatureMap tabular_state_features(int n_states) {
    StateFeatureMap fm;
    fm.dim = n_states;
    fm.table = Eigen::MatrixXd::Identity(n_states, n_states);
    return fm;
}

Eigen::VectorXd feature_expectation_pi(const FeatureMap& fm, const Policy& pi, int s) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(fm.dim);
    for (int a = 0; a < fm.n_actions; ++a) out += pi.probs(s, a) * fm.at(s, a);
    return out;
}

Eigen::VectorXd feature_expectation_d0(const FeatureMap& fm, const Policy& pi,
                                       const Eigen::VectorXd& d0) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(fm.dim);
    for (int s = 0; s < fm.n_states; ++s)
        if (d0[s] > 0.0) out += d0[s] * feature_expectation_pi(fm, pi, s);
    return out;
}

double rbf_eval(const KernelSpec& kspec, const Eigen::VectorXd& x,
                const Eigen::VectorXd& y) {
    if (x.size() != y.size())
        throw ConfigError("rbf_eval: dimension mismatch");
    const double d2 = (x - y).squaredNorm();
    return std::exp(-d2 / (2.0 * kspec.bandwidth * kspec.bandwidth));
}

double kernel_eval(const KernelSpec& kspec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
    switch (kspec.kind) {
        case KernelSpec::Kind::rbf:
            return rbf_eval(kspec, x, y);
        case KernelSpec::Kind::linear:
            if (x.size() != y.size())
                throw ConfigError("kernel_eval: dimension mismatch");
            return x.dot(y);
    }
    throw InternalError("unknown kernel kind");
}

Eigen::MatrixXd kernel_gram_all_pairs(const KernelSpec& kspec, int n_states,
                                      int n_actions) {
    const FeatureMap onehot = tabular_features(n_states, n_actions);
    const int n = n_states * n_actions;
    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double k = kernel_eval(kspec, onehot.table.row(i).transpose(),
                                         onehot.table.row(j).transpose());
            gram(i, j) = k;
            gram(j, i) = k;
        }
    return gram;
}

double median_bandwidth(const Dataset& ds, const FeatureMap& encode,
                        std::size_t max_points) {
    const std::size_t n = std::min(ds.size(), max_points);
    if (n < 2) throw DegenerateBandwidth("need at least two points");

    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Transition& ti = ds.transitions[i];
        const Eigen::VectorXd xi = encode.at(ti.s, ti.a);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Transition& tj = ds.transitions[j];
            dists.push_back((xi - encode.at(tj.s, tj.a)).norm());
        }
    }
    std::sort(dists.begin(), dists.end());
    const double median = dists[dists.size() / 2];
    if (median <= 0.0)
        throw DegenerateBandwidth("all encoded points are identical");
    return median;
}

}  // namespace ope
