#include "ope/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ope/errors.hpp"
#include "ope/rng.hpp"

namespace ope {

namespace {

constexpr double kCondLimit = 1e12;
constexpr double kFallbackRidge = 1e-8;

// Transition counts over (s,a,s') and reward sums over (s,a); the kernel
// terms only depend on the data through these.
struct Aggregates {
    Eigen::MatrixXd triple_counts;  // (S*A) x S
    Eigen::MatrixXd reward_sum;     // S x A
    double n = 0.0;
};

Aggregates aggregate(const Dataset& ds, int n_states, int n_actions) {
    if (ds.size() == 0) throw EmptyDataset("rkhs loss requires data");
    Aggregates agg;
    agg.triple_counts = Eigen::MatrixXd::Zero(n_states * n_actions, n_states);
    agg.reward_sum = Eigen::MatrixXd::Zero(n_states, n_actions);
    for (const Transition& t : ds.transitions) {
        agg.triple_counts(t.s * n_actions + t.a, t.s_next) += 1.0;
        agg.reward_sum(t.s, t.a) += t.r;
    }
    agg.n = static_cast<double>(ds.size());
    return agg;
}

// Coefficients of the exact d0 x pi_e kernel expectation over the pair grid.
Eigen::VectorXd d0_coefficients(const Eigen::VectorXd& d0, const Policy& pi_e,
                                double scale) {
    const int n_states = static_cast<int>(d0.size());
    const int n_actions = static_cast<int>(pi_e.probs.cols());
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_states * n_actions);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a)
            c[s * n_actions + a] = scale * d0[s] * pi_e.probs(s, a);
    return c;
}

RkhsLossReport combine_parts(const std::vector<std::pair<std::string, Eigen::VectorXd>>& parts,
                             const Eigen::MatrixXd& gram) {
    RkhsLossReport rep;
    Eigen::VectorXd total = Eigen::VectorXd::Zero(gram.rows());
    for (const auto& [name, c] : parts) total += c;
    rep.loss_value = total.dot(gram * total);
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i; j < parts.size(); ++j) {
            const double v = parts[i].second.dot(gram * parts[j].second);
            rep.breakdown.emplace_back(parts[i].first + "*" + parts[j].first,
                                       i == j ? v : 2.0 * v);
        }
    return rep;
}

struct QuadraticSolve {
    Eigen::VectorXd alpha;
    double cond = 0.0;
    double ridge_used = 0.0;
    bool fallback = false;
};

QuadraticSolve minimize_quadratic(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                                  double ridge) {
    QuadraticSolve out;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    out.cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    double effective = ridge;
    if (ridge == 0.0 && out.cond > kCondLimit) {
        effective = kFallbackRidge;
        out.fallback = true;
    }
    out.ridge_used = effective;
    const Eigen::MatrixXd sys =
        m + effective * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    out.alpha = Eigen::PartialPivLU<Eigen::MatrixXd>(sys).solve((-b).eval());
    if (!out.alpha.allFinite()) throw SingularMatrix("rkhs quadratic fit unsolvable");
    return out;
}

}  // namespace

RkhsLossReport mwl_rkhs_loss(const WeightTable& w, const Dataset& ds,
                             const Eigen::VectorXd& d0, const Policy& pi_e,
                             double gamma, const KernelSpec& k) {
    const int n_states = static_cast<int>(w.values.rows());
    const int n_actions = static_cast<int>(w.values.cols());
    const int n_pairs = n_states * n_actions;
    const Aggregates agg = aggregate(ds, n_states, n_actions);
    const Eigen::MatrixXd gram = kernel_gram_all_pairs(k, n_states, n_actions);

    // Witness parts: gamma-discounted next-state sections, negated current
    // sections, exact d0 x pi_e sections.
    Eigen::VectorXd c_next = Eigen::VectorXd::Zero(n_pairs);
    Eigen::VectorXd c_cur = Eigen::VectorXd::Zero(n_pairs);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            const int row = s * n_actions + a;
            const double count = agg.triple_counts.row(row).sum();
            if (count == 0.0) continue;
            const double wv = w.values(s, a);
            c_cur[row] -= wv * count / agg.n;
            for (int sn = 0; sn < n_states; ++sn) {
                const double cnt = agg.triple_counts(row, sn);
                if (cnt == 0.0) continue;
                for (int an = 0; an < n_actions; ++an)
                    c_next[sn * n_actions + an] +=
                        gamma * wv * cnt * pi_e.probs(sn, an) / agg.n;
            }
        }
    const Eigen::VectorXd c_d0 = d0_coefficients(d0, pi_e, 1.0 - gamma);

    return combine_parts({{"next", c_next}, {"cur", c_cur}, {"d0", c_d0}}, gram);
}

RkhsLossReport mql_rkhs_loss(const QTable& q, const Dataset& ds,
                             const Policy& pi_e, double gamma,
                             const KernelSpec& k) {
    const int n_states = static_cast<int>(q.values.rows());
    const int n_actions = static_cast<int>(q.values.cols());
    const int n_pairs = n_states * n_actions;
    const Aggregates agg = aggregate(ds, n_states, n_actions);
    const Eigen::MatrixXd gram = kernel_gram_all_pairs(k, n_states, n_actions);

    Eigen::VectorXd q_pi(n_states);  // q(s, pi_e)
    for (int s = 0; s < n_states; ++s)
        q_pi[s] = q.values.row(s).dot(pi_e.probs.row(s));

    // All three parts of the Bellman residual attach to the kernel section at
    // the sampled (s,a).
    Eigen::VectorXd c_r = Eigen::VectorXd::Zero(n_pairs);
    Eigen::VectorXd c_next = Eigen::VectorXd::Zero(n_pairs);
    Eigen::VectorXd c_cur = Eigen::VectorXd::Zero(n_pairs);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            const int row = s * n_actions + a;
            const double count = agg.triple_counts.row(row).sum();
            if (count == 0.0) continue;
            c_r[row] += agg.reward_sum(s, a) / agg.n;
            c_next[row] += gamma * agg.triple_counts.row(row).dot(q_pi) / agg.n;
            c_cur[row] -= count * q.values(s, a) / agg.n;
        }

    return combine_parts({{"r", c_r}, {"next", c_next}, {"cur", c_cur}}, gram);
}

LinearFitReport mwl_rkhs_fit(const Dataset& ds, const FeatureMap& fm,
                             const Eigen::VectorXd& d0, const Policy& pi_e,
                             double gamma, const KernelSpec& k, double ridge) {
    const int n_states = fm.n_states;
    const int n_actions = fm.n_actions;
    const int n_pairs = n_states * n_actions;
    const Aggregates agg = aggregate(ds, n_states, n_actions);
    const Eigen::MatrixXd gram = kernel_gram_all_pairs(k, n_states, n_actions);

    // Witness coefficients are affine in alpha: c(alpha) = U alpha + c0.
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n_pairs, fm.dim);
    Eigen::VectorXd r_phi = Eigen::VectorXd::Zero(fm.dim);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            const int row = s * n_actions + a;
            const double count = agg.triple_counts.row(row).sum();
            if (count == 0.0) continue;
            const Eigen::VectorXd phi = fm.at(s, a);
            u.row(row) -= (count / agg.n) * phi.transpose();
            for (int sn = 0; sn < n_states; ++sn) {
                const double cnt = agg.triple_counts(row, sn);
                if (cnt == 0.0) continue;
                for (int an = 0; an < n_actions; ++an)
                    u.row(sn * n_actions + an) +=
                        (gamma * cnt * pi_e.probs(sn, an) / agg.n) * phi.transpose();
            }
            r_phi += agg.reward_sum(s, a) * phi;
        }
    r_phi /= agg.n;
    const Eigen::VectorXd c0 = d0_coefficients(d0, pi_e, 1.0 - gamma);

    const Eigen::MatrixXd gu = gram * u;
    const Eigen::MatrixXd m = u.transpose() * gu;
    const Eigen::VectorXd b = gu.transpose() * c0;
    const QuadraticSolve sol = minimize_quadratic(m, b, ridge);

    LinearFitReport rep;
    rep.alpha = sol.alpha;
    rep.estimate = r_phi.dot(sol.alpha);
    rep.matrix_cond = sol.cond;
    rep.ridge_used = sol.ridge_used;
    rep.ridge_fallback = sol.fallback;
    return rep;
}

LinearFitReport mql_rkhs_fit(const Dataset& ds, const FeatureMap& fm,
                             const Eigen::VectorXd& d0, const Policy& pi_e,
                             double gamma, const KernelSpec& k, double ridge) {
    const int n_states = fm.n_states;
    const int n_actions = fm.n_actions;
    const int n_pairs = n_states * n_actions;
    const Aggregates agg = aggregate(ds, n_states, n_actions);
    const Eigen::MatrixXd gram = kernel_gram_all_pairs(k, n_states, n_actions);

    Eigen::MatrixXd phi_pi(n_states, fm.dim);  // phi(s, pi_e) rows
    for (int s = 0; s < n_states; ++s)
        phi_pi.row(s) = feature_expectation_pi(fm, pi_e, s).transpose();

    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n_pairs, fm.dim);
    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(n_pairs);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            const int row = s * n_actions + a;
            const double count = agg.triple_counts.row(row).sum();
            if (count == 0.0) continue;
            c0[row] = agg.reward_sum(s, a) / agg.n;
            u.row(row) =
                (gamma * agg.triple_counts.row(row) * phi_pi -
                 count * fm.at(s, a).transpose()) /
                agg.n;
        }

    const Eigen::MatrixXd gu = gram * u;
    const Eigen::MatrixXd m = u.transpose() * gu;
    const Eigen::VectorXd b = gu.transpose() * c0;
    const QuadraticSolve sol = minimize_quadratic(m, b, ridge);

    LinearFitReport rep;
    rep.alpha = sol.alpha;
    rep.estimate =
        (1.0 - gamma) * feature_expectation_d0(fm, pi_e, d0).dot(sol.alpha);
    rep.matrix_cond = sol.cond;
    rep.ridge_used = sol.ridge_used;
    rep.ridge_fallback = sol.fallback;
    return rep;
}

RkhsMaxReport verify_rkhs_max(const WeightTable& w, const Dataset& ds,
                              const Eigen::VectorXd& d0, const Policy& pi_e,
                              double gamma, const KernelSpec& k, int trials,
                              std::uint64_t seed) {
    const int n_states = static_cast<int>(w.values.rows());
    const int n_actions = static_cast<int>(w.values.cols());
    const int n_pairs = n_states * n_actions;
    const Eigen::MatrixXd gram = kernel_gram_all_pairs(k, n_states, n_actions);

    const RkhsLossReport closed = mwl_rkhs_loss(w, ds, d0, pi_e, gamma, k);

    // Direct empirical loss of f(.) = sum_j c_j K(x_j, .), no closed form.
    const auto empirical_loss = [&](const Eigen::VectorXd& c) {
        Eigen::VectorXd f = gram * c;  // f at every pair
        double acc = 0.0;
        for (const Transition& t : ds.transitions) {
            double f_next_pi = 0.0;
            for (int an = 0; an < n_actions; ++an)
                f_next_pi += pi_e.probs(t.s_next, an) * f[t.s_next * n_actions + an];
            acc += gamma * w.values(t.s, t.a) * f_next_pi -
                   w.values(t.s, t.a) * f[t.s * n_actions + t.a];
        }
        acc /= static_cast<double>(ds.size());
        for (int s = 0; s < n_states; ++s)
            for (int a = 0; a < n_actions; ++a)
                acc += (1.0 - gamma) * d0[s] * pi_e.probs(s, a) * f[s * n_actions + a];
        return acc;
    };

    RkhsMaxReport rep;
    rep.closed_form = closed.loss_value;

    SplitMix64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd c(n_pairs);
        for (int i = 0; i < n_pairs; ++i) c[i] = rng.next_normal();
        const double norm2 = c.dot(gram * c);
        if (norm2 <= 0.0) continue;
        c /= std::sqrt(norm2);
        const double l = empirical_loss(c);
        rep.max_probe = std::max(rep.max_probe, l * l);
    }

    // Witness direction: coefficients of f* rebuilt from the aggregation.
    {
        const Aggregates agg = aggregate(ds, n_states, n_actions);
        Eigen::VectorXd c = d0_coefficients(d0, pi_e, 1.0 - gamma);
        for (int s = 0; s < n_states; ++s)
            for (int a = 0; a < n_actions; ++a) {
                const int row = s * n_actions + a;
                const double count = agg.triple_counts.row(row).sum();
                if (count == 0.0) continue;
                c[row] -= w.values(s, a) * count / agg.n;
                for (int sn = 0; sn < n_states; ++sn) {
                    const double cnt = agg.triple_counts(row, sn);
                    if (cnt == 0.0) continue;
                    for (int an = 0; an < n_actions; ++an)
                        c[sn * n_actions + an] +=
                            gamma * w.values(s, a) * cnt * pi_e.probs(sn, an) / agg.n;
                }
            }
        const double norm2 = c.dot(gram * c);
        if (norm2 > 0.0) {
            c /= std::sqrt(norm2);
            const double l = empirical_loss(c);
            rep.witness_value = l * l;
        } else {
            rep.witness_value = 0.0;  // zero witness means zero loss
        }
    }

    rep.violated = rep.max_probe > rep.closed_form + 1e-8 ||
                   rep.witness_value > rep.closed_form + 1e-8;
    return rep;
}

}  // namespace ope
