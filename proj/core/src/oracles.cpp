#include "rsmdp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rsmdp/errors.hpp"

namespace rsmdp {

double span(const std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

PolicyEvaluation perron_eigenpair(const WeightedTransitionMatrix& m, double tol,
                                  int max_iter) {
    const int n = m.n_states;
    if (n < 1) throw std::invalid_argument("empty matrix");
    if (!(tol > 0.0) || max_iter < 1)
        throw std::invalid_argument("perron_eigenpair needs tol > 0 and max_iter >= 1");

    std::vector<double> v(n, 1.0 / n);
    std::vector<double> y(n);
    double resid = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += m.at(i, j) * v[j];
            y[i] = acc;
        }
        // v sums to 1, so sum(Mv) estimates the spectral radius.
        double rho = std::accumulate(y.begin(), y.end(), 0.0);
        double vmax = *std::max_element(v.begin(), v.end());
        resid = 0.0;
        for (int i = 0; i < n; ++i) resid = std::max(resid, std::abs(y[i] - rho * v[i]));
        resid /= vmax;
        if (resid <= tol) {
            PolicyEvaluation eval;
            eval.lambda_tilde = std::log(rho);
            eval.value.entries = std::move(v);
            double sum = std::accumulate(eval.value.entries.begin(),
                                         eval.value.entries.end(), 0.0);
            for (double& x : eval.value.entries) x /= sum;
            eval.residual = resid;
            eval.iterations = it;
            return eval;
        }
        for (int i = 0; i < n; ++i) v[i] = y[i] / rho;
    }
    throw NonConvergenceError("power iteration did not reach tolerance", resid);
}

PolicyEvaluation evaluate_policy(const TransformedMdp& tmdp,
                                 const DeterministicPolicy& policy, double tol,
                                 int max_iter) {
    return perron_eigenpair(weighted_matrix(tmdp, policy), tol, max_iter);
}

DeterministicPolicy policy_from_index(long long index, int n_states, int n_actions) {
    DeterministicPolicy f;
    f.action.resize(n_states);
    for (int s = 0; s < n_states; ++s) {
        f.action[s] = static_cast<int>(index % n_actions);
        index /= n_actions;
    }
    return f;
}

long long policy_count_capped(int n_states, int n_actions, long long cap) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("dimensions must be positive");
    long long count = 1;
    for (int s = 0; s < n_states; ++s) {
        if (count > cap / n_actions)
            throw SizeCapError("policy count exceeds cap; use the MPI solver instead");
        count *= n_actions;
    }
    if (count > cap)
        throw SizeCapError("policy count exceeds cap; use the MPI solver instead");
    return count;
}

BruteForceResult brute_force_optimal(const TransformedMdp& tmdp, double tol,
                                     long long policy_cap) {
    const long long count = policy_count_capped(tmdp.n_states, tmdp.n_actions, policy_cap);
    BruteForceResult result;
    result.per_policy.reserve(static_cast<std::size_t>(count));
    double best = std::numeric_limits<double>::infinity();
    for (long long idx = 0; idx < count; ++idx) {
        DeterministicPolicy f = policy_from_index(idx, tmdp.n_states, tmdp.n_actions);
        double lam = evaluate_policy(tmdp, f, tol).lambda_tilde;
        best = std::min(best, lam);
        result.per_policy.emplace_back(std::move(f), lam);
    }
    result.optimal_lambda_tilde = best;
    for (const auto& [f, lam] : result.per_policy)
        if (lam <= best + 1e-10) result.optimal_policies.push_back(f);
    return result;
}

double finite_horizon_log_mgf(const MdpModel& model, const DeterministicPolicy& policy,
                              double alpha, int horizon, int start_state) {
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (start_state < 0 || start_state >= model.n_states)
        throw std::invalid_argument("start state out of range");
    WeightedTransitionMatrix m = weighted_matrix(model, policy, alpha);
    PositiveValueVector z;
    z.entries.assign(model.n_states, 1.0);
    for (int t = 0; t < horizon; ++t) z = apply_weighted(m, z);
    return (std::log(z.entries[start_state]) + z.log_scale) / horizon;
}

ValueIterationTrace relative_value_iteration(const TransformedMdp& tmdp,
                                             const std::vector<double>& init,
                                             int iters) {
    const int n = tmdp.n_states;
    if (static_cast<int>(init.size()) != n)
        throw std::invalid_argument("init length does not match n_states");
    for (double x : init)
        if (!std::isfinite(x)) throw std::invalid_argument("init must be finite");
    if (iters < 0) throw std::invalid_argument("iters must be nonnegative");

    ValueIterationTrace trace;
    trace.values.reserve(iters);
    trace.step_spans.reserve(iters);
    std::vector<double> prev = init;
    std::vector<double> next(n);
    std::vector<double> delta(n);
    for (int k = 0; k < iters; ++k) {
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < tmdp.n_actions; ++a) {
                // log-sum-exp over the support of the row
                double mx = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < n; ++j)
                    if (tmdp.q(i, a, j) > 0.0) mx = std::max(mx, prev[j]);
                double acc = 0.0;
                for (int j = 0; j < n; ++j) {
                    double q = tmdp.q(i, a, j);
                    if (q > 0.0) acc += q * std::exp(prev[j] - mx);
                }
                double val = tmdp.alpha * tmdp.d(i, a) + mx + std::log(acc);
                best = std::min(best, val);
            }
            next[i] = best;
        }
        for (int i = 0; i < n; ++i) delta[i] = next[i] - prev[i];
        trace.step_spans.push_back(span(delta));
        trace.values.push_back(next);
        prev = next;
    }
    return trace;
}

}  // namespace rsmdp
