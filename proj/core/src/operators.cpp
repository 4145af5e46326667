#include "rsmdp/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rsmdp {

namespace {

void require_positive(const PositiveValueVector& v) {
    if (v.entries.empty()) throw std::invalid_argument("empty value vector");
    for (double x : v.entries)
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument("value vector entries must be positive finite");
}

void fold_scale(PositiveValueVector& v) {
    double top = *std::max_element(v.entries.begin(), v.entries.end());
    if (top > kFoldHigh || top < kFoldLow) {
        v.log_scale += std::log(top);
        for (double& x : v.entries) x /= top;
    }
}

}  // namespace

PositiveValueVector PositiveValueVector::uniform(int n) {
    if (n < 1) throw std::invalid_argument("vector length must be positive");
    PositiveValueVector v;
    v.entries.assign(n, 1.0 / n);
    return v;
}

WeightedTransitionMatrix weighted_matrix(const TransformedMdp& tmdp,
                                         const DeterministicPolicy& policy) {
    const int n = tmdp.n_states;
    if (static_cast<int>(policy.action.size()) != n)
        throw std::invalid_argument("policy length does not match n_states");
    WeightedTransitionMatrix m;
    m.n_states = n;
    m.entries.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        int a = policy.action[i];
        if (a < 0 || a >= tmdp.n_actions)
            throw std::invalid_argument("policy action index out of range");
        double w = std::exp(tmdp.alpha * tmdp.d(i, a));
        for (int j = 0; j < n; ++j) m.at(i, j) = w * tmdp.q(i, a, j);
    }
    return m;
}

WeightedTransitionMatrix weighted_matrix(const MdpModel& model,
                                         const DeterministicPolicy& policy,
                                         double alpha) {
    require_valid_policy(model, policy);
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    for (double c : model.cost)
        if (alpha * std::abs(c) > 700.0)
            throw std::invalid_argument("alpha * |cost| exceeds 700; rescale costs");
    const int n = model.n_states;
    WeightedTransitionMatrix m;
    m.n_states = n;
    m.entries.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        int a = policy.action[i];
        double w = std::exp(alpha * model.c(i, a));
        for (int j = 0; j < n; ++j) m.at(i, j) = w * model.p(i, a, j);
    }
    return m;
}

PositiveValueVector apply_weighted(const WeightedTransitionMatrix& m,
                                   const PositiveValueVector& v) {
    require_positive(v);
    const int n = m.n_states;
    if (v.size() != n) throw std::invalid_argument("dimension mismatch");
    PositiveValueVector out;
    out.log_scale = v.log_scale;
    out.entries.resize(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += m.at(i, j) * v.entries[j];
        out.entries[i] = acc;
    }
    fold_scale(out);
    return out;
}

PositiveValueVector apply_policy_operator(const TransformedMdp& tmdp,
                                          const DeterministicPolicy& policy,
                                          const PositiveValueVector& v) {
    require_positive(v);
    const int n = tmdp.n_states;
    if (v.size() != n) throw std::invalid_argument("dimension mismatch");
    PositiveValueVector out;
    out.log_scale = v.log_scale;
    out.entries.resize(n);
    for (int i = 0; i < n; ++i) {
        int a = policy.action[i];
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += tmdp.q(i, a, j) * v.entries[j];
        out.entries[i] = std::exp(tmdp.alpha * tmdp.d(i, a)) * acc;
    }
    fold_scale(out);
    return out;
}

std::pair<PositiveValueVector, DeterministicPolicy> apply_optimal_operator(
    const TransformedMdp& tmdp, const PositiveValueVector& v, double tie_tol) {
    require_positive(v);
    const int n = tmdp.n_states;
    const int na = tmdp.n_actions;
    if (v.size() != n) throw std::invalid_argument("dimension mismatch");

    PositiveValueVector out;
    out.log_scale = v.log_scale;
    out.entries.resize(n);
    DeterministicPolicy policy;
    policy.action.resize(n);
    std::vector<double> vals(na);
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < na; ++a) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += tmdp.q(i, a, j) * v.entries[j];
            vals[a] = std::exp(tmdp.alpha * tmdp.d(i, a)) * acc;
        }
        double best = *std::min_element(vals.begin(), vals.end());
        int chosen = 0;
        for (int a = 0; a < na; ++a)
            if (vals[a] <= best * (1.0 + tie_tol)) {
                chosen = a;
                break;
            }
        out.entries[i] = best;
        policy.action[i] = chosen;
    }
    fold_scale(out);
    return {std::move(out), std::move(policy)};
}

BoundsTriple bounds_triple(const TransformedMdp& tmdp,
                           const PositiveValueVector& v_normalized) {
    require_positive(v_normalized);
    double sum = std::accumulate(v_normalized.entries.begin(),
                                 v_normalized.entries.end(), 0.0);
    if (v_normalized.log_scale != 0.0 || std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("bounds_triple requires a normalized vector");

    auto [tv, policy] = apply_optimal_operator(tmdp, v_normalized);
    (void)policy;
    const double scale = std::exp(tv.log_scale);
    BoundsTriple b;
    b.ratio.resize(v_normalized.size());
    for (int i = 0; i < v_normalized.size(); ++i)
        b.ratio[i] = scale * tv.entries[i] / v_normalized.entries[i];
    b.upper = *std::max_element(b.ratio.begin(), b.ratio.end());
    b.lower = *std::min_element(b.ratio.begin(), b.ratio.end());
    return b;
}

PositiveValueVector normalize(const PositiveValueVector& v) {
    require_positive(v);
    double sum = std::accumulate(v.entries.begin(), v.entries.end(), 0.0);
    PositiveValueVector out;
    out.entries.resize(v.entries.size());
    for (std::size_t i = 0; i < v.entries.size(); ++i) out.entries[i] = v.entries[i] / sum;
    out.log_scale = 0.0;
    return out;
}

}  // namespace rsmdp
