#pragma once

// Internal helpers for window diagnostics: square matrices with a
// factored-out log magnitude. Products of weighted kernels overflow
// doubles long before the diagnostics are done with them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rsmdp/model.hpp"
#include "rsmdp/operators.hpp"
#include "rsmdp/transform.hpp"

namespace rsmdp::detail {

struct ScaledMatrix {
    int n = 0;
    std::vector<double> a;  // row-major
    double log_scale = 0.0;

    static ScaledMatrix identity(int n) {
        ScaledMatrix m;
        m.n = n;
        m.a.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) m.a[static_cast<std::size_t>(i) * n + i] = 1.0;
        return m;
    }

    void fold() {
        double top = *std::max_element(a.begin(), a.end());
        if (top > kFoldHigh || top < kFoldLow) {
            log_scale += std::log(top);
            for (double& x : a) x /= top;
        }
    }

    double min_entry_represented() const {
        return *std::min_element(a.begin(), a.end()) * std::exp(log_scale);
    }
};

inline ScaledMatrix multiply(const ScaledMatrix& lhs, const ScaledMatrix& rhs) {
    ScaledMatrix out;
    out.n = lhs.n;
    out.log_scale = lhs.log_scale + rhs.log_scale;
    out.a.assign(static_cast<std::size_t>(lhs.n) * lhs.n, 0.0);
    for (int i = 0; i < lhs.n; ++i)
        for (int k = 0; k < lhs.n; ++k) {
            double w = lhs.a[static_cast<std::size_t>(i) * lhs.n + k];
            if (w == 0.0) continue;
            for (int j = 0; j < lhs.n; ++j)
                out.a[static_cast<std::size_t>(i) * lhs.n + j] +=
                    w * rhs.a[static_cast<std::size_t>(k) * lhs.n + j];
        }
    out.fold();
    return out;
}

inline ScaledMatrix power(const ScaledMatrix& base, int exponent) {
    ScaledMatrix out = ScaledMatrix::identity(base.n);
    for (int i = 0; i < exponent; ++i) out = multiply(out, base);
    return out;
}

inline ScaledMatrix from_weighted(const WeightedTransitionMatrix& m) {
    ScaledMatrix out;
    out.n = m.n_states;
    out.a = m.entries;
    out.fold();
    return out;
}

// Plain (unweighted) policy kernel Q_f.
inline ScaledMatrix policy_kernel(const TransformedMdp& tmdp,
                                  const DeterministicPolicy& f) {
    ScaledMatrix out;
    out.n = tmdp.n_states;
    out.a.resize(static_cast<std::size_t>(out.n) * out.n);
    for (int i = 0; i < out.n; ++i)
        for (int j = 0; j < out.n; ++j)
            out.a[static_cast<std::size_t>(i) * out.n + j] = tmdp.q(i, f.action[i], j);
    return out;
}

// min_{i,j} of q(j|i) = H(j|i) v(j) / sum_l H(l|i) v(l); invariant to the
// scale of H and of v.
inline double min_window_measure(const ScaledMatrix& h, const std::vector<double>& v) {
    double gamma = std::numeric_limits<double>::infinity();
    for (int i = 0; i < h.n; ++i) {
        double denom = 0.0;
        for (int l = 0; l < h.n; ++l)
            denom += h.a[static_cast<std::size_t>(i) * h.n + l] * v[l];
        for (int j = 0; j < h.n; ++j)
            gamma = std::min(gamma, h.a[static_cast<std::size_t>(i) * h.n + j] * v[j] / denom);
    }
    return gamma;
}

}  // namespace rsmdp::detail
