#pragma once

#include <utility>
#include <vector>

#include "rsmdp/model.hpp"
#include "rsmdp/transform.hpp"

namespace rsmdp {

// Magnitude thresholds at which entry scale is folded into log_scale.
inline constexpr double kFoldHigh = 1e100;
inline constexpr double kFoldLow = 1e-100;

// Default relative tolerance for greedy tie-breaking.
inline constexpr double kTieTol = 1e-12;

// Strictly positive vector standing for e^V. The represented vector is
// exp(log_scale) * entries; operators fold magnitude into log_scale when
// entries leave [1e-100, 1e100] so long unnormalized evaluation sweeps
// stay in the well-conditioned range of doubles.
struct PositiveValueVector {
    std::vector<double> entries;
    double log_scale = 0.0;

    int size() const { return static_cast<int>(entries.size()); }

    static PositiveValueVector uniform(int n);
};

// Matrix with entries e^{alpha d_f(i)} Q_f(j|i). Rows are not stochastic;
// each row sums to e^{alpha d_f(i)}. Diagonal entries inherit the
// transformed model's self-loop floor.
struct WeightedTransitionMatrix {
    int n_states = 0;
    std::vector<double> entries;  // row-major

    double at(int i, int j) const {
        return entries[static_cast<std::size_t>(i) * n_states + j];
    }
    double& at(int i, int j) {
        return entries[static_cast<std::size_t>(i) * n_states + j];
    }
};

// Per-state ratio (T v)(i) / v(i) together with its extremes. The ratio
// is scale-free, so these bracket the optimal cost regardless of the
// magnitude of v.
struct BoundsTriple {
    std::vector<double> ratio;
    double upper = 0.0;  // max ratio
    double lower = 0.0;  // min ratio
};

WeightedTransitionMatrix weighted_matrix(const TransformedMdp& tmdp,
                                         const DeterministicPolicy& policy);

// Untransformed variant, entries e^{alpha c_f(i)} P_f(j|i). Rejects
// alpha * max|c| > 700.
WeightedTransitionMatrix weighted_matrix(const MdpModel& model,
                                         const DeterministicPolicy& policy,
                                         double alpha);

// One matrix-vector product with scale folding.
PositiveValueVector apply_weighted(const WeightedTransitionMatrix& m,
                                   const PositiveValueVector& v);

// (T_f v)(i) = e^{alpha d_f(i)} sum_j Q_f(j|i) v(j).
PositiveValueVector apply_policy_operator(const TransformedMdp& tmdp,
                                          const DeterministicPolicy& policy,
                                          const PositiveValueVector& v);

// (T v)(i) = min_a e^{alpha d(i,a)} sum_j Q(j|i,a) v(j), plus the
// achieving policy. Ties within tie_tol relative of the minimum break to
// the lowest action index.
std::pair<PositiveValueVector, DeterministicPolicy> apply_optimal_operator(
    const TransformedMdp& tmdp, const PositiveValueVector& v, double tie_tol = kTieTol);

// Ratio (T v)(i) / v(i) for a normalized v (entries summing to 1,
// log_scale zero).
BoundsTriple bounds_triple(const TransformedMdp& tmdp,
                           const PositiveValueVector& v_normalized);

// Rescales so entries sum to 1 and log_scale is 0; the direction of the
// represented vector is preserved.
PositiveValueVector normalize(const PositiveValueVector& v);

}  // namespace rsmdp
