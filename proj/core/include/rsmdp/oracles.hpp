#pragma once

#include <utility>
#include <vector>

#include "rsmdp/model.hpp"
#include "rsmdp/operators.hpp"
#include "rsmdp/transform.hpp"

namespace rsmdp {

inline constexpr double kPerronTol = 1e-12;
inline constexpr int kPerronMaxIter = 100000;
inline constexpr long long kPolicyCap = 1000000;

// Perron eigenpair of a weighted transition matrix: lambda_tilde is the
// log of the spectral radius, value the positive right eigenvector
// normalized to sum 1.
struct PolicyEvaluation {
    double lambda_tilde = 0.0;
    PositiveValueVector value;
    double residual = 0.0;   // ||M v - e^{lambda_tilde} v||_inf / ||v||_inf
    int iterations = 0;
};

struct BruteForceResult {
    double optimal_lambda_tilde = 0.0;
    std::vector<DeterministicPolicy> optimal_policies;
    // Every policy with its lambda_tilde, in mixed-radix enumeration order.
    std::vector<std::pair<DeterministicPolicy, double>> per_policy;
};

// Relative value iteration trace: the iterates g_1..g_iters and the span
// sp(g_k - g_{k-1}) at each step.
struct ValueIterationTrace {
    std::vector<std::vector<double>> values;
    std::vector<double> step_spans;
};

// Power iteration from the uniform start vector. Deterministic. Throws
// NonConvergenceError (carrying the last residual) when max_iter is
// exhausted.
PolicyEvaluation perron_eigenpair(const WeightedTransitionMatrix& m,
                                  double tol = kPerronTol,
                                  int max_iter = kPerronMaxIter);

// Perron evaluation of a fixed policy on the transformed model.
PolicyEvaluation evaluate_policy(const TransformedMdp& tmdp,
                                 const DeterministicPolicy& policy,
                                 double tol = kPerronTol,
                                 int max_iter = kPerronMaxIter);

// Policy with the given mixed-radix index (state 0 is the least
// significant digit).
DeterministicPolicy policy_from_index(long long index, int n_states, int n_actions);

// n_actions^n_states, or SizeCapError when it exceeds cap.
long long policy_count_capped(int n_states, int n_actions, long long cap = kPolicyCap);

// Evaluates every deterministic policy; optimal_policies collects all
// within 1e-10 of the minimum lambda_tilde.
BruteForceResult brute_force_optimal(const TransformedMdp& tmdp,
                                     double tol = kPerronTol,
                                     long long policy_cap = kPolicyCap);

// (1/t) log E[exp(alpha sum_{k<t} c_f(s_k)) | s_0], computed exactly by
// the t-fold linear recursion z_t = diag(e^{alpha c_f}) P_f z_{t-1} with
// scale folding. No sampling.
double finite_horizon_log_mgf(const MdpModel& model, const DeterministicPolicy& policy,
                              double alpha, int horizon, int start_state);

// Log-space relative value iteration on the transformed model:
// g_k(i) = min_a { alpha d(i,a) + log sum_j Q(j|i,a) e^{g_{k-1}(j)} }.
ValueIterationTrace relative_value_iteration(const TransformedMdp& tmdp,
                                             const std::vector<double>& init,
                                             int iters);

// max v - min v
double span(const std::vector<double>& v);

}  // namespace rsmdp
