#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rsmdp/model.hpp"
#include "rsmdp/operators.hpp"
#include "rsmdp/oracles.hpp"
#include "rsmdp/transform.hpp"

namespace rsmdp {

struct MpiConfig {
    // Partial-evaluation depth per outer iteration; every value must lie
    // in [1, m_cap].
    std::function<int(int)> m_schedule = [](int) { return 5; };
    int m_cap = 5;
    // Stop once upper - lower <= tol.
    double tol = 1e-10;
    int max_outer = 10000;
    double tie_tol = kTieTol;
    // When set, each record carries the Perron cost of its improvement
    // policy. Disabled by default; it dominates runtime.
    bool diagnostics = false;
};

struct MpiIterationRecord {
    int index = 0;
    DeterministicPolicy policy;        // improvement policy chosen at this value
    std::vector<double> ratio;         // (T v)(i) / v(i)
    double upper = 0.0;
    double lower = 0.0;
    PositiveValueVector value;         // the iterate the ratios were taken at
    std::optional<double> policy_lambda_tilde;  // diagnostics only
    // Evaluation depth applied after this record (0 on the final record).
    int m_used = 0;
    // Approximate runs only: realized slack of the improvement and
    // evaluation steps.
    std::optional<double> improvement_ratio_max;
    std::optional<double> eval_ratio_min;
    std::optional<double> eval_ratio_max;
};

struct MpiTrace {
    std::vector<MpiIterationRecord> records;
    bool converged = false;
    DeterministicPolicy final_policy;
    // Log of the bracket midpoint (upper + lower) / 2 at stop.
    double final_lambda_tilde = 0.0;
    // Minimum value entry seen across all iterations.
    double beta_observed = 0.0;
};

struct SandwichReport {
    struct Violation {
        int iteration;
        std::string inequality;
        double lhs;
        double rhs;
    };
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Window certificate for the contraction argument: across a window of k
// iterations whose evaluation depths sum to at least R, the kernel
// product H is entrywise positive and the induced measure
// q(j|i) = H(j|i) v(j) / sum_l H(l|i) v(l) has minimum gamma > 0. The
// gap upper - e^{optimal} then shrinks by at least (1 - gamma) per
// window.
struct ContractionDiagnostic {
    struct WindowCheck {
        int end_index = 0;     // n
        int length = 0;        // k
        double gamma = 0.0;
        double lhs = 0.0;      // u_n - e^{optimal}
        double rhs = 0.0;      // (1 - gamma) (u_{n-k} - e^{optimal})
        bool ok = false;
    };

    int k_window = 0;        // length of the first complete window
    double gamma = 0.0;      // min over windows of the per-window gamma
    double rate_bound = 0.0; // 1 - gamma
    double h_min_entry = 0.0;
    std::vector<WindowCheck> windows;

    bool all_ok() const;
};

struct SolveResult {
    DeterministicPolicy policy;
    double lambda_tilde_star_estimate = 0.0;  // transformed problem, log scale
    double lambda_star_estimate = 0.0;        // original problem, log scale
    MpiTrace trace;
};

// Modified policy iteration on the transformed model: greedy improvement,
// m_k applications of the chosen policy operator, then sum-to-one
// normalization. Ratios and bounds are recorded at each iterate before
// its update. init must be entrywise positive with entries summing to 1.
MpiTrace run_mpi(const TransformedMdp& tmdp, const MpiConfig& config,
                 const PositiveValueVector& init);

// The policy component of apply_optimal_operator.
DeterministicPolicy greedy_improvement(const TransformedMdp& tmdp,
                                       const PositiveValueVector& v_normalized,
                                       double tie_tol = kTieTol);

// m_k successive applications of the policy operator.
PositiveValueVector partial_evaluation(const TransformedMdp& tmdp,
                                       const DeterministicPolicy& policy,
                                       const PositiveValueVector& v, int m_k);

// Verifies lower_n <= e^{optimal} <= e^{policy cost} <= upper_n (and
// lower_n <= upper_n) at every iteration, within slack. Policy costs come
// from the records when diagnostics were on, otherwise they are computed
// here.
SandwichReport check_sandwich(const MpiTrace& trace, const TransformedMdp& tmdp,
                              const BruteForceResult& brute, double slack = 1e-10);

// Reconstructs the kernel products along the trace and checks the
// per-window contraction of upper - e^{optimal}. Throws
// TraceTooShortError when no window of depth-sum >= R fits.
ContractionDiagnostic contraction_diagnostic(const MpiTrace& trace,
                                             const TransformedMdp& tmdp,
                                             const PositivityCertificate& cert,
                                             const BruteForceResult& brute);

// Constructive lower bound on the normalized value entries, computed from
// the first run prefix whose evaluation depths sum to at least R:
// e^{k alpha d_min} eps_H / (n e^{k C alpha d_max}) with eps_H the
// minimum entry of the plain kernel product over that prefix. Throws
// TraceTooShortError when no such prefix exists.
double lemma_floor(const MpiTrace& trace, const TransformedMdp& tmdp,
                   const PositivityCertificate& cert, int m_cap);

// End-to-end solve of the original model: transform, run MPI, map the
// bracket midpoint back through invert_cost.
SolveResult solve(const MdpModel& model, const RiskParams& params,
                  const MpiConfig& config);

}  // namespace rsmdp
