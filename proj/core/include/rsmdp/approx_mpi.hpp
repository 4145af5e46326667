#pragma once

#include <cstdint>
#include <vector>

#include "rsmdp/mpi.hpp"
#include "rsmdp/rng.hpp"

namespace rsmdp {

// Error budget for the approximate run. Both ratio conditions are
// enforced componentwise, which is stricter than a norm condition and is
// what the performance bound actually uses:
//   improvement: (T_f v)(i) / (T v)(i) in [1, epsilon] for every state
//   evaluation:  v'(i) / v(i)          in [delta1, delta2] for every state
struct ApproxConfig {
    double epsilon = 1.0;   // >= 1
    double delta1 = 1.0;    // in (0, 1]
    double delta2 = 1.0;    // >= 1 and >= delta1
    std::uint64_t rng_seed = 0;
    // Window length used by the performance bound; choose it so the
    // evaluation depths across the window sum to at least R.
    int n_window = 1;
};

void validate(const ApproxConfig& approx);

struct ApproxBoundReport {
    struct Entry {
        int index = 0;   // checked iteration k (a multiple of n_window)
        double lhs = 0.0;  // e^{policy cost at k} - e^{optimal}
        double rhs = 0.0;
        bool ok = false;
    };

    double gamma = 0.0;        // min over windows of the window measure minimum
    double gamma_prime = 0.0;  // (delta2 eps / delta1)^n (1 - gamma)
    double sigma = 0.0;        // (delta2 eps / delta1)^n (1 + (eps-1) gamma) - 1
    // The geometric bound needs gamma_prime < 1; when that fails the run
    // still satisfies the sandwich, but no rate is claimed.
    bool bound_applicable = false;
    std::vector<Entry> per_iteration_bound;

    bool all_ok() const;
};

struct BoundednessFloor {
    double observed_min = 0.0;       // min over iterations and states of the iterate entries
    double constructive_floor = 0.0; // tau / delta2 from the window kernel product
};

// Approximate modified policy iteration: seeded slack in the improvement
// step (random admissible action swaps) and in the evaluation step
// (componentwise division by draws from [delta1, delta2]). With
// epsilon = delta1 = delta2 = 1 the run reproduces run_mpi exactly.
// Deterministic given rng_seed.
MpiTrace run_approx_mpi(const TransformedMdp& tmdp, const MpiConfig& config,
                        const ApproxConfig& approx, const PositiveValueVector& init);

// Starts from the exact greedy policy; per state, with probability 1/2,
// attempts to swap to a uniformly drawn alternative action and accepts
// only while the state's ratio stays below epsilon. The greedy fallback
// always satisfies ratio 1.
DeterministicPolicy approx_improvement(const TransformedMdp& tmdp,
                                       const PositiveValueVector& v, double epsilon,
                                       Rng& rng, double tie_tol = kTieTol);

// Divides each entry of the normalized iterate by an independent uniform
// draw from [delta1, delta2].
PositiveValueVector approx_evaluation_perturb(const PositiveValueVector& v_normalized,
                                              double delta1, double delta2, Rng& rng);

// Verifies lower_k <= e^{optimal} <= e^{policy cost} <= upper_k * epsilon
// at every iteration, within slack.
SandwichReport check_approx_sandwich(const MpiTrace& trace, const TransformedMdp& tmdp,
                                     const BruteForceResult& brute, double epsilon,
                                     double slack = 1e-10);

// Performance bound of the approximate run, checked at every iteration
// index that is a multiple of n_window:
//   e^{policy cost} - e^{optimal}
//     <= gamma_prime^{k/n} (u_0 eps - e^{optimal}) + sigma e^{optimal} / (1 - gamma_prime)
// gamma is computed constructively from the trace's kernel products.
// Requires a diagnostics-enabled trace.
ApproxBoundReport theorem_bound(const MpiTrace& trace, const TransformedMdp& tmdp,
                                const BruteForceResult& brute, const ApproxConfig& approx,
                                const PositivityCertificate& cert, double slack = 1e-9);

// Observed minimum iterate entry together with its constructive floor
// tau / delta2, tau = e^{alpha (d_min - d_max) sum m} lambda_H / n, with
// lambda_H the minimum entry of the plain kernel product over the first
// prefix of depth-sum >= R.
BoundednessFloor boundedness_floor(const MpiTrace& trace, const TransformedMdp& tmdp,
                                   const ApproxConfig& approx,
                                   const PositivityCertificate& cert);

}  // namespace rsmdp
