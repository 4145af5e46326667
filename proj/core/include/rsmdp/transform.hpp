#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rsmdp/model.hpp"

namespace rsmdp {

// MDP after the aperiodicity rewrite at fixed (alpha, kappa):
//   d(s,a)   = (1/alpha) log((1-kappa) e^{alpha c(s,a)} + kappa)
//   Q(j|s,a) = ((1-kappa) e^{alpha c(s,a)} P(j|s,a) + kappa 1(s=j))
//              / ((1-kappa) e^{alpha c(s,a)} + kappa)
// Every self-loop Q(s|s,a) is bounded below by
// kappa / ((1-kappa) e^{alpha cost_hi} + kappa), so all policy chains of
// the transformed model are aperiodic.
struct TransformedMdp {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transition;  // Q[s][a][s'], rows stochastic
    std::vector<double> cost;        // d[s][a]
    double alpha = 1.0;
    double kappa = 0.5;
    double cost_lo = 0.0;            // source-model cost bounds
    double cost_hi = 0.0;
    std::string source_digest;       // identifies the originating model

    double q(int s, int a, int s2) const {
        return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double d(int s, int a) const { return cost[static_cast<std::size_t>(s) * n_actions + a]; }

    double self_loop_floor() const;
    double min_transformed_cost() const;  // min over (s,a) of d
    double max_transformed_cost() const;  // max over (s,a) of d
};

// Certificate that every long-enough product of transformed policy
// kernels is entrywise positive.
struct PositivityCertificate {
    // Analytic bound (n-1) m^n + 1, saturated at the largest long long.
    long long r_bound = 0;
    // Smallest horizon proven positive by the adversarial support product,
    // absent when the search cap was exhausted.
    std::optional<int> r_empirical;
    // Minimum entry of the r_empirical-fold product of the entrywise
    // action-minimum kernel; present exactly when r_empirical is.
    std::optional<double> witness_min_entry;
};

// Builds the transformed model. Rejects alpha*cost_hi > 700 (e^{alpha c}
// would overflow; rescale costs instead).
TransformedMdp transform(const MdpModel& model, const RiskParams& params);

// Optimal-cost correspondence, forward direction:
// lambda_tilde = log((1-kappa) e^{lambda} + kappa). Result is >= log(kappa).
double forward_cost(double lambda_star, double kappa);

// Inverse map lambda = log((e^{lambda_tilde} - kappa) / (1-kappa)).
// Requires e^{lambda_tilde} >= kappa + 1e-15; throws std::domain_error
// otherwise (such a lambda_tilde signals a diverged solve).
double invert_cost(double lambda_tilde, double kappa);

// Searches for the smallest r <= search_cap such that the r-fold Boolean
// product of the adversarial support kernel (edges kept only when present
// under every action) is all-positive. This lower-bounds positivity for
// every policy sequence.
PositivityCertificate positivity_horizon(const TransformedMdp& tmdp, int search_cap);

}  // namespace rsmdp
