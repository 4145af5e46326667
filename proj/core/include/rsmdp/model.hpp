#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rsmdp {

// Row-sum tolerance accepted on input models. Internal constructions
// re-normalize rows, so text formats may carry rounding up to this much.
inline constexpr double kRowSumTol = 1e-12;

// Finite MDP: dense transition tensor P[s][a][s'] and cost matrix c[s][a].
// Rows of P are probability distributions; costs lie in [cost_lo, cost_hi].
struct MdpModel {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transition;   // [s][a][s'], row-major
    std::vector<double> cost;         // [s][a]
    double cost_lo = 0.0;
    double cost_hi = 0.0;
    std::vector<std::string> labels;  // optional state names

    double p(int s, int a, int s2) const {
        return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double& p(int s, int a, int s2) {
        return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double c(int s, int a) const { return cost[static_cast<std::size_t>(s) * n_actions + a]; }
    double& c(int s, int a) { return cost[static_cast<std::size_t>(s) * n_actions + a]; }

    static MdpModel zeros(int n_states, int n_actions);
};

struct RiskParams {
    double alpha = 1.0;  // risk factor, > 0
    double kappa = 0.5;  // transformation constant, in (0, 1)
};

struct DeterministicPolicy {
    std::vector<int> action;  // action[s], each in [0, n_actions)

    bool operator==(const DeterministicPolicy&) const = default;
};

struct StationaryDistribution {
    std::vector<double> pi;
};

struct ValidationIssue {
    enum class Kind {
        RowSumDrift,
        NegativeProbability,
        NonFiniteProbability,
        CostOutOfBounds,
        NonFiniteCost,
    };
    Kind kind;
    int state = -1;
    int action = -1;
    int next_state = -1;  // -1 when not applicable
    double value = 0.0;   // offending row sum, probability, or cost
    std::string message;
};

// Validation never throws; every violated invariant is reported with
// its indices. An empty report means the model is valid.
struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool valid() const { return issues.empty(); }
};

ValidationReport validate_model(const MdpModel& model);

// Throws std::invalid_argument quoting the first few issues if the model
// does not validate.
void require_valid(const MdpModel& model);

// Throws std::invalid_argument if the policy length or any action index
// does not fit the model.
void require_valid_policy(const MdpModel& model, const DeterministicPolicy& policy);

// Mixes every transition row with the uniform distribution:
// P'(j|s,a) = (1-eps) P(j|s,a) + eps/n. Every entry of the result is
// >= eps/n, so all policy chains become irreducible and aperiodic.
// Rows are re-normalized to sum to 1 exactly; costs are unchanged.
MdpModel apply_mixing(const MdpModel& model, double epsilon_mix);

// Seeded random model: transition rows drawn uniformly on the simplex
// (symmetric Dirichlet with concentration 1), then mixed with
// apply_mixing(1e-3); costs uniform in [cost_lo, cost_hi]. Pure function
// of its arguments.
MdpModel generate_random(std::uint64_t seed, int n_states, int n_actions,
                         double cost_lo, double cost_hi);

// True iff the chain P_f is irreducible (support graph strongly
// connected) and aperiodic (gcd of closed-walk lengths is 1).
bool check_policy_irreducible_aperiodic(const MdpModel& model,
                                        const DeterministicPolicy& policy);

// Stationary distribution of P_f, with residual ||pi^T P_f - pi^T||_inf
// below 1e-12. Requires the irreducible/aperiodic check to pass.
StationaryDistribution stationary_distribution(const MdpModel& model,
                                               const DeterministicPolicy& policy);

// Long-run average cost sum_s pi(s) c(s, f(s)).
double risk_neutral_average_cost(const MdpModel& model,
                                 const DeterministicPolicy& policy);

}  // namespace rsmdp
