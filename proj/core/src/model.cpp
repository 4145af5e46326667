#include "rsmdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "rsmdp/errors.hpp"
#include "rsmdp/rng.hpp"

namespace rsmdp {

namespace {

// Divides a row by its sum, then nudges the largest entry so the row sums
// to exactly 1 under left-to-right accumulation.
void renormalize_row(double* row, int n) {
    double sum = std::accumulate(row, row + n, 0.0);
    for (int j = 0; j < n; ++j) row[j] /= sum;
    double check = std::accumulate(row, row + n, 0.0);
    double* biggest = std::max_element(row, row + n);
    *biggest += 1.0 - check;
}

long long gcd_ll(long long a, long long b) {
    while (b != 0) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

MdpModel MdpModel::zeros(int n_states, int n_actions) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("model dimensions must be positive");
    MdpModel m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.transition.assign(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
    m.cost.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
    return m;
}

ValidationReport validate_model(const MdpModel& model) {
    ValidationReport report;
    const int n = model.n_states;
    const int na = model.n_actions;
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < na; ++a) {
            double sum = 0.0;
            bool row_finite = true;
            for (int j = 0; j < n; ++j) {
                double p = model.p(s, a, j);
                if (!std::isfinite(p)) {
                    std::ostringstream msg;
                    msg << "non-finite probability at (s=" << s << ", a=" << a
                        << ", s'=" << j << ")";
                    report.issues.push_back({ValidationIssue::Kind::NonFiniteProbability,
                                             s, a, j, p, msg.str()});
                    row_finite = false;
                    continue;
                }
                if (p < 0.0) {
                    std::ostringstream msg;
                    msg << "negative probability " << p << " at (s=" << s << ", a=" << a
                        << ", s'=" << j << ")";
                    report.issues.push_back({ValidationIssue::Kind::NegativeProbability,
                                             s, a, j, p, msg.str()});
                }
                sum += p;
            }
            if (row_finite && std::abs(sum - 1.0) > kRowSumTol) {
                std::ostringstream msg;
                msg << "row sum " << sum << " at (s=" << s << ", a=" << a
                    << "), deficit " << (1.0 - sum);
                report.issues.push_back({ValidationIssue::Kind::RowSumDrift,
                                         s, a, -1, sum, msg.str()});
            }
            double c = model.c(s, a);
            if (!std::isfinite(c)) {
                std::ostringstream msg;
                msg << "non-finite cost at (s=" << s << ", a=" << a << ")";
                report.issues.push_back({ValidationIssue::Kind::NonFiniteCost,
                                         s, a, -1, c, msg.str()});
            } else if (c < model.cost_lo || c > model.cost_hi) {
                std::ostringstream msg;
                msg << "cost " << c << " outside [" << model.cost_lo << ", "
                    << model.cost_hi << "] at (s=" << s << ", a=" << a << ")";
                report.issues.push_back({ValidationIssue::Kind::CostOutOfBounds,
                                         s, a, -1, c, msg.str()});
            }
        }
    }
    return report;
}

void require_valid(const MdpModel& model) {
    ValidationReport report = validate_model(model);
    if (report.valid()) return;
    std::ostringstream msg;
    msg << "invalid model: " << report.issues.front().message;
    if (report.issues.size() > 1)
        msg << " (and " << report.issues.size() - 1 << " more issues)";
    throw std::invalid_argument(msg.str());
}

void require_valid_policy(const MdpModel& model, const DeterministicPolicy& policy) {
    if (static_cast<int>(policy.action.size()) != model.n_states)
        throw std::invalid_argument("policy length does not match n_states");
    for (int a : policy.action)
        if (a < 0 || a >= model.n_actions)
            throw std::invalid_argument("policy action index out of range");
}

MdpModel apply_mixing(const MdpModel& model, double epsilon_mix) {
    if (!(epsilon_mix > 0.0 && epsilon_mix < 1.0))
        throw std::invalid_argument("epsilon_mix must lie in (0, 1)");
    const int n = model.n_states;
    MdpModel out = model;
    const double floor = epsilon_mix / n;
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < model.n_actions; ++a) {
            double* row = &out.p(s, a, 0);
            for (int j = 0; j < n; ++j)
                row[j] = (1.0 - epsilon_mix) * model.p(s, a, j) + floor;
            // Rows already sum to 1 up to rounding; absorb the residue into
            // the largest entry so the floor on the others is untouched.
            double sum = std::accumulate(row, row + n, 0.0);
            *std::max_element(row, row + n) += 1.0 - sum;
        }
    }
    return out;
}

MdpModel generate_random(std::uint64_t seed, int n_states, int n_actions,
                         double cost_lo, double cost_hi) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("n_states and n_actions must be positive");
    if (!(cost_lo < cost_hi))
        throw std::invalid_argument("cost range must satisfy lo < hi");
    Rng rng(seed);
    MdpModel m = MdpModel::zeros(n_states, n_actions);
    m.cost_lo = cost_lo;
    m.cost_hi = cost_hi;
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            double* row = &m.p(s, a, 0);
            for (int j = 0; j < n_states; ++j) row[j] = rng.exponential();
            renormalize_row(row, n_states);
        }
    }
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a)
            m.c(s, a) = rng.uniform(cost_lo, cost_hi);
    return apply_mixing(m, 1e-3);
}

bool check_policy_irreducible_aperiodic(const MdpModel& model,
                                        const DeterministicPolicy& policy) {
    require_valid_policy(model, policy);
    const int n = model.n_states;
    std::vector<std::vector<int>> adj(n), radj(n);
    for (int s = 0; s < n; ++s)
        for (int j = 0; j < n; ++j)
            if (model.p(s, policy.action[s], j) > 0.0) {
                adj[s].push_back(j);
                radj[j].push_back(s);
            }

    auto reaches_all = [n](const std::vector<std::vector<int>>& graph) {
        std::vector<char> seen(n, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int count = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : graph[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    q.push(v);
                }
        }
        return count == n;
    };
    if (!reaches_all(adj) || !reaches_all(radj)) return false;

    // Period of the (single) communicating class: gcd of level[u]+1-level[v]
    // over all support edges, with levels from a BFS tree. This equals the
    // gcd of all closed-walk lengths through state 0.
    std::vector<long long> level(n, -1);
    std::queue<int> q;
    q.push(0);
    level[0] = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adj[u])
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                q.push(v);
            }
    }
    long long g = 0;
    for (int u = 0; u < n; ++u)
        for (int v : adj[u]) g = gcd_ll(g, std::llabs(level[u] + 1 - level[v]));
    return g == 1;
}

StationaryDistribution stationary_distribution(const MdpModel& model,
                                               const DeterministicPolicy& policy) {
    if (!check_policy_irreducible_aperiodic(model, policy))
        throw std::invalid_argument(
            "stationary_distribution requires an irreducible aperiodic chain");
    const int n = model.n_states;

    // Solve pi^T P_f = pi^T with sum(pi) = 1: rows of (P_f^T - I), the last
    // replaced by the normalization equation.
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> b(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j < n; ++j)
            a[static_cast<std::size_t>(i) * n + j] =
                model.p(j, policy.action[j], i) - (i == j ? 1.0 : 0.0);
    }
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(n - 1) * n + j] = 1.0;
    b[n - 1] = 1.0;

    // Gaussian elimination with partial pivoting.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double cand = std::abs(a[static_cast<std::size_t>(r) * n + col]);
            if (cand > best) {
                best = cand;
                pivot = r;
            }
        }
        if (pivot != col) {
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<std::size_t>(col) * n + j],
                          a[static_cast<std::size_t>(pivot) * n + j]);
            std::swap(b[col], b[pivot]);
        }
        double diag = a[static_cast<std::size_t>(col) * n + col];
        if (diag == 0.0) throw std::runtime_error("singular stationary system");
        for (int r = col + 1; r < n; ++r) {
            double f = a[static_cast<std::size_t>(r) * n + col] / diag;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j)
                a[static_cast<std::size_t>(r) * n + j] -=
                    f * a[static_cast<std::size_t>(col) * n + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> pi(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int j = r + 1; j < n; ++j)
            acc -= a[static_cast<std::size_t>(r) * n + j] * pi[j];
        pi[r] = acc / a[static_cast<std::size_t>(r) * n + r];
    }

    auto residual = [&](const std::vector<double>& x) {
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += x[i] * model.p(i, policy.action[i], j);
            worst = std::max(worst, std::abs(acc - x[j]));
        }
        return worst;
    };

    // Polish with transpose power steps if elimination left residue.
    double res = residual(pi);
    int polish = 0;
    while (res > 1e-13 && polish < 100000) {
        std::vector<double> next(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) next[j] += pi[i] * model.p(i, policy.action[i], j);
        double sum = std::accumulate(next.begin(), next.end(), 0.0);
        for (double& x : next) x /= sum;
        pi = std::move(next);
        res = residual(pi);
        ++polish;
    }
    if (res > kRowSumTol)
        throw NonConvergenceError("stationary distribution residual did not converge", res);

    double sum = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& x : pi) x /= sum;
    return StationaryDistribution{std::move(pi)};
}

double risk_neutral_average_cost(const MdpModel& model,
                                 const DeterministicPolicy& policy) {
    StationaryDistribution dist = stationary_distribution(model, policy);
    double total = 0.0;
    for (int s = 0; s < model.n_states; ++s)
        total += dist.pi[s] * model.c(s, policy.action[s]);
    return total;
}

}  // namespace rsmdp
