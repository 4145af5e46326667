#include "rsmdp/approx_mpi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rsmdp/errors.hpp"
#include "scaled_matrix.hpp"

namespace rsmdp {

namespace {

void validate_init(const PositiveValueVector& init, int n) {
    if (init.size() != n)
        throw std::invalid_argument("init length does not match n_states");
    for (double x : init.entries)
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument("init entries must be positive finite");
    double sum = std::accumulate(init.entries.begin(), init.entries.end(), 0.0);
    if (init.log_scale != 0.0 || std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("init entries must sum to 1");
}

int schedule_value(const MpiConfig& config, int k) {
    int m = config.m_schedule(k);
    if (m < 1 || m > config.m_cap)
        throw std::invalid_argument("m_schedule value outside [1, m_cap]");
    return m;
}

// Value of one action at one state, on the represented scale of v's
// entries (the caller cancels any common scale).
double action_value(const TransformedMdp& tmdp, int state, int action,
                    const PositiveValueVector& v) {
    double acc = 0.0;
    for (int j = 0; j < tmdp.n_states; ++j)
        acc += tmdp.q(state, action, j) * v.entries[j];
    return std::exp(tmdp.alpha * tmdp.d(state, action)) * acc;
}

}  // namespace

void validate(const ApproxConfig& approx) {
    if (!(approx.epsilon >= 1.0))
        throw std::invalid_argument("epsilon must be at least 1");
    if (!(approx.delta1 > 0.0 && approx.delta1 <= 1.0))
        throw std::invalid_argument("delta1 must lie in (0, 1]");
    if (!(approx.delta2 >= 1.0) || approx.delta2 < approx.delta1)
        throw std::invalid_argument("delta2 must be at least 1 and at least delta1");
    if (approx.n_window < 1)
        throw std::invalid_argument("n_window must be at least 1");
}

bool ApproxBoundReport::all_ok() const {
    for (const auto& e : per_iteration_bound)
        if (!e.ok) return false;
    return true;
}

DeterministicPolicy approx_improvement(const TransformedMdp& tmdp,
                                       const PositiveValueVector& v, double epsilon,
                                       Rng& rng, double tie_tol) {
    if (!(epsilon >= 1.0)) throw std::invalid_argument("epsilon must be at least 1");
    auto [tv, policy] = apply_optimal_operator(tmdp, v, tie_tol);
    // action_value works on the scale of v's entries; undo any folding the
    // operator applied to its output.
    const double rescale = std::exp(tv.log_scale - v.log_scale);
    const int na = tmdp.n_actions;
    for (int i = 0; i < tmdp.n_states; ++i) {
        bool attempt = rng.uniform01() < 0.5;
        if (!attempt || na < 2) continue;
        int alt = rng.below(na - 1);
        if (alt >= policy.action[i]) ++alt;
        // Strict comparison: with epsilon == 1 no swap is ever taken, so
        // the zero-error run reproduces the tie-broken greedy policy.
        if (action_value(tmdp, i, alt, v) < epsilon * tv.entries[i] * rescale)
            policy.action[i] = alt;
    }
    return policy;
}

PositiveValueVector approx_evaluation_perturb(const PositiveValueVector& v_normalized,
                                              double delta1, double delta2, Rng& rng) {
    if (!(delta1 > 0.0 && delta1 <= delta2))
        throw std::invalid_argument("need 0 < delta1 <= delta2");
    PositiveValueVector out;
    out.log_scale = v_normalized.log_scale;
    out.entries.resize(v_normalized.entries.size());
    for (std::size_t i = 0; i < v_normalized.entries.size(); ++i) {
        double r = delta1 + (delta2 - delta1) * rng.uniform01();
        out.entries[i] = v_normalized.entries[i] / r;
    }
    return out;
}

MpiTrace run_approx_mpi(const TransformedMdp& tmdp, const MpiConfig& config,
                        const ApproxConfig& approx, const PositiveValueVector& init) {
    validate(approx);
    if (!config.m_schedule) throw std::invalid_argument("m_schedule must be set");
    if (!(config.tol > 0.0) || config.max_outer < 1 || config.m_cap < 1)
        throw std::invalid_argument("bad MpiConfig");
    validate_init(init, tmdp.n_states);

    Rng rng(approx.rng_seed);
    MpiTrace trace;
    trace.beta_observed = std::numeric_limits<double>::infinity();
    PositiveValueVector v = init;
    for (int k = 0; k < config.max_outer; ++k) {
        DeterministicPolicy policy =
            approx_improvement(tmdp, v, approx.epsilon, rng, config.tie_tol);
        auto [tv, greedy] = apply_optimal_operator(tmdp, v, config.tie_tol);
        (void)greedy;

        MpiIterationRecord rec;
        rec.index = k;
        rec.policy = policy;
        const double scale = std::exp(tv.log_scale);
        rec.ratio.resize(tmdp.n_states);
        for (int i = 0; i < tmdp.n_states; ++i)
            rec.ratio[i] = scale * tv.entries[i] / v.entries[i];
        rec.upper = *std::max_element(rec.ratio.begin(), rec.ratio.end());
        rec.lower = *std::min_element(rec.ratio.begin(), rec.ratio.end());
        rec.value = v;
        double worst_ratio = 1.0;
        for (int i = 0; i < tmdp.n_states; ++i)
            worst_ratio = std::max(worst_ratio,
                                   action_value(tmdp, i, policy.action[i], v) /
                                       (tv.entries[i] * scale));
        rec.improvement_ratio_max = worst_ratio;
        if (config.diagnostics)
            rec.policy_lambda_tilde = evaluate_policy(tmdp, policy).lambda_tilde;
        trace.beta_observed =
            std::min(trace.beta_observed,
                     *std::min_element(v.entries.begin(), v.entries.end()));
        trace.records.push_back(std::move(rec));

        if (trace.records.back().upper - trace.records.back().lower <= config.tol) {
            trace.converged = true;
            break;
        }
        int m_k = schedule_value(config, k);
        trace.records.back().m_used = m_k;
        PositiveValueVector evaluated =
            normalize(partial_evaluation(tmdp, policy, v, m_k));

        // Perturb and record the realized evaluation ratios e^{h'}/e^{h}.
        PositiveValueVector perturbed =
            approx_evaluation_perturb(evaluated, approx.delta1, approx.delta2, rng);
        double rmin = std::numeric_limits<double>::infinity();
        double rmax = 0.0;
        for (int i = 0; i < tmdp.n_states; ++i) {
            double ratio = evaluated.entries[i] / perturbed.entries[i];
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
        }
        trace.records.back().eval_ratio_min = rmin;
        trace.records.back().eval_ratio_max = rmax;
        v = std::move(perturbed);
    }
    const MpiIterationRecord& last = trace.records.back();
    trace.final_policy = last.policy;
    trace.final_lambda_tilde = std::log(0.5 * (last.upper + last.lower));
    return trace;
}

SandwichReport check_approx_sandwich(const MpiTrace& trace, const TransformedMdp& tmdp,
                                     const BruteForceResult& brute, double epsilon,
                                     double slack) {
    const double optimal = std::exp(brute.optimal_lambda_tilde);
    SandwichReport report;
    auto check = [&report, slack](int iter, const char* name, double lhs, double rhs) {
        if (lhs > rhs + slack)
            report.violations.push_back({iter, name, lhs, rhs});
    };
    for (const MpiIterationRecord& rec : trace.records) {
        double policy_cost = rec.policy_lambda_tilde
                                 ? std::exp(*rec.policy_lambda_tilde)
                                 : std::exp(evaluate_policy(tmdp, rec.policy).lambda_tilde);
        check(rec.index, "lower <= e^{optimal}", rec.lower, optimal);
        check(rec.index, "e^{optimal} <= e^{policy}", optimal, policy_cost);
        check(rec.index, "e^{policy} <= upper * epsilon", policy_cost,
              rec.upper * epsilon);
        check(rec.index, "lower <= upper * epsilon", rec.lower, rec.upper * epsilon);
    }
    return report;
}

ApproxBoundReport theorem_bound(const MpiTrace& trace, const TransformedMdp& tmdp,
                                const BruteForceResult& brute, const ApproxConfig& approx,
                                const PositivityCertificate& cert, double slack) {
    validate(approx);
    const auto& recs = trace.records;
    const int n = approx.n_window;
    const long long r = cert.r_empirical ? *cert.r_empirical : cert.r_bound;
    if (static_cast<int>(recs.size()) <= n)
        throw TraceTooShortError("trace shorter than one bound window");

    // Window measure minimum across every window of length n_window.
    double gamma = std::numeric_limits<double>::infinity();
    for (int k = n; k < static_cast<int>(recs.size()); ++k) {
        long long depth = 0;
        for (int j = k - n; j <= k - 1; ++j) depth += recs[j].m_used;
        if (depth < r)
            throw std::invalid_argument(
                "n_window too small: window evaluation depth below R");
        detail::ScaledMatrix h = detail::ScaledMatrix::identity(tmdp.n_states);
        for (int t = k; t >= k - n + 1; --t) {
            auto kernel = detail::from_weighted(weighted_matrix(tmdp, recs[t - 1].policy));
            h = detail::multiply(h, detail::power(kernel, recs[t - 1].m_used));
        }
        gamma = std::min(gamma,
                         detail::min_window_measure(h, recs[k - n].value.entries));
    }

    const double ratio_power = std::pow(approx.delta2 * approx.epsilon / approx.delta1,
                                        static_cast<double>(n));
    ApproxBoundReport report;
    report.gamma = gamma;
    report.gamma_prime = ratio_power * (1.0 - gamma);
    report.sigma = ratio_power * (1.0 + (approx.epsilon - 1.0) * gamma) - 1.0;
    report.bound_applicable = report.gamma_prime < 1.0;
    if (!report.bound_applicable) return report;

    const double optimal = std::exp(brute.optimal_lambda_tilde);
    const double u0 = recs[0].upper;
    const double tail = report.sigma * optimal / (1.0 - report.gamma_prime);
    for (int k = n; k < static_cast<int>(recs.size()); k += n) {
        if (!recs[k].policy_lambda_tilde)
            throw std::invalid_argument("theorem_bound needs a diagnostics-enabled trace");
        ApproxBoundReport::Entry entry;
        entry.index = k;
        entry.lhs = std::exp(*recs[k].policy_lambda_tilde) - optimal;
        entry.rhs = std::pow(report.gamma_prime, static_cast<double>(k) / n) *
                        (u0 * approx.epsilon - optimal) +
                    tail;
        entry.ok = entry.lhs <= entry.rhs + slack;
        report.per_iteration_bound.push_back(entry);
    }
    return report;
}

BoundednessFloor boundedness_floor(const MpiTrace& trace, const TransformedMdp& tmdp,
                                   const ApproxConfig& approx,
                                   const PositivityCertificate& cert) {
    validate(approx);
    const auto& recs = trace.records;
    const long long r = cert.r_empirical ? *cert.r_empirical : cert.r_bound;

    BoundednessFloor out;
    out.observed_min = std::numeric_limits<double>::infinity();
    for (const auto& rec : recs)
        out.observed_min =
            std::min(out.observed_min, *std::min_element(rec.value.entries.begin(),
                                                         rec.value.entries.end()));

    long long depth = 0;
    int k = 0;
    for (int j = 0; j < static_cast<int>(recs.size()); ++j) {
        if (recs[j].m_used == 0) break;
        depth += recs[j].m_used;
        k = j + 1;
        if (depth >= r) break;
    }
    if (depth < r)
        throw TraceTooShortError("run prefix never accumulates evaluation depth R");

    detail::ScaledMatrix h = detail::ScaledMatrix::identity(tmdp.n_states);
    for (int j = k - 1; j >= 0; --j)
        h = detail::multiply(
            h, detail::power(detail::policy_kernel(tmdp, recs[j].policy), recs[j].m_used));
    double log_lambda_h = std::log(*std::min_element(h.a.begin(), h.a.end())) + h.log_scale;

    const double d_lo = tmdp.min_transformed_cost();
    const double d_hi = tmdp.max_transformed_cost();
    double log_tau = tmdp.alpha * (d_lo - d_hi) * static_cast<double>(depth) +
                     log_lambda_h - std::log(static_cast<double>(tmdp.n_states));
    out.constructive_floor = std::exp(log_tau) / approx.delta2;
    return out;
}

}  // namespace rsmdp
