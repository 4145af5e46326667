#include "rsmdp/mpi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rsmdp/errors.hpp"
#include "scaled_matrix.hpp"

namespace rsmdp {

namespace {

void validate_config(const MpiConfig& config) {
    if (!config.m_schedule) throw std::invalid_argument("m_schedule must be set");
    if (config.m_cap < 1) throw std::invalid_argument("m_cap must be at least 1");
    if (!(config.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (config.max_outer < 1) throw std::invalid_argument("max_outer must be at least 1");
}

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
    if (m < 1 || m > config.m_cap) {
        std::ostringstream msg;
        msg << "m_schedule(" << k << ") = " << m << " outside [1, " << config.m_cap << "]";
        throw std::invalid_argument(msg.str());
    }
    return m;
}

double min_entry(const PositiveValueVector& v) {
    return *std::min_element(v.entries.begin(), v.entries.end());
}

}  // namespace

bool ContractionDiagnostic::all_ok() const {
    for (const auto& w : windows)
        if (!w.ok) return false;
    return true;
}

MpiTrace run_mpi(const TransformedMdp& tmdp, const MpiConfig& config,
                 const PositiveValueVector& init) {
    validate_config(config);
    validate_init(init, tmdp.n_states);

    MpiTrace trace;
    trace.beta_observed = std::numeric_limits<double>::infinity();
    PositiveValueVector v = init;
    for (int k = 0; k < config.max_outer; ++k) {
        auto [tv, policy] = apply_optimal_operator(tmdp, v, config.tie_tol);

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
        if (config.diagnostics)
            rec.policy_lambda_tilde = evaluate_policy(tmdp, policy).lambda_tilde;
        trace.beta_observed = std::min(trace.beta_observed, min_entry(v));
        trace.records.push_back(std::move(rec));

        if (trace.records.back().upper - trace.records.back().lower <= config.tol) {
            trace.converged = true;
            break;
        }
        int m_k = schedule_value(config, k);
        trace.records.back().m_used = m_k;
        v = normalize(partial_evaluation(tmdp, policy, v, m_k));
    }
    const MpiIterationRecord& last = trace.records.back();
    trace.final_policy = last.policy;
    trace.final_lambda_tilde = std::log(0.5 * (last.upper + last.lower));
    return trace;
}

DeterministicPolicy greedy_improvement(const TransformedMdp& tmdp,
                                       const PositiveValueVector& v_normalized,
                                       double tie_tol) {
    return apply_optimal_operator(tmdp, v_normalized, tie_tol).second;
}

PositiveValueVector partial_evaluation(const TransformedMdp& tmdp,
                                       const DeterministicPolicy& policy,
                                       const PositiveValueVector& v, int m_k) {
    if (m_k < 1) throw std::invalid_argument("m_k must be at least 1");
    PositiveValueVector out = v;
    for (int i = 0; i < m_k; ++i) out = apply_policy_operator(tmdp, policy, out);
    return out;
}

SandwichReport check_sandwich(const MpiTrace& trace, const TransformedMdp& tmdp,
                              const BruteForceResult& brute, double slack) {
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
        check(rec.index, "e^{policy} <= upper", policy_cost, rec.upper);
        check(rec.index, "lower <= upper", rec.lower, rec.upper);
    }
    return report;
}

ContractionDiagnostic contraction_diagnostic(const MpiTrace& trace,
                                             const TransformedMdp& tmdp,
                                             const PositivityCertificate& cert,
                                             const BruteForceResult& brute) {
    const long long r = cert.r_empirical ? *cert.r_empirical : cert.r_bound;
    const auto& recs = trace.records;
    const double optimal = std::exp(brute.optimal_lambda_tilde);

    ContractionDiagnostic diag;
    diag.gamma = std::numeric_limits<double>::infinity();
    diag.h_min_entry = std::numeric_limits<double>::infinity();

    for (int n = 1; n < static_cast<int>(recs.size()); ++n) {
        // Smallest k with evaluation depth over records n-k..n-1 at least R.
        long long depth = 0;
        int k = 0;
        for (int back = n - 1; back >= 0; --back) {
            depth += recs[back].m_used;
            k = n - back;
            if (depth >= r) break;
        }
        if (depth < r) continue;

        detail::ScaledMatrix h = detail::ScaledMatrix::identity(tmdp.n_states);
        for (int t = n; t >= n - k + 1; --t) {
            auto kernel = detail::from_weighted(weighted_matrix(tmdp, recs[t - 1].policy));
            h = detail::multiply(h, detail::power(kernel, recs[t - 1].m_used));
        }
        double gamma = detail::min_window_measure(h, recs[n - k].value.entries);

        ContractionDiagnostic::WindowCheck w;
        w.end_index = n;
        w.length = k;
        w.gamma = gamma;
        w.lhs = recs[n].upper - optimal;
        w.rhs = (1.0 - gamma) * (recs[n - k].upper - optimal);
        w.ok = w.lhs <= w.rhs + 1e-10;
        if (diag.windows.empty()) diag.k_window = k;
        diag.windows.push_back(w);
        diag.gamma = std::min(diag.gamma, gamma);
        diag.h_min_entry = std::min(diag.h_min_entry, h.min_entry_represented());
    }
    if (diag.windows.empty())
        throw TraceTooShortError(
            "no window of evaluation depth >= R fits inside the trace");
    diag.rate_bound = 1.0 - diag.gamma;
    return diag;
}

double lemma_floor(const MpiTrace& trace, const TransformedMdp& tmdp,
                   const PositivityCertificate& cert, int m_cap) {
    const long long r = cert.r_empirical ? *cert.r_empirical : cert.r_bound;
    const auto& recs = trace.records;

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

    // Plain kernel product over the prefix, newest factor on the left.
    detail::ScaledMatrix h = detail::ScaledMatrix::identity(tmdp.n_states);
    for (int j = k - 1; j >= 0; --j)
        h = detail::multiply(
            h, detail::power(detail::policy_kernel(tmdp, recs[j].policy), recs[j].m_used));
    double log_eps_h = std::log(*std::min_element(h.a.begin(), h.a.end())) + h.log_scale;

    const double d_lo = tmdp.min_transformed_cost();
    const double d_hi = tmdp.max_transformed_cost();
    double log_floor = k * tmdp.alpha * d_lo + log_eps_h -
                       std::log(static_cast<double>(tmdp.n_states)) -
                       static_cast<double>(k) * m_cap * tmdp.alpha * d_hi;
    return std::exp(log_floor);
}

SolveResult solve(const MdpModel& model, const RiskParams& params,
                  const MpiConfig& config) {
    TransformedMdp tmdp = transform(model, params);
    SolveResult result;
    result.trace = run_mpi(tmdp, config, PositiveValueVector::uniform(model.n_states));
    result.policy = result.trace.final_policy;
    result.lambda_tilde_star_estimate = result.trace.final_lambda_tilde;
    result.lambda_star_estimate = invert_cost(result.trace.final_lambda_tilde, params.kappa);
    return result;
}

}  // namespace rsmdp
