#include "rsmdp/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace rsmdp {

namespace {

void validate_params(const RiskParams& params) {
    if (!(params.alpha > 0.0) || !std::isfinite(params.alpha))
        throw std::invalid_argument("alpha must be a positive real");
    if (!(params.kappa > 0.0 && params.kappa < 1.0))
        throw std::invalid_argument("kappa must lie in (0, 1)");
}

// FNV-1a over the model's dimensions and raw double bits.
std::string digest(const MdpModel& model) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<std::uint64_t>(model.n_states));
    mix(static_cast<std::uint64_t>(model.n_actions));
    auto mix_doubles = [&](const std::vector<double>& xs) {
        for (double x : xs) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(x));
            std::memcpy(&bits, &x, sizeof(bits));
            mix(bits);
        }
    };
    mix_doubles(model.transition);
    mix_doubles(model.cost);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace

double TransformedMdp::self_loop_floor() const {
    return kappa / ((1.0 - kappa) * std::exp(alpha * cost_hi) + kappa);
}

double TransformedMdp::min_transformed_cost() const {
    return *std::min_element(cost.begin(), cost.end());
}

double TransformedMdp::max_transformed_cost() const {
    return *std::max_element(cost.begin(), cost.end());
}

TransformedMdp transform(const MdpModel& model, const RiskParams& params) {
    require_valid(model);
    validate_params(params);
    if (params.alpha * model.cost_hi > 700.0)
        throw std::invalid_argument(
            "alpha * cost_hi exceeds 700; e^{alpha c} would overflow, rescale costs");

    const int n = model.n_states;
    const int na = model.n_actions;
    const double kappa = params.kappa;
    TransformedMdp out;
    out.n_states = n;
    out.n_actions = na;
    out.alpha = params.alpha;
    out.kappa = kappa;
    out.cost_lo = model.cost_lo;
    out.cost_hi = model.cost_hi;
    out.source_digest = digest(model);
    out.transition.resize(model.transition.size());
    out.cost.resize(model.cost.size());
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < na; ++a) {
            const double w = std::exp(params.alpha * model.c(s, a));
            const double denom = (1.0 - kappa) * w + kappa;
            out.cost[static_cast<std::size_t>(s) * na + a] = std::log(denom) / params.alpha;
            for (int j = 0; j < n; ++j) {
                double numer = (1.0 - kappa) * w * model.p(s, a, j);
                if (j == s) numer += kappa;
                out.transition[(static_cast<std::size_t>(s) * na + a) * n + j] = numer / denom;
            }
        }
    }
    return out;
}

double forward_cost(double lambda_star, double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("kappa must lie in (0, 1)");
    // Branch on sign so neither e^{lambda} nor e^{-lambda} overflows.
    if (lambda_star >= 0.0)
        return lambda_star + std::log1p(-kappa * (1.0 - std::exp(-lambda_star)));
    return std::log(kappa) + std::log1p((1.0 - kappa) * std::exp(lambda_star) / kappa);
}

double invert_cost(double lambda_tilde, double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("kappa must lie in (0, 1)");
    if (lambda_tilde > 0.0)
        return lambda_tilde + std::log1p(-kappa * std::exp(-lambda_tilde)) -
               std::log1p(-kappa);
    double el = std::exp(lambda_tilde);
    if (el < kappa + 1e-15)
        throw std::domain_error(
            "invert_cost: e^{lambda_tilde} < kappa, inconsistent transformed cost");
    return std::log((el - kappa) / (1.0 - kappa));
}

PositivityCertificate positivity_horizon(const TransformedMdp& tmdp, int search_cap) {
    if (search_cap < 1) throw std::invalid_argument("search_cap must be at least 1");
    const int n = tmdp.n_states;
    const int na = tmdp.n_actions;

    PositivityCertificate cert;
    // r_bound = (n-1) m^n + 1, saturating.
    long long bound = 1;
    bool saturated = false;
    for (int s = 0; s < n; ++s) {
        if (bound > std::numeric_limits<long long>::max() / na) {
            saturated = true;
            break;
        }
        bound *= na;
    }
    if (saturated || (n > 1 && bound > (std::numeric_limits<long long>::max() - 1) / (n - 1)))
        cert.r_bound = std::numeric_limits<long long>::max();
    else
        cert.r_bound = static_cast<long long>(n - 1) * bound + 1;

    // Adversarial kernel: an edge survives only when every action keeps it.
    // Boolean powers of this kernel lower-bound the support of every
    // policy-sequence product. The diagonal is all true (self-loop floor),
    // so reachability grows monotonically.
    std::vector<char> adv(static_cast<std::size_t>(n) * n, 1);
    std::vector<double> worst(static_cast<std::size_t>(n) * n,
                              std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            char keep = 1;
            double low = std::numeric_limits<double>::infinity();
            for (int a = 0; a < na; ++a) {
                double q = tmdp.q(i, a, j);
                if (!(q > 0.0)) keep = 0;
                low = std::min(low, q);
            }
            adv[static_cast<std::size_t>(i) * n + j] = keep;
            worst[static_cast<std::size_t>(i) * n + j] = low;
        }

    std::vector<char> reach = adv;
    auto all_positive = [&](const std::vector<char>& r) {
        for (char x : r)
            if (!x) return false;
        return true;
    };
    int found = 0;
    for (int r = 1; r <= search_cap; ++r) {
        if (all_positive(reach)) {
            found = r;
            break;
        }
        std::vector<char> next(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                if (!reach[static_cast<std::size_t>(i) * n + k]) continue;
                for (int j = 0; j < n; ++j)
                    if (adv[static_cast<std::size_t>(k) * n + j])
                        next[static_cast<std::size_t>(i) * n + j] = 1;
            }
        if (next == reach) break;  // fixed point short of all-positive
        reach = std::move(next);
    }
    if (found == 0) return cert;

    cert.r_empirical = found;
    // Concrete witness: the found-fold product of the entrywise
    // action-minimum kernel. Its entries lower-bound every policy-sequence
    // product of the same length.
    std::vector<double> prod = worst;
    for (int step = 1; step < found; ++step) {
        std::vector<double> next(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                double w = prod[static_cast<std::size_t>(i) * n + k];
                if (w == 0.0) continue;
                for (int j = 0; j < n; ++j)
                    next[static_cast<std::size_t>(i) * n + j] +=
                        w * worst[static_cast<std::size_t>(k) * n + j];
            }
        prod = std::move(next);
    }
    cert.witness_min_entry = *std::min_element(prod.begin(), prod.end());
    return cert;
}

}  // namespace rsmdp
