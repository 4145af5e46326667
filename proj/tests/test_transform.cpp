#include <doctest.h>

#include <cmath>
#include <vector>

#include "rsmdp/model.hpp"
#include "rsmdp/model_io.hpp"
#include "rsmdp/oracles.hpp"
#include "rsmdp/rng.hpp"
#include "rsmdp/transform.hpp"
#include "test_oracles.hpp"

using namespace rsmdp;

TEST_CASE("zero costs collapse the transform to a lazy kernel") {
    MdpModel m = generate_random(1, 3, 2, 0.0, 1.0);
    for (double& c : m.cost) c = 0.0;
    m.cost_lo = 0.0;
    m.cost_hi = 0.0;
    const double kappa = 0.3;
    TransformedMdp t = transform(m, {1.0, kappa});
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) {
            CHECK(t.d(s, a) == doctest::Approx(0.0).epsilon(1e-15));
            for (int j = 0; j < 3; ++j) {
                double expected = (1.0 - kappa) * m.p(s, a, j) + (j == s ? kappa : 0.0);
                CHECK(t.q(s, a, j) == doctest::Approx(expected).epsilon(1e-14));
            }
        }
}

TEST_CASE("the transform vanishes in the kappa -> 0 limit") {
    MdpModel m = generate_random(2, 4, 2, 0.0, 1.0);
    TransformedMdp t = transform(m, {1.0, 1e-12});
    for (std::size_t i = 0; i < m.cost.size(); ++i)
        CHECK(std::abs(t.cost[i] - m.cost[i]) <= 1e-10);
    for (std::size_t i = 0; i < m.transition.size(); ++i)
        CHECK(std::abs(t.transition[i] - m.transition[i]) <= 1e-10);
}

TEST_CASE("transform matches direct arithmetic on a two-state model") {
    MdpModel m = generate_random(9, 2, 1, 0.0, 1.0);
    m.c(0, 0) = std::log(2.0);
    m.cost_hi = 1.0;
    TransformedMdp t = transform(m, {1.0, 0.5});
    CHECK(t.d(0, 0) == doctest::Approx(std::log(1.5)).epsilon(1e-15));
    double expected = (0.5 * 2.0 * m.p(0, 0, 0) + 0.5) / 1.5;
    CHECK(t.q(0, 0, 0) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("transform rejects overflowing costs") {
    MdpModel m = MdpModel::zeros(1, 1);
    m.p(0, 0, 0) = 1.0;
    m.c(0, 0) = 800.0;
    m.cost_lo = 0.0;
    m.cost_hi = 800.0;
    CHECK_THROWS_AS(transform(m, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("transform preserves stochasticity and the self-loop floor") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        MdpModel m = generate_random(seed, 2 + seed % 4, 1 + seed % 3, 0.0, 1.0);
        RiskParams params{0.5 + 0.5 * (seed % 3), 0.1 + 0.2 * (seed % 4)};
        TransformedMdp t = transform(m, params);
        double worst_drift = 0.0;
        for (int s = 0; s < t.n_states; ++s)
            for (int a = 0; a < t.n_actions; ++a) {
                double sum = 0.0;
                for (int j = 0; j < t.n_states; ++j) sum += t.q(s, a, j);
                worst_drift = std::max(worst_drift, std::abs(sum - 1.0));
                CHECK(t.q(s, a, s) >= t.self_loop_floor() - 1e-15);
            }
        CHECK(worst_drift <= 1e-13);
    }
}

TEST_CASE("forward_cost fixes zero and matches hand arithmetic") {
    for (double kappa : {0.1, 0.5, 0.9})
        CHECK(forward_cost(0.0, kappa) == 0.0);
    CHECK(forward_cost(std::log(2.0), 0.5) ==
          doctest::Approx(std::log(1.5)).epsilon(1e-15));
}

TEST_CASE("forward_cost is strictly increasing in lambda") {
    for (double kappa : {0.1, 0.5, 0.9}) {
        double prev = forward_cost(-3.0, kappa);
        for (double lam = -2.5; lam <= 3.0; lam += 0.5) {
            double cur = forward_cost(lam, kappa);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("invert_cost is the algebraic inverse of forward_cost") {
    CHECK(invert_cost(0.0, 0.3) == 0.0);
    for (double lam : {-1.0, 0.37, 3.0})
        for (double kappa : {0.1, 0.5, 0.9})
            CHECK(std::abs(invert_cost(forward_cost(lam, kappa), kappa) - lam) <= 1e-12);
}

TEST_CASE("round trips compose both ways on random inputs") {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        double kappa = 0.05 + 0.9 * rng.uniform01();
        double lam = -2.0 + 6.0 * rng.uniform01();
        CHECK(std::abs(invert_cost(forward_cost(lam, kappa), kappa) - lam) <= 1e-12);
        double lam_tilde = forward_cost(lam, kappa);  // stays in the valid domain
        CHECK(std::abs(forward_cost(invert_cost(lam_tilde, kappa), kappa) - lam_tilde) <=
              1e-12);
    }
}

TEST_CASE("invert_cost rejects values below the kappa floor") {
    CHECK_THROWS_AS(invert_cost(std::log(0.05), 0.1), std::domain_error);
}

TEST_CASE("positivity horizon is 1 for an all-positive kernel") {
    MdpModel m = generate_random(3, 3, 2, 0.0, 1.0);
    TransformedMdp t = transform(m, {1.0, 0.5});
    PositivityCertificate cert = positivity_horizon(t, 10);
    REQUIRE(cert.r_empirical.has_value());
    CHECK(*cert.r_empirical == 1);
    CHECK(*cert.witness_min_entry > 0.0);
    CHECK(*cert.r_empirical <= cert.r_bound);
}

TEST_CASE("positivity horizon of a single state") {
    MdpModel m = MdpModel::zeros(1, 1);
    m.p(0, 0, 0) = 1.0;
    m.cost_hi = 1.0;
    TransformedMdp t = transform(m, {1.0, 0.5});
    PositivityCertificate cert = positivity_horizon(t, 5);
    CHECK(cert.r_bound == 1);
    REQUIRE(cert.r_empirical.has_value());
    CHECK(*cert.r_empirical == 1);
}

TEST_CASE("positivity horizon on a shared-support cyclic model") {
    // Both actions walk the same 3-cycle at different costs, so the
    // adversarial support kernel keeps the cycle plus the transform's
    // self-loops.
    MdpModel m = MdpModel::zeros(3, 2);
    for (int s = 0; s < 3; ++s) {
        m.p(s, 0, (s + 1) % 3) = 1.0;
        m.p(s, 1, (s + 1) % 3) = 1.0;
        m.c(s, 0) = 0.2;
        m.c(s, 1) = 0.8;
    }
    m.cost_lo = 0.0;
    m.cost_hi = 1.0;
    TransformedMdp t = transform(m, {1.0, 0.5});
    PositivityCertificate cert = positivity_horizon(t, 20);
    CHECK(cert.r_bound == 2 * 8 + 1);
    REQUIRE(cert.r_empirical.has_value());
    CHECK(*cert.r_empirical == testsupport::positivity_radius_bfs(t, 20).value());
    CHECK(*cert.r_empirical == 2);
    CHECK(*cert.r_empirical <= cert.r_bound);
    CHECK(*cert.witness_min_entry > 0.0);
}

TEST_CASE("positivity horizon reports absence when supports never align") {
    // Action supports intersect only on the diagonal, so the adversarial
    // kernel is the identity and never fills in.
    MdpModel m = MdpModel::zeros(3, 2);
    for (int s = 0; s < 3; ++s) {
        m.p(s, 0, (s + 1) % 3) = 1.0;
        m.p(s, 1, (s + 2) % 3) = 1.0;
    }
    m.cost_hi = 1.0;
    TransformedMdp t = transform(m, {1.0, 0.5});
    PositivityCertificate cert = positivity_horizon(t, 50);
    CHECK_FALSE(cert.r_empirical.has_value());
    CHECK_FALSE(testsupport::positivity_radius_bfs(t, 50).has_value());
}

TEST_CASE("optimal policy sets agree between the original and transformed problems") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const int n = 2 + static_cast<int>(seed % 3);
        const int na = 2 + static_cast<int>(seed % 2);
        MdpModel m = generate_random(seed + 100, n, na, 0.0, 1.0);
        const double alpha = 1.0;
        testsupport::OriginalBruteForce original =
            testsupport::brute_force_original(m, alpha);
        for (double kappa : {0.1, 0.5, 0.9}) {
            TransformedMdp t = transform(m, {alpha, kappa});
            BruteForceResult transformed = brute_force_optimal(t);
            CHECK(testsupport::same_policy_set(transformed.optimal_policies,
                                               original.optimal_policies));
            CHECK(std::abs(invert_cost(transformed.optimal_lambda_tilde, kappa) -
                           original.optimal_lambda) <= 1e-10);
        }
    }
}

TEST_CASE("transformed model JSON round trip") {
    MdpModel m = generate_random(17, 3, 2, 0.0, 1.0);
    TransformedMdp t = transform(m, {2.0, 0.25});
    TransformedMdp back = transformed_from_json(transformed_to_json(t));
    CHECK(back.transition == t.transition);
    CHECK(back.cost == t.cost);
    CHECK(back.alpha == t.alpha);
    CHECK(back.kappa == t.kappa);
    CHECK(back.source_digest == t.source_digest);
}
