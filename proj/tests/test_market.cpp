#include <doctest.h>

#include <cmath>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/market.hpp"
#include "ddlab/rng.hpp"
#include "ddlab/stats.hpp"

using namespace ddlab;

TEST_CASE("pseudo inverse: scalar division") {
    const std::vector<double> rho =
        pseudo_inverse_drift_solve(std::vector<double>{0.04}, std::vector<double>{0.2});
    REQUIRE(rho.size() == 1);
    CHECK(rho[0] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("pseudo inverse: minimum-norm solution on a singular covariance") {
    const std::vector<double> c = {1, 1, 1, 1};
    const std::vector<double> b = {1, 1};
    const std::vector<double> rho = pseudo_inverse_drift_solve(c, b);
    REQUIRE(rho.size() == 2);

    // independent oracle: ridge limit (c + eps I)^{-1} b via 2x2 Cramer
    const double eps = 1e-10;
    const double det = (1 + eps) * (1 + eps) - 1.0;
    const double r0 = ((1 + eps) * b[0] - 1.0 * b[1]) / det;
    const double r1 = ((1 + eps) * b[1] - 1.0 * b[0]) / det;
    CHECK(rho[0] == doctest::Approx(r0).epsilon(1e-6));
    CHECK(rho[1] == doctest::Approx(r1).epsilon(1e-6));
    CHECK(rho[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rho[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("pseudo inverse: drift outside the covariance range fails") {
    const std::vector<double> c = {1, 1, 1, 1};
    CHECK_THROWS_AS(pseudo_inverse_drift_solve(c, std::vector<double>{1, 0}),
                    no_numeraire_error);
    // b = 0 is always solvable
    const std::vector<double> zero = pseudo_inverse_drift_solve(c, std::vector<double>{0, 0});
    CHECK(zero == std::vector<double>({0, 0}));
}

TEST_CASE("simulate_batch validation") {
    CHECK_THROWS_AS(simulate_batch(MarketModel::gbm_preset(), TimeGrid(0.01, 10), 0, 1),
                    invalid_input);
    CHECK_THROWS_AS(MarketModel::constant({0.1}, {0.2, 0.3}, 1, {1.0}), invalid_input);
    CHECK_THROWS_AS(MarketModel::constant({0.1}, {0.2}, 1, {-1.0}), invalid_input);
}

TEST_CASE("degenerate diffusion stays at s0") {
    const MarketModel model = MarketModel::constant({0.0}, {0.0}, 1, {2.5});
    const SimBatch batch = simulate_batch(model, TimeGrid(0.1, 50), 3, 9);
    for (std::size_t p = 0; p < 3; ++p) {
        const PathRecord rec = generate_path(batch, p);
        for (std::size_t k = 0; k <= 50; ++k) CHECK(rec.price(k, 0) == 2.5);
    }
}

TEST_CASE("paths regenerate bit-identically and independently") {
    const SimBatch batch =
        simulate_batch(MarketModel::gbm_preset(), TimeGrid(0.01, 100), 10, 77);
    const PathRecord a = generate_path(batch, 5);
    const PathRecord b = generate_path(batch, 5);
    CHECK(a.prices == b.prices);
    CHECK(a.dw == b.dw);
    const PathRecord c = generate_path(batch, 6);
    CHECK(a.prices != c.prices);
}

TEST_CASE("lognormal moment: sample mean of S_T matches exp(b T)") {
    const double T = 1.0;
    const SimBatch batch =
        simulate_batch(MarketModel::gbm_preset(), TimeGrid(0.01, 100), 100000, 4242);
    std::vector<double> terminal(batch.n_paths);
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        terminal[p] = generate_path(batch, p).price(100, 0);
    }
    const MCEstimate est = mc_estimate(terminal);
    const double expected = std::exp(0.2 * T);
    CHECK(std::fabs(est.mean - expected) <= 3.0 * est.se);
}

TEST_CASE("log-Euler is exact in law for constant coefficients (KS)") {
    // marginal of log S_T ~ Normal((b - c/2) T, c T)
    const double T = 1.0;
    const double mean = (0.2 - 0.02) * T;
    const double sd = 0.2 * std::sqrt(T);
    const SimBatch batch =
        simulate_batch(MarketModel::gbm_preset(), TimeGrid(0.02, 50), 100000, 31337);
    std::vector<double> logs(batch.n_paths);
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        logs[p] = std::log(generate_path(batch, p).price(50, 0));
    }
    const KsResult ks = ks_test(logs, [mean, sd](double x) {
        return normal_cdf((x - mean) / sd);
    });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("numeraire path on the one-asset preset") {
    const SimBatch batch =
        simulate_batch(MarketModel::gbm_preset(), TimeGrid(0.01, 200), 4, 5);
    const NumerairePath num = numeraire_path(batch, 1);
    // optimal fraction b/c = 5 at every step and G_t = t/2
    for (std::size_t k = 0; k < 200; ++k) {
        CHECK(num.rho[k] == doctest::Approx(5.0).epsilon(1e-12));
    }
    CHECK(num.growth[0] == 0.0);
    CHECK(num.growth.back() == doctest::Approx(0.5 * 2.0).epsilon(1e-12));
    for (std::size_t k = 0; k < 200; ++k) CHECK(num.growth[k + 1] >= num.growth[k]);
    CHECK(num.wealth[0] == 1.0);
}

TEST_CASE("zero drift makes the baseline the optimum") {
    const MarketModel model = MarketModel::constant({0.0}, {0.3}, 1, {1.0});
    const SimBatch batch = simulate_batch(model, TimeGrid(0.05, 40), 2, 3);
    const NumerairePath num = numeraire_path(batch, 0);
    for (std::size_t k = 0; k <= 40; ++k) {
        CHECK(num.wealth[k] == 1.0);
        CHECK(num.growth[k] == 0.0);
    }
}

TEST_CASE("wealth_from_proportions basics") {
    const SimBatch batch =
        simulate_batch(MarketModel::gbm_preset(), TimeGrid(0.01, 150), 3, 21);
    const PathRecord rec = generate_path(batch, 2);

    const SampledPath flat = wealth_from_proportions(rec, std::vector<double>{0.0});
    for (double v : flat.values) CHECK(v == 1.0);

    const SampledPath hold = wealth_from_proportions(rec, std::vector<double>{1.0});
    for (std::size_t k = 0; k <= 150; ++k) {
        CHECK(hold[k] == doctest::Approx(rec.price(k, 0)).epsilon(1e-12));
    }

    const NumerairePath num = numeraire_path(batch.model, rec, 2);
    const std::vector<double>& rho = num.rho;
    const SampledPath same = wealth_from_proportions(
        rec, [&rho](std::size_t k, double, std::span<const double>,
                    std::span<double> pi) { pi[0] = rho[k]; });
    CHECK(same.values == num.wealth.values);  // identical recursion, bit-exact
}

TEST_CASE("wealth clamps at zero and absorbs") {
    // price drops ~39% in one step; a 3x leveraged position is wiped out
    MarketModel model = MarketModel::constant({0.0}, {0.0}, 1, {1.0});
    model = MarketModel::custom(
        1, 1, {1.0},
        [](double, std::span<const double>, std::span<double> b) { b[0] = 0.0; },
        [](double t, std::span<const double>, std::span<double> s) {
            s[0] = t < 0.5 ? 5.0 : 0.0;
        });
    const SimBatch batch = simulate_batch(model, TimeGrid(0.25, 8), 64, 11);
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        const PathRecord rec = generate_path(batch, p);
        const SampledPath w = wealth_from_proportions(rec, std::vector<double>{3.0});
        bool dead = false;
        for (double v : w.values) {
            CHECK(v >= 0.0);
            if (dead) CHECK(v == 0.0);
            if (v == 0.0) dead = true;
        }
    }
}

TEST_CASE("numeraire beats every proportional strategy on average") {
    const SimBatch batch =
        simulate_batch(MarketModel::gbm_preset(), TimeGrid(0.01, 300), 2000, 99);
    for (double fraction : {0.0, 1.0, 2.5}) {
        std::vector<double> ratio(batch.n_paths);
        for (std::size_t p = 0; p < batch.n_paths; ++p) {
            const PathRecord rec = generate_path(batch, p);
            const NumerairePath num = numeraire_path(batch.model, rec, p);
            const SampledPath w =
                wealth_from_proportions(rec, std::vector<double>{fraction});
            ratio[p] = w.back() / num.wealth.back();
        }
        const MCEstimate est = mc_estimate(ratio);
        CHECK(est.mean <= 1.0 + 3.0 * est.se);
    }
}

TEST_CASE("non-finite coefficients raise simulation_error with location") {
    const MarketModel model = MarketModel::custom(
        1, 1, {1.0},
        [](double t, std::span<const double>, std::span<double> b) {
            b[0] = t > 0.2 ? std::nan("") : 0.1;
        },
        [](double, std::span<const double>, std::span<double> s) { s[0] = 0.2; });
    const SimBatch batch = simulate_batch(model, TimeGrid(0.1, 10), 2, 1);
    try {
        generate_path(batch, 1);
        FAIL("expected simulation_error");
    } catch (const simulation_error& e) {
        CHECK(e.path() == 1);
        CHECK(e.step() == 3);
    }
}

TEST_CASE("rank-deficient covariance with incompatible drift has no optimum") {
    // two assets driven by one Brownian motion, drift not collinear
    const MarketModel model =
        MarketModel::constant({0.1, 0.0}, {0.2, 0.2}, 1, {1.0, 1.0});
    const SimBatch batch = simulate_batch(model, TimeGrid(0.1, 5), 1, 1);
    CHECK_THROWS_AS(numeraire_path(batch, 0), no_numeraire_error);
}

TEST_CASE("two-asset model with full-rank covariance works") {
    const MarketModel model = MarketModel::constant(
        {0.1, 0.05}, {0.2, 0.0, 0.05, 0.15}, 2, {1.0, 2.0});
    const SimBatch batch = simulate_batch(model, TimeGrid(0.01, 100), 16, 8);
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        const NumerairePath num = numeraire_path(batch, p);
        CHECK(num.wealth[0] == 1.0);
        for (std::size_t k = 0; k < 100; ++k) {
            CHECK(num.growth[k + 1] >= num.growth[k]);
        }
    }
}

TEST_CASE("log growth of the optimum matches the growth clock" * doctest::timeout(120)) {
    // mean of log(Xhat_T)/G_T over 2000 paths with G_T = 100, within
    // 3 sqrt(2/G_T)/sqrt(N) of 1
    const double dt = 0.002;
    const std::size_t n = 100000;  // T = 200
    const SimBatch batch =
        simulate_batch(MarketModel::gbm_preset(), TimeGrid(dt, n), 2000, 2468);
    std::vector<double> ratio(batch.n_paths);
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        const NumerairePath num = numeraire_path(batch, p);
        ratio[p] = std::log(num.wealth.back()) / num.growth.back();
    }
    const MCEstimate est = mc_estimate(ratio);
    const double tol = 3.0 * std::sqrt(2.0 / 100.0) / std::sqrt(2000.0);
    CHECK(std::fabs(est.mean - 1.0) <= tol);
}
