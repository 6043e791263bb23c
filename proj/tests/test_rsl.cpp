#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tailrisk/rng.hpp"
#include "tailrisk/rsl.hpp"

using namespace tailrisk;
using namespace tailrisk::rsl;

TEST_CASE("risk-sensitive transform") {
    SampleSet constants(std::vector<double>(30, 2.5));
    for (double mu : {-2.0, -0.5, 1e-12, 0.7}) {
        CHECK(rs_transform(constants, mu) == Catch::Approx(2.5).margin(1e-9));
    }

    Rng rng(3, "test/rs-limit");
    SampleSet xs;
    for (int i = 0; i < 5000; ++i) xs.values.push_back(rng.uniform(0.0, 4.0));
    double mean = sample_mean(xs);
    CHECK(std::abs(rs_transform(xs, 1e-9) - mean) < 1e-6);

    // Gaussian cumulant identity: value ~ m + (mu/2) s^2
    Rng g(4, "test/rs-gauss");
    SampleSet normal;
    for (int i = 0; i < 400000; ++i) normal.values.push_back(g.normal(1.5, 2.0));
    CHECK(std::abs(rs_transform(normal, 0.1) - (1.5 + 0.05 * 4.0)) < 0.02);

    // non-decreasing in mu
    double prev = -1e300;
    for (double mu = -1.0; mu <= 1.0; mu += 0.125) {
        double v = rs_transform(xs, mu);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("second-order expansion error shrinks like mu squared") {
    // skewed sample so the third cumulant drives the residual
    Rng rng(5, "test/rs-expansion");
    SampleSet xs;
    for (int i = 0; i < 20000; ++i) xs.values.push_back(rng.exponential(1.0));
    double m = sample_mean(xs);
    double var = 0.0;
    for (double x : xs.values) var += (x - m) * (x - m);
    var /= static_cast<double>(xs.size());

    auto residual = [&](double mu) {
        return std::abs(rs_transform(xs, mu) - (m + 0.5 * mu * var));
    };
    double e1 = residual(0.02);
    double e2 = residual(0.01);
    CHECK(e1 / e2 >= 3.5);  // ~4x per halving
}

TEST_CASE("utility estimate update") {
    AgentState st = AgentState::make(3, 0.0, 10.0, 1.0);
    AgentState one = utility_estimate_update(st, 1, 3.0);
    CHECK(one.r_hat[1] == Catch::Approx(3.0));  // lambda = 1 on first visit
    CHECK(one.r_hat[0] == 0.0);
    CHECK(one.visits[1] == 1);
    CHECK(one.t == 1);
    CHECK_THROWS_AS(utility_estimate_update(st, 9, 1.0), ParameterError);

    // fixed point under constant payoffs: (e^{mu u} - 1)/mu
    double mu = -0.6, u = 2.0;
    AgentState rs = AgentState::make(1, mu, 10.0, 1.0);
    for (int i = 0; i < 4000; ++i) rs = utility_estimate_update(rs, 0, u);
    CHECK(rs.r_hat[0] == Catch::Approx(std::expm1(mu * u) / mu).margin(1e-6));

    // batch oracle with lambda_t = 1/t: running average of the transformed
    // innovations
    Rng rng(6, "test/utility-batch");
    AgentState acc = AgentState::make(1, mu, 10.0, 1.0);
    double batch = 0.0;
    for (int t = 1; t <= 300; ++t) {
        double payoff = rng.uniform(0.0, 5.0);
        acc = utility_estimate_update(acc, 0, payoff);
        batch += std::expm1(mu * payoff) / mu;
        CHECK(std::abs(acc.r_hat[0] - batch / t) < 1e-9);
    }
}

TEST_CASE("strategy update") {
    AgentState st = AgentState::make(4, 0.0, 1.0);
    st.r_hat = {0.7, 0.7, 0.7, 0.7};
    st = strategy_update(st);
    for (double p : st.probs) CHECK(p == Catch::Approx(0.25).margin(1e-12));

    AgentState two = AgentState::make(2, 0.0, 1.0);
    two.r_hat = {0.0, std::log(2.0)};
    two = strategy_update(two);
    CHECK(two.probs[0] == Catch::Approx(1.0 / 3.0).margin(1e-12));
    CHECK(two.probs[1] == Catch::Approx(2.0 / 3.0).margin(1e-12));

    // kappa -> infinity concentrates on the argmax, ties split uniformly
    AgentState sharp = AgentState::make(3, 0.0, 1e9);
    sharp.r_hat = {0.2, 0.9, 0.9};
    sharp = strategy_update(sharp);
    CHECK(sharp.probs[0] < 1e-12);
    CHECK(sharp.probs[1] == Catch::Approx(0.5));
    CHECK(sharp.probs[2] == Catch::Approx(0.5));

    // probabilities stay a distribution under arbitrary update sequences
    Rng rng(7, "test/strategy-dist");
    AgentState s = AgentState::make(5, -0.4, 30.0);
    for (int i = 0; i < 2000; ++i) {
        s = utility_estimate_update(s, rng.uniform_index(5), rng.uniform(0.0, 8.0));
        s = strategy_update(s);
        double total = 0.0;
        for (double p : s.probs) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("rate ccdf") {
    SampleSet xs{1.0, 2.0, 3.0, 4.0};
    auto table = rate_ccdf(xs, {0.5, 2.5, 9.0});
    CHECK(table[0].second == 1.0);
    CHECK(table[1].second == 0.5);
    CHECK(table[2].second == 0.0);
}

namespace {

MmwaveScenario single_link_scenario() {
    MmwaveScenario sc;
    sc.sc_pos = {{0.0, 0.0}};
    sc.ue_pos = {{25.0, 0.0}};
    sc.blockage_decay_per_m = 0.0;  // always LOS
    sc.pointing_sigma_rad = 0.0;    // no misalignment
    sc.grid.beamwidths_rad = {0.3};
    sc.grid.powers_dbm = {20.0};
    return sc;
}

}  // namespace

TEST_CASE("single link matches the hand link budget") {
    MmwaveScenario sc = single_link_scenario();
    MmwaveResult res = simulate_mmwave(sc, Scheme::BL1, 50, 42);
    REQUIRE_FALSE(res.summary.empty);

    // budget recomputed from the documented model
    double g_tx = std::min(2.0 * kPi / 0.3, 64.0);
    double g_rx = 4.0;
    double pl = 61.4 + 20.0 * std::log10(25.0);
    double noise_dbm = -174.0 + 10.0 * std::log10(1e9) + 10.0;
    double sig_dbm = 20.0 + 10.0 * std::log10(g_tx * g_rx) - pl;
    double snr = std::pow(10.0, (sig_dbm - noise_dbm) / 10.0);
    double rate = std::log2(1.0 + snr);

    for (double r : res.rates_gbps.values)
        CHECK(r == Catch::Approx(rate).epsilon(1e-9));
    CHECK(res.summary.variance == Catch::Approx(0.0).margin(1e-18));
}

TEST_CASE("zero episodes flagged") {
    MmwaveResult res = simulate_mmwave(single_link_scenario(), Scheme::RSL, 0, 1);
    CHECK(res.rates_gbps.empty());
    CHECK(res.summary.empty);
}

TEST_CASE("scheme parsing") {
    CHECK(scheme_from_string("rsl") == Scheme::RSL);
    CHECK(scheme_from_string("CSL") == Scheme::CSL);
    CHECK_THROWS_AS(scheme_from_string("nope"), ParameterError);
}

TEST_CASE("simulation is bit-reproducible") {
    MmwaveScenario sc = MmwaveScenario::random_topology(400.0, 24.0, 25.0, 11);
    MmwaveResult a = simulate_mmwave(sc, Scheme::RSL, 600, 5);
    MmwaveResult b = simulate_mmwave(sc, Scheme::RSL, 600, 5);
    CHECK(a.rates_gbps.values == b.rates_gbps.values);
}

TEST_CASE("mu to zero reduces RSL to CSL on a shared stream") {
    MmwaveScenario sc = MmwaveScenario::random_topology(400.0, 24.0, 25.0, 12);
    sc.mu_rsl = 0.0;
    sc.kappa_rsl = sc.kappa_csl;
    MmwaveResult rsl_run = simulate_mmwave(sc, Scheme::RSL, 800, 9);
    MmwaveResult csl_run = simulate_mmwave(sc, Scheme::CSL, 800, 9);
    CHECK(rsl_run.rates_gbps.values == csl_run.rates_gbps.values);
}

TEST_CASE("risk-sensitive agents concentrate the rate distribution") {
    // one fixed seed here; the acceptance suite sweeps twenty
    MmwaveScenario sc = MmwaveScenario::random_topology(500.0, 24.0, 25.0, 301);
    const std::uint64_t episodes = 6000;
    double var_rsl = simulate_mmwave(sc, Scheme::RSL, episodes, 301).summary.variance;
    double var_csl = simulate_mmwave(sc, Scheme::CSL, episodes, 301).summary.variance;
    double var_bl1 = simulate_mmwave(sc, Scheme::BL1, episodes, 301).summary.variance;
    CHECK(var_rsl < var_csl);
    CHECK(var_rsl < var_bl1);
}
