#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tailrisk/numerics.hpp"
#include "tailrisk/rng.hpp"
#include "tailrisk/snc.hpp"

using namespace tailrisk;
using namespace tailrisk::snc;

TEST_CASE("effective bandwidth closed forms") {
    CHECK(effective_bandwidth(deterministic_arrivals(3.0), 0.7) == Catch::Approx(3.0));
    CHECK(effective_bandwidth(poisson_arrivals(1.0), 1.0) ==
          Catch::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    // Bernoulli(1/2) at theta = ln 3: log(0.5 + 0.5 * 3)/ln 3 = ln 2 / ln 3
    CHECK(effective_bandwidth(bernoulli_arrivals(0.5), std::log(3.0)) ==
          Catch::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(effective_bandwidth(poisson_arrivals(1.0), 0.0), ParameterError);
}

TEST_CASE("log-MGFs vanish at zero and are midpoint convex") {
    for (const LogMgf& lam :
         {poisson_arrivals(2.0), bernoulli_arrivals(0.3, 4.0), deterministic_arrivals(1.5)}) {
        CHECK(std::abs(lam.lambda(0.0)) < 1e-12);
        for (double a = -2.0; a <= 4.0; a += 0.5) {
            for (double b = a + 0.25; b <= 4.5; b += 0.75) {
                double mid = lam.lambda(0.5 * (a + b));
                CHECK(mid <= 0.5 * (lam.lambda(a) + lam.lambda(b)) + 1e-10);
            }
        }
    }
}

TEST_CASE("effective bandwidth is monotone and sandwiched") {
    for (const LogMgf& lam :
         {poisson_arrivals(2.0), bernoulli_arrivals(0.3, 4.0), deterministic_arrivals(1.5)}) {
        double prev = 0.0;
        for (double th = 0.05; th <= 5.0; th += 0.05) {
            double eb = effective_bandwidth(lam, th);
            CHECK(eb >= prev - 1e-12);
            CHECK(eb >= lam.mean_rate - 1e-12);
            CHECK(eb <= lam.peak_rate + 1e-12);
            prev = eb;
        }
    }
}

TEST_CASE("decay rate for Poisson arrivals") {
    DecayResult r = decay_rate(poisson_arrivals(1.0), 2.0);
    CHECK_FALSE(r.zero_tail);
    // oracle: the root must satisfy e^theta = 1 + 2 theta to full precision
    CHECK(std::abs(std::exp(r.theta_star) - (1.0 + 2.0 * r.theta_star)) < 1e-9);
    CHECK(std::abs(r.theta_star - 1.25643) < 1e-5);

    CHECK(decay_rate(deterministic_arrivals(1.0), 2.0).zero_tail);
    CHECK_THROWS_AS(decay_rate(poisson_arrivals(1.0), 1.0), InstabilityError);
}

TEST_CASE("legendre transform") {
    LogMgf gaussian{[](double th) { return 0.5 * th * th; },
                    std::numeric_limits<double>::infinity(), 0.0,
                    std::numeric_limits<double>::infinity()};
    CHECK(legendre(gaussian, 1.0).value == Catch::Approx(0.5).margin(1e-9));

    LogMgf det = deterministic_arrivals(2.0);
    CHECK(legendre(det, 2.0).value == Catch::Approx(0.0).margin(1e-9));
    CHECK(legendre(det, 3.0).unbounded);
    CHECK(legendre(det, 1.0).unbounded);

    // Poisson(1) at alpha = 2: stationary point e^theta = alpha
    LogMgf poi = poisson_arrivals(1.0);
    double theta_hat = std::log(2.0);
    double oracle = theta_hat * 2.0 - (std::exp(theta_hat) - 1.0);
    CHECK(legendre(poi, 2.0).value == Catch::Approx(oracle).margin(1e-9));
    CHECK(oracle == Catch::Approx(2.0 * std::log(2.0) - 1.0));

    // convex, non-negative, zero at the mean rate
    double prev_slope = -std::numeric_limits<double>::infinity();
    double last = 0.0;
    bool first = true;
    for (double a = 0.2; a <= 3.0; a += 0.2) {
        double v = legendre(poi, a).value;
        CHECK(v >= -1e-10);
        if (!first) {
            double slope = (v - last) / 0.2;
            CHECK(slope >= prev_slope - 1e-7);
            prev_slope = slope;
        }
        last = v;
        first = false;
    }
    CHECK(legendre(poi, 1.0).value == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("mellin transforms") {
    CHECK(mellin(ConstantValue{4.0}, 3.0) == Catch::Approx(16.0));
    CHECK(mellin(ConstantValue{9.0}, 1.0) == Catch::Approx(1.0));
    CHECK(mellin(ShiftedExpSnr{2.5}, 1.0) == Catch::Approx(1.0).margin(1e-10));

    // closed form at s = 0, mean 1: e * E1(1)
    CHECK(mellin(ShiftedExpSnr{1.0}, 0.0) == Catch::Approx(0.596347).margin(1e-6));
    CHECK_THROWS_AS(mellin(ConstantValue{0.0}, 2.0), DomainError);
    CHECK_THROWS_AS(mellin(ShiftedExpSnr{-1.0}, 2.0), DomainError);

    // quadrature oracle across the range the kernel search uses
    for (double gbar : {0.5, 2.0, 10.0}) {
        for (double s : {-4.0, -1.5, -0.25, 0.0, 0.4, 0.9, 1.0, 1.3}) {
            double closed = mellin(ShiftedExpSnr{gbar}, s);
            double direct = mellin_quadrature(ShiftedExpSnr{gbar}, s, 1e-11);
            CHECK(std::abs(closed - direct) <= 1e-8 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST_CASE("steady-state kernel") {
    // constant arrival rho, constant service c: degenerate Mellins reduce to
    //   e^{-s w c ln2} / (1 - e^{-s (c - rho) ln2})
    ArrivalEnvelope env{1.0, 0.0};
    ServiceModel svc = ConstantService{2.0};
    for (double s : {0.1, 0.5, 2.0}) {
        for (double w : {0.0, 1.0, 5.0}) {
            double expected = std::exp(-s * w * 2.0 * kLn2) /
                              (1.0 - std::exp(-s * (2.0 - 1.0) * kLn2));
            CHECK(steady_kernel(s, w, env, svc) == Catch::Approx(expected).epsilon(1e-12));
        }
    }
    // w = 0 collapses to 1/(1 - product)
    double prod = stability_product(env, svc, 0.3);
    CHECK(steady_kernel(0.3, 0.0, env, svc) == Catch::Approx(1.0 / (1.0 - prod)));

    // instability carries the offending product
    ArrivalEnvelope heavy{3.0, 0.0};
    try {
        steady_kernel(0.5, 1.0, heavy, svc);
        FAIL("expected instability");
    } catch (const InstabilityError& e) {
        CHECK(e.offending_value >= 1.0);
    }
}

TEST_CASE("delay violation bound behaviour") {
    // deterministic system: essentially zero bound at large w
    CHECK(delay_violation_bound(50.0, {1.0, 0.0}, ConstantService{2.0}).bound < 1e-6);

    // Rayleigh service: non-increasing in w, non-increasing in capacity
    ArrivalEnvelope env{1.0, 0.0};
    double prev = 1.0;
    for (int w = 1; w <= 10; ++w) {
        double b = delay_violation_bound(w, env, RayleighService{10.0}).bound;
        CHECK(b <= prev + 1e-12);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        prev = b;
    }
    double weak = delay_violation_bound(4, env, RayleighService{5.0}).bound;
    double strong = delay_violation_bound(4, env, RayleighService{10.0}).bound;
    CHECK(strong <= weak + 1e-12);
}

TEST_CASE("queue simulation basics") {
    auto zero = [](Rng&) { return 0.0; };
    auto one = [](Rng&) { return 1.0; };
    QueueSimResult idle = queue_sim(zero, one, 1000, 3);
    for (double q : idle.queue) CHECK(q == 0.0);
    for (double d : idle.delays) CHECK(d == 0.0);

    // a = c: exact cancellation keeps the queue at its initial value
    QueueSimResult tight = queue_sim(one, one, 1000, 3);
    for (double q : tight.queue) CHECK(q == 0.0);
    for (double d : tight.delays) CHECK(d == 0.0);
}

TEST_CASE("queue tail slope matches the decay rate") {
    auto poisson1 = [](Rng& rng) { return static_cast<double>(rng.poisson(1.0)); };
    auto const2 = [](Rng&) { return 2.0; };
    QueueSimResult res = queue_sim(poisson1, const2, 1000000, 17, 0.1);

    std::vector<double> q = res.queue;
    std::sort(q.begin(), q.end());
    double n = static_cast<double>(q.size());
    // log-survival regression over the well-populated part of the tail
    std::vector<std::pair<double, double>> pts;
    for (double x = 1.0; x <= 40.0; x += 1.0) {
        std::size_t idx = static_cast<std::size_t>(
            std::upper_bound(q.begin(), q.end(), x) - q.begin());
        double surv = (n - static_cast<double>(idx)) / n;
        if (surv < 2e-5) break;
        pts.emplace_back(x, std::log(surv));
    }
    REQUIRE(pts.size() >= 4);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double m = static_cast<double>(pts.size());
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double theta_star = decay_rate(poisson_arrivals(1.0), 2.0).theta_star;
    CHECK(std::abs(-slope - theta_star) / theta_star < 0.10);
}

TEST_CASE("simulated violations stay below the SNC bound") {
    // one cell of the bound-validity matrix at reduced length; the full grid
    // runs in the acceptance suite
    ArrivalEnvelope env{1.0, 0.0};
    RayleighService svc{10.0};
    auto arr = [](Rng&) { return 1.0; };
    auto ray = [](Rng& rng) { return std::log2(1.0 + rng.exponential(10.0)); };
    QueueSimResult res = queue_sim(arr, ray, 200000, 23, 0.1);
    for (int w = 1; w <= 10; ++w) {
        double bound = delay_violation_bound(w, env, svc).bound;
        CHECK(res.violation_frequency(w) <= bound + 1e-12);
    }
}
