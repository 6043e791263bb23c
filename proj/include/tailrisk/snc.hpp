#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tailrisk/errors.hpp"
#include "tailrisk/numerics.hpp"
#include "tailrisk/rng.hpp"
#include "tailrisk/sample_set.hpp"
#include "tailrisk/special.hpp"

namespace tailrisk::snc {

inline constexpr double kLn2 = 0.6931471805599453;

// (sigma, rho) envelope on the arrival log-MGF: burst sigma (bits) plus
// rate rho (bits/slot).
struct ArrivalEnvelope {
    double rho = 0.0;
    double sigma = 0.0;
};

inline void require_valid(const ArrivalEnvelope& e) {
    if (!(e.rho >= 0.0) || !(e.sigma >= 0.0))
        throw ParameterError("arrival envelope: rho and sigma must be >= 0");
}

// Log-MGF of a single-slot arrival increment, theta -> log E[e^{theta a}],
// together with the statistics the root finders need.
struct LogMgf {
    std::function<double(double)> lambda;
    double theta_max = std::numeric_limits<double>::infinity();  // open bound
    double mean_rate = 0.0;  // Lambda'(0+)
    double peak_rate = 0.0;  // sup of a single-slot arrival (may be inf)
};

inline LogMgf deterministic_arrivals(double a) {
    if (!(a >= 0.0)) throw ParameterError("deterministic arrivals: a must be >= 0");
    return LogMgf{[a](double th) { return th * a; },
                  std::numeric_limits<double>::infinity(), a, a};
}

inline LogMgf poisson_arrivals(double mean) {
    if (!(mean > 0.0)) throw ParameterError("poisson arrivals: mean must be > 0");
    return LogMgf{[mean](double th) { return mean * std::expm1(th); },
                  std::numeric_limits<double>::infinity(), mean,
                  std::numeric_limits<double>::infinity()};
}

// Bernoulli(p) arrivals of `batch` bits per success.
inline LogMgf bernoulli_arrivals(double p, double batch = 1.0) {
    if (!(p > 0.0 && p < 1.0))
        throw ParameterError("bernoulli arrivals: p must lie in (0, 1)");
    if (!(batch > 0.0)) throw ParameterError("bernoulli arrivals: batch must be > 0");
    return LogMgf{[p, batch](double th) {
                      // log(1 - p + p e^{th b}), stable for large th b
                      double e = th * batch;
                      if (e > 30.0) return e + std::log(p + (1.0 - p) * std::exp(-e));
                      return std::log1p(p * std::expm1(e));
                  },
                  std::numeric_limits<double>::infinity(), p * batch, batch};
}

inline LogMgf empirical_arrivals(SampleSet xs) {
    require_samples(xs, "empirical arrivals");
    double mean = sample_mean(xs);
    double peak = *std::max_element(xs.values.begin(), xs.values.end());
    return LogMgf{[xs = std::move(xs)](double th) {
                      double mx = -std::numeric_limits<double>::infinity();
                      for (double x : xs.values) mx = std::max(mx, th * x);
                      double acc = 0.0;
                      for (double x : xs.values) acc += std::exp(th * x - mx);
                      return mx + std::log(acc / static_cast<double>(xs.size()));
                  },
                  std::numeric_limits<double>::infinity(), mean, peak};
}

// Effective bandwidth Lambda(theta)/theta.
inline double effective_bandwidth(const LogMgf& lam, double theta) {
    if (!(theta > 0.0))
        throw ParameterError("effective_bandwidth: theta must be > 0");
    if (theta >= lam.theta_max)
        throw ParameterError("effective_bandwidth: theta outside the MGF domain");
    return lam.lambda(theta) / theta;
}

struct DecayResult {
    double theta_star = 0.0;
    // true when capacity meets or exceeds the peak arrival rate, so the
    // queue never violates and there is no positive root
    bool zero_tail = false;
};

// Queue-tail decay rate for constant capacity c: the unique positive root of
// Lambda(theta) = c theta, found by bisection (effective bandwidth is
// non-decreasing in theta).
inline DecayResult decay_rate(const LogMgf& lam, double capacity) {
    if (!(capacity > lam.mean_rate))
        throw InstabilityError(
            "decay_rate: capacity must exceed the mean arrival rate", lam.mean_rate);
    if (capacity >= lam.peak_rate) return DecayResult{0.0, true};

    auto g = [&](double th) { return lam.lambda(th) - capacity * th; };
    double hi = 1.0;
    const double cap = std::isfinite(lam.theta_max) ? lam.theta_max * (1.0 - 1e-12)
                                                    : 1e8;
    while (g(hi) < 0.0) {
        hi *= 2.0;
        if (hi > cap)
            throw DomainError("decay_rate: no root below the MGF domain bound");
    }
    double root = bisect_root(g, hi * 1e-12, hi, 1e-10);
    return DecayResult{root, false};
}

struct LegendreResult {
    double value = 0.0;
    bool unbounded = false;  // supremum flagged infinite
};

// Legendre transform sup_theta [theta alpha - Lambda(theta)], by golden
// section on a bracket grown adaptively in both directions.
inline LegendreResult legendre(const LogMgf& lam, double alpha) {
    auto h = [&](double th) {
        if (th >= lam.theta_max) return -std::numeric_limits<double>::infinity();
        return th * alpha - lam.lambda(th);
    };
    const double cap = 1e8;
    double lo = -1.0, hi = 1.0;
    double h0 = h(0.0);
    while (h(hi) >= std::max(h0, h(hi * 0.5)) && hi < cap) hi *= 2.0;
    while (h(lo) >= std::max(h0, h(lo * 0.5)) && lo > -cap) lo *= 2.0;
    if (hi >= cap || lo <= -cap) {
        double edge = hi >= cap ? h(std::min(hi, lam.theta_max * (1 - 1e-12))) : h(lo);
        if (edge > 1e6) return LegendreResult{std::numeric_limits<double>::infinity(), true};
    }
    hi = std::min(hi, std::isfinite(lam.theta_max) ? lam.theta_max * (1.0 - 1e-12) : hi);
    MinResult m = golden_section_min([&](double th) { return -h(th); }, lo, hi, 1e-13);
    return LegendreResult{-m.value, false};
}

// Mellin-transformable distributions for SNR-domain processes.
struct ConstantValue {
    double k = 1.0;  // point mass, k > 0
};

// X = 1 + gamma with gamma ~ Exp(mean mean_snr): the SNR-domain service of a
// Rayleigh-faded Shannon-rate channel.
struct ShiftedExpSnr {
    double mean_snr = 1.0;
};

using MellinDist = std::variant<ConstantValue, ShiftedExpSnr>;

// Mellin transform M_X(s) = E[X^{s-1}] of a nonnegative random variable.
// Closed form where available; the ShiftedExpSnr form is
// e^{1/gbar} gbar^{s-1} Gamma(s, 1/gbar).
inline double mellin(const MellinDist& dist, double s) {
    if (std::holds_alternative<ConstantValue>(dist)) {
        double k = std::get<ConstantValue>(dist).k;
        if (!(k > 0.0)) throw DomainError("mellin: constant must be > 0");
        return std::pow(k, s - 1.0);
    }
    double gbar = std::get<ShiftedExpSnr>(dist).mean_snr;
    if (!(gbar > 0.0)) throw DomainError("mellin: mean SNR must be > 0");
    double x = 1.0 / gbar;
    return std::exp(x + (s - 1.0) * std::log(gbar)) * gamma_upper(s, x);
}

// Quadrature evaluation of the same transform; cross-check for the closed
// forms and fallback for tests.
inline double mellin_quadrature(const MellinDist& dist, double s,
                                double rel_tol = 1e-10) {
    if (std::holds_alternative<ConstantValue>(dist))
        return std::pow(std::get<ConstantValue>(dist).k, s - 1.0);
    double gbar = std::get<ShiftedExpSnr>(dist).mean_snr;
    double upper = gbar * (60.0 + 10.0 * std::abs(s));
    return integrate(
        [gbar, s](double g) {
            return std::pow(1.0 + g, s - 1.0) * std::exp(-g / gbar) / gbar;
        },
        0.0, upper, rel_tol);
}

// Per-slot service model: constant rate in bits/slot, or Rayleigh-faded
// Shannon service g(gamma) = log2(1 + gamma) bits/slot.
struct ConstantService {
    double bits_per_slot = 1.0;
};

struct RayleighService {
    double mean_snr = 1.0;
};

using ServiceModel = std::variant<ConstantService, RayleighService>;

// Mellin transform of the per-slot SNR-domain service increment under the
// bit -> SNR convention X = e^{(ln 2) X_bits}, which makes the Rayleigh
// Shannon-rate service transform exactly E[(1 + gamma)^{s-1}].
inline double service_mellin(const ServiceModel& svc, double s) {
    if (std::holds_alternative<ConstantService>(svc)) {
        double c = std::get<ConstantService>(svc).bits_per_slot;
        if (!(c >= 0.0)) throw ParameterError("service: rate must be >= 0");
        return std::exp((s - 1.0) * kLn2 * c);
    }
    return mellin(ShiftedExpSnr{std::get<RayleighService>(svc).mean_snr}, s);
}

inline double service_mean_bits(const ServiceModel& svc) {
    if (std::holds_alternative<ConstantService>(svc))
        return std::get<ConstantService>(svc).bits_per_slot;
    double gbar = std::get<RayleighService>(svc).mean_snr;
    // E[log2(1 + gamma)] = e^{1/gbar} E1(1/gbar) / ln 2
    return std::exp(1.0 / gbar) * expint_e1(1.0 / gbar) / kLn2;
}

// Per-slot Mellin bound at (1 + s) of the SNR-domain arrival process under
// the (sigma, rho) envelope: e^{s ln2 (rho + sigma)}.
inline double arrival_mellin_bound(const ArrivalEnvelope& env, double s) {
    require_valid(env);
    return std::exp(s * kLn2 * (env.rho + env.sigma));
}

inline double stability_product(const ArrivalEnvelope& env, const ServiceModel& svc,
                                double s) {
    return arrival_mellin_bound(env, s) * service_mellin(svc, 1.0 - s);
}

// log of the stability product, safe against overflow at large s; anything
// non-finite counts as unstable.
inline double stability_log_product(const ArrivalEnvelope& env, const ServiceModel& svc,
                                    double s) {
    if (std::holds_alternative<ConstantService>(svc)) {
        double c = std::get<ConstantService>(svc).bits_per_slot;
        return s * kLn2 * (env.rho + env.sigma) - s * kLn2 * c;
    }
    double ms = service_mellin(svc, 1.0 - s);
    double lp = s * kLn2 * (env.rho + env.sigma) + std::log(ms);
    return std::isfinite(lp) ? lp : std::numeric_limits<double>::infinity();
}

// Steady-state kernel M_g^w(1-s) / (1 - M_a(1+s) M_g(1-s)) for s > 0 under
// the stability condition M_a(1+s) M_g(1-s) < 1.
inline double steady_kernel(double s, double w, const ArrivalEnvelope& env,
                            const ServiceModel& svc) {
    if (!(s > 0.0)) throw ParameterError("steady_kernel: requires s > 0");
    if (!(w >= 0.0)) throw ParameterError("steady_kernel: requires delay w >= 0");
    double ms = service_mellin(svc, 1.0 - s);
    double product = arrival_mellin_bound(env, s) * ms;
    if (!(product < 1.0))
        throw InstabilityError("steady_kernel: stability product is not < 1", product);
    return std::pow(ms, w) / (1.0 - product);
}

struct DelayBound {
    double bound = 1.0;
    double s_star = 0.0;
};

// Delay-violation bound p_v(w) = inf_{s > 0} kernel(s, w), clamped to [0, 1].
// The stability boundary is located by bisection first, then a log-spaced
// grid plus golden-section refinement minimizes the kernel.
inline DelayBound delay_violation_bound(double w, const ArrivalEnvelope& env,
                                        const ServiceModel& svc) {
    require_valid(env);
    auto log_product = [&](double s) { return stability_log_product(env, svc, s); };

    // find some stable s; the log-product is 0 at s = 0 and dips negative
    // for small s exactly when the mean service exceeds rho + sigma
    double probe = 1e-3;
    double s_good = 0.0;
    for (int i = 0; i < 40 && s_good == 0.0; ++i, probe *= 2.0) {
        if (log_product(probe) < 0.0) s_good = probe;
        if (probe > 1e6) break;
    }
    if (s_good == 0.0) {
        for (probe = 1e-4; probe > 1e-12; probe *= 0.25)
            if (log_product(probe) < 0.0) {
                s_good = probe;
                break;
            }
    }
    if (s_good == 0.0)
        throw InstabilityError("delay_violation_bound: no stable s > 0 exists",
                               std::exp(log_product(1e-4)));

    const double s_cap = 1e4;
    double s_stab;
    double hi = s_good;
    while (hi < s_cap && log_product(hi) < 0.0) hi *= 2.0;
    if (hi >= s_cap) {
        s_stab = s_cap;  // stable everywhere we care about (constant service)
    } else {
        auto clipped = [&](double s) {
            double lp = log_product(s);
            return std::isfinite(lp) ? lp : 1e3;
        };
        s_stab = bisect_root(clipped, s_good, hi, 1e-12);
    }

    auto kernel_at = [&](double s) {
        double lp = log_product(s);
        if (!(lp < 0.0)) return std::numeric_limits<double>::infinity();
        double ms = service_mellin(svc, 1.0 - s);
        double k = std::pow(ms, w) / (-std::expm1(lp));
        return std::isfinite(k) ? k : std::numeric_limits<double>::infinity();
    };

    double lo = std::min(1e-4, s_stab * 1e-3);
    double t_lo = std::log(lo);
    double t_hi = std::log(s_stab * (1.0 - 1e-9));
    const int grid_n = 200;
    double best_t = t_lo;
    double best_k = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_n; ++i) {
        double t = t_lo + (t_hi - t_lo) * i / (grid_n - 1.0);
        double k = kernel_at(std::exp(t));
        if (k < best_k) {
            best_k = k;
            best_t = t;
        }
    }
    double dt = (t_hi - t_lo) / (grid_n - 1.0);
    MinResult m = golden_section_min(
        [&](double t) { return kernel_at(std::exp(t)); },
        std::max(t_lo, best_t - dt), std::min(t_hi, best_t + dt), 1e-12);

    DelayBound out;
    out.s_star = std::exp(m.x);
    out.bound = std::clamp(m.value, 0.0, 1.0);
    return out;
}

// Discrete-time Lindley queue trace with virtual FIFO delay measurement.
struct QueueSimResult {
    std::vector<double> queue;   // post-warmup queue lengths, one per slot
    std::vector<double> delays;  // per-slot virtual FIFO delay (slots); huge
                                 // sentinel for work still unserved at the end
    double mean_queue = 0.0;

    // fraction of measured slots whose virtual delay exceeds w
    double violation_frequency(double w) const {
        if (delays.empty()) return 0.0;
        std::size_t count = 0;
        for (double d : delays)
            if (d > w) ++count;
        return static_cast<double>(count) / static_cast<double>(delays.size());
    }
};

// Simulates q(t+1) = (q(t) + a(t+1) - c(t+1))^+ for T slots. The delay of
// slot t is the number of slots until cumulative departures cover all work
// that arrived up to t (0 if served within its own slot). Deterministic
// given the seed: arrivals and service each draw from their own named
// stream.
inline QueueSimResult queue_sim(const std::function<double(Rng&)>& arrival_sampler,
                                const std::function<double(Rng&)>& service_sampler,
                                std::uint64_t t_slots, std::uint64_t seed,
                                double warmup_fraction = 0.0) {
    if (t_slots < 1) throw ParameterError("queue_sim: needs at least one slot");
    Rng arr_rng(seed, "snc/queue/arrivals");
    Rng svc_rng(seed, "snc/queue/service");

    const std::uint64_t warmup =
        static_cast<std::uint64_t>(warmup_fraction * static_cast<double>(t_slots));
    QueueSimResult out;
    out.queue.reserve(t_slots - warmup);

    struct Marker {
        std::uint64_t slot;
        double remaining;
    };
    std::deque<Marker> pending;

    double q = 0.0;
    double acc = 0.0;
    for (std::uint64_t t = 0; t < t_slots; ++t) {
        double a = arrival_sampler(arr_rng);
        double c = service_sampler(svc_rng);
        pending.push_back({t, a});
        double capacity = c;
        while (!pending.empty() && capacity > 0.0) {
            Marker& m = pending.front();
            if (m.remaining <= capacity) {
                capacity -= m.remaining;
                if (m.slot >= warmup)
                    out.delays.push_back(static_cast<double>(t - m.slot));
                pending.pop_front();
            } else {
                m.remaining -= capacity;
                capacity = 0.0;
            }
        }
        // zero-bit markers left at the head have been fully covered
        while (!pending.empty() && pending.front().remaining <= 0.0) {
            if (pending.front().slot >= warmup)
                out.delays.push_back(static_cast<double>(t - pending.front().slot));
            pending.pop_front();
        }
        q = std::max(0.0, q + a - c);
        if (t >= warmup) {
            out.queue.push_back(q);
            acc += q;
        }
    }
    // whatever never finished counts as an unbounded delay
    for (const Marker& m : pending)
        if (m.slot >= warmup && m.remaining > 0.0)
            out.delays.push_back(std::numeric_limits<double>::infinity());
    if (!out.queue.empty()) out.mean_queue = acc / static_cast<double>(out.queue.size());
    return out;
}

}  // namespace tailrisk::snc
