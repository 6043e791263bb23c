#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tailrisk/errors.hpp"
#include "tailrisk/evt.hpp"
#include "tailrisk/rng.hpp"
#include "tailrisk/sample_set.hpp"
#include "tailrisk/snc.hpp"

namespace tailrisk::mec {

// Task-queue control problem: keep the threshold-violation probability and
// the mean/second moment of the excess queue length within bounds while
// spending as little power as possible.
//
// Defaults come from an uncontrolled full-service pilot at 80% load: the
// local CPU serves 1 bit/slot at f_max, the offload link 2.91 bits/slot
// (the mean Shannon rate of a Rayleigh channel at mean SNR 10), arrivals
// are 0.8x that capacity, and the threshold sits a safety margin above the
// pilot's 99.9% queue quantile of ~14.6 bits. The GPD moment bounds are
// deliberately slack for the default (the report still verifies them);
// tight bounds are exercised in the tests.
struct MecConfig {
    double arrival_mean_bits = 3.13;  // Poisson arrivals per slot
    double threshold_bits = 16.5;     // d
    double epsilon = 5e-3;            // tolerable violation probability
    double sigma_th = 30.0;           // GPD scale bound
    double xi_th = 0.0;               // GPD shape bound, < 1/2

    double cpu_max_cycles = 1000.0;  // f_max, cycles/slot
    double cycles_per_bit = 1000.0;
    snc::ServiceModel offload = snc::ConstantService{2.91};

    double penalty_weight = 5.0;  // V
    double kappa_cpu = 1e-9;      // power = kappa_cpu f^3 (f in cycles/slot)
    double tx_power = 0.4;        // offload power cost per slot
    // virtual-queue pressure weights in the controller objective
    double q1_weight = 100.0;
    double q2_weight = 1.0;
    double q3_weight = 0.02;

    int freq_levels = 11;
    std::uint64_t horizon = 1000000;
    double warmup_fraction = 0.1;
    std::uint64_t seed = 1;
};

inline void require_valid(const MecConfig& cfg) {
    if (!(cfg.threshold_bits > 0.0)) throw ParameterError("mec: threshold d must be > 0");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw ParameterError("mec: epsilon must lie in (0, 1)");
    if (!(cfg.xi_th < 0.5)) throw ParameterError("mec: xi_th must be < 1/2");
    if (!(cfg.sigma_th > 0.0)) throw ParameterError("mec: sigma_th must be > 0");
    if (!(cfg.penalty_weight > 0.0)) throw ParameterError("mec: V must be > 0");
    if (!(cfg.cpu_max_cycles >= 0.0) || !(cfg.cycles_per_bit > 0.0))
        throw ParameterError("mec: CPU capability must be non-negative");
    if (cfg.freq_levels < 2) throw ParameterError("mec: needs at least two frequency levels");
}

// Bound on the conditional mean excess implied by (sigma_th, xi_th).
inline double mean_excess_bound(const MecConfig& cfg) {
    return cfg.sigma_th / (1.0 - cfg.xi_th);
}

// Bound on the conditional second moment of the excess.
inline double second_moment_bound(const MecConfig& cfg) {
    return 2.0 * cfg.sigma_th * cfg.sigma_th /
           ((1.0 - cfg.xi_th) * (1.0 - 2.0 * cfg.xi_th));
}

struct MecState {
    double x = 0.0;   // task queue, bits
    double q1 = 0.0;  // violation-probability virtual queue
    double q2 = 0.0;  // mean-excess virtual queue
    double q3 = 0.0;  // second-moment virtual queue
    std::uint64_t t = 0;
};

struct MecDecision {
    double freq = 0.0;     // local CPU cycles/slot, in [0, f_max]
    bool offload = false;
};

inline double decision_power(const MecConfig& cfg, const MecDecision& d) {
    return cfg.kappa_cpu * d.freq * d.freq * d.freq + (d.offload ? cfg.tx_power : 0.0);
}

// One slot of the queue recursion plus the indicator-gated virtual-queue
// updates. The offloaded bits for the slot are drawn by the caller from the
// service model.
inline MecState mec_step(const MecState& st, const MecConfig& cfg, double arrival_bits,
                         const MecDecision& d, double offload_bits_available) {
    if (!(d.freq >= 0.0 && d.freq <= cfg.cpu_max_cycles + 1e-9))
        throw ParameterError("mec decision: frequency outside [0, f_max]");
    if (!(arrival_bits >= 0.0)) throw ParameterError("mec: arrivals must be >= 0");

    double service = d.freq / cfg.cycles_per_bit +
                     (d.offload ? offload_bits_available : 0.0);
    MecState out = st;
    out.x = std::max(0.0, st.x + arrival_bits - service);
    double indicator = out.x > cfg.threshold_bits ? 1.0 : 0.0;
    double y = out.x - cfg.threshold_bits;
    out.q1 = std::max(0.0, st.q1 + indicator - cfg.epsilon);
    out.q2 = std::max(0.0, st.q2 + indicator * (y - mean_excess_bound(cfg)));
    out.q3 = std::max(0.0, st.q3 + indicator * (y * y - second_moment_bound(cfg)));
    out.t = st.t + 1;
    return out;
}

// Drift-plus-penalty control: minimize
//   V power(f, offload) + pressure (expected arrival - expected service)
// over the discretized feasible grid, with pressure the queue backlog plus
// the weighted virtual queues. Ties resolve to the cheaper decision.
inline MecDecision mec_controller(const MecState& st, const MecConfig& cfg) {
    double pressure = st.x + cfg.q1_weight * st.q1 + cfg.q2_weight * st.q2 +
                      cfg.q3_weight * st.q3;
    double expected_offload = snc::service_mean_bits(cfg.offload);

    MecDecision best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int off = 0; off <= 1; ++off) {
        for (int k = 0; k < cfg.freq_levels; ++k) {
            MecDecision d;
            d.freq = cfg.cpu_max_cycles * static_cast<double>(k) /
                     static_cast<double>(cfg.freq_levels - 1);
            d.offload = off != 0;
            double service = d.freq / cfg.cycles_per_bit +
                             (d.offload ? expected_offload : 0.0);
            double obj = cfg.penalty_weight * decision_power(cfg, d) +
                         pressure * (cfg.arrival_mean_bits - service);
            if (obj < best_obj - 1e-15) {
                best_obj = obj;
                best = d;
            }
        }
    }
    return best;
}

struct QueueTrace {
    std::vector<double> x;
    std::vector<double> q1, q2, q3;
    std::vector<double> freq;
    std::vector<std::uint8_t> offload;
    std::uint64_t warmup = 0;  // leading slots to discard in analyses
};

struct ConstraintReport {
    double violation_freq = 0.0;
    bool meets_epsilon = false;

    bool excess_empty = true;  // no exceedances observed after warmup
    double cond_mean_excess = 0.0;
    double mean_bound = 0.0;
    bool meets_mean = false;
    double cond_second_moment_excess = 0.0;
    double second_bound = 0.0;
    bool meets_second = false;

    // final virtual-queue values and their post-warmup running averages
    double q_final[3] = {0.0, 0.0, 0.0};
    double q_avg[3] = {0.0, 0.0, 0.0};
    std::uint64_t measured_slots = 0;
};

struct MecRunResult {
    QueueTrace trace;
    ConstraintReport report;
};

// Simulates the controlled queue for the configured horizon. Statistics are
// over the post-warmup window; the trace carries every slot. Deterministic
// by seed (named arrival and offload streams).
inline MecRunResult mec_run(const MecConfig& cfg) {
    require_valid(cfg);
    Rng arr_rng(cfg.seed, "mec/arrivals");
    Rng off_rng(cfg.seed, "mec/offload");

    const std::uint64_t warmup = static_cast<std::uint64_t>(
        cfg.warmup_fraction * static_cast<double>(cfg.horizon));
    if (cfg.horizon < 1 || warmup >= cfg.horizon)
        throw ParameterError("mec: horizon must exceed the warmup window");

    MecRunResult out;
    out.trace.warmup = warmup;
    out.trace.x.reserve(cfg.horizon);

    MecState st;
    std::uint64_t violations = 0, measured = 0;
    double sum_y = 0.0, sum_y2 = 0.0;
    double acc_q1 = 0.0, acc_q2 = 0.0, acc_q3 = 0.0;

    const bool rayleigh = std::holds_alternative<snc::RayleighService>(cfg.offload);
    const double mean_snr =
        rayleigh ? std::get<snc::RayleighService>(cfg.offload).mean_snr : 0.0;
    const double const_bits =
        rayleigh ? 0.0 : std::get<snc::ConstantService>(cfg.offload).bits_per_slot;

    for (std::uint64_t t = 0; t < cfg.horizon; ++t) {
        MecDecision d = mec_controller(st, cfg);
        double arrival = static_cast<double>(arr_rng.poisson(cfg.arrival_mean_bits));
        // the offload channel fades regardless of whether it is used
        double offload_bits =
            rayleigh ? std::log2(1.0 + off_rng.exponential(mean_snr)) : const_bits;
        st = mec_step(st, cfg, arrival, d, offload_bits);

        out.trace.x.push_back(st.x);
        out.trace.q1.push_back(st.q1);
        out.trace.q2.push_back(st.q2);
        out.trace.q3.push_back(st.q3);
        out.trace.freq.push_back(d.freq);
        out.trace.offload.push_back(d.offload ? 1 : 0);

        if (t >= warmup) {
            ++measured;
            if (st.x > cfg.threshold_bits) {
                ++violations;
                double y = st.x - cfg.threshold_bits;
                sum_y += y;
                sum_y2 += y * y;
            }
            acc_q1 += st.q1;
            acc_q2 += st.q2;
            acc_q3 += st.q3;
        }
    }

    ConstraintReport& rep = out.report;
    rep.measured_slots = measured;
    rep.violation_freq = static_cast<double>(violations) / static_cast<double>(measured);
    rep.meets_epsilon = rep.violation_freq <= cfg.epsilon;
    rep.mean_bound = mean_excess_bound(cfg);
    rep.second_bound = second_moment_bound(cfg);
    if (violations > 0) {
        rep.excess_empty = false;
        rep.cond_mean_excess = sum_y / static_cast<double>(violations);
        rep.cond_second_moment_excess = sum_y2 / static_cast<double>(violations);
        rep.meets_mean = rep.cond_mean_excess <= rep.mean_bound;
        rep.meets_second = rep.cond_second_moment_excess <= rep.second_bound;
    } else {
        rep.meets_mean = true;
        rep.meets_second = true;
    }
    rep.q_final[0] = st.q1;
    rep.q_final[1] = st.q2;
    rep.q_final[2] = st.q3;
    rep.q_avg[0] = acc_q1 / static_cast<double>(measured);
    rep.q_avg[1] = acc_q2 / static_cast<double>(measured);
    rep.q_avg[2] = acc_q3 / static_cast<double>(measured);
    return out;
}

struct TailAnalysis {
    std::vector<std::pair<double, double>> ccdf;  // queue length survival
    evt::GpdParams fit;
    double ks_distance = 0.0;
    std::size_t n_excesses = 0;
};

// Fits a GPD to the post-warmup queue-length excesses over d and reports the
// Kolmogorov-Smirnov distance between the empirical excess CDF and the fit.
inline TailAnalysis mec_tail_analysis(const QueueTrace& trace, double d) {
    if (trace.x.size() <= trace.warmup)
        throw SampleError("mec_tail_analysis: trace has no post-warmup samples");
    SampleSet post;
    post.values.assign(trace.x.begin() + static_cast<std::ptrdiff_t>(trace.warmup),
                       trace.x.end());

    TailAnalysis out;
    SampleSet excesses = evt::pot_excesses(post, d);
    out.n_excesses = excesses.size();
    out.fit = evt::fit_gpd(excesses);
    out.fit.threshold = d;

    std::vector<double> s = sorted_values(excesses);
    double n = static_cast<double>(s.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double f = evt::gpd_cdf(s[i], out.fit);
        double hi = static_cast<double>(i + 1) / n;
        double lo = static_cast<double>(i) / n;
        ks = std::max(ks, std::max(std::abs(hi - f), std::abs(f - lo)));
    }
    out.ks_distance = ks;

    // queue-length survival on a grid up to the maximum observed value
    double mx = *std::max_element(post.values.begin(), post.values.end());
    std::vector<double> sorted_x = sorted_values(post);
    int points = 200;
    for (int i = 0; i <= points; ++i) {
        double g = mx * static_cast<double>(i) / static_cast<double>(points);
        std::size_t idx = static_cast<std::size_t>(
            std::upper_bound(sorted_x.begin(), sorted_x.end(), g) - sorted_x.begin());
        out.ccdf.emplace_back(
            g, static_cast<double>(sorted_x.size() - idx) / static_cast<double>(sorted_x.size()));
    }
    return out;
}

}  // namespace tailrisk::mec
