#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "tailrisk/errors.hpp"
#include "tailrisk/evt.hpp"
#include "tailrisk/numerics.hpp"
#include "tailrisk/sample_set.hpp"

namespace tailrisk::risk {

// Confidence level: the measures below look at the worst alpha-fraction.
struct RiskLevel {
    double alpha = 0.05;
};

inline void require_valid(const RiskLevel& level) {
    if (!(level.alpha > 0.0 && level.alpha <= 1.0))
        throw ParameterError("risk level: alpha must lie in (0, 1]");
}

// Moment generating function handle. Stored as log M_X(z) for numerical
// range; M_X(0) = 1 corresponds to log_mgf(0) = 0. z_max is the open upper
// limit of the finite domain (may be infinite).
struct MgfHandle {
    std::function<double(double)> log_mgf;
    double z_max = std::numeric_limits<double>::infinity();

    static MgfHandle from_log_mgf(std::function<double(double)> f,
                                  double z_max = std::numeric_limits<double>::infinity()) {
        return MgfHandle{std::move(f), z_max};
    }

    static MgfHandle from_mgf(std::function<double(double)> f,
                              double z_max = std::numeric_limits<double>::infinity()) {
        return MgfHandle{[f = std::move(f)](double z) { return std::log(f(z)); }, z_max};
    }

    // Empirical MGF of a sample set, evaluated in log-sum-exp form; finite
    // for every z.
    static MgfHandle empirical(SampleSet xs) {
        require_samples(xs, "empirical mgf");
        return MgfHandle{[xs = std::move(xs)](double z) {
            double mx = -std::numeric_limits<double>::infinity();
            for (double x : xs.values) mx = std::max(mx, z * x);
            double acc = 0.0;
            for (double x : xs.values) acc += std::exp(z * x - mx);
            return mx + std::log(acc / static_cast<double>(xs.size()));
        }};
    }
};

// Value-at-risk: inf{t : P(X <= t) >= 1 - alpha}, i.e. the ceil((1-alpha) n)-th
// ascending order statistic of the sample.
inline double var_empirical(const SampleSet& xs, RiskLevel level) {
    require_samples(xs, "var_empirical");
    require_valid(level);
    std::vector<double> s = sorted_values(xs);
    double n = static_cast<double>(s.size());
    std::size_t k = static_cast<std::size_t>(std::ceil((1.0 - level.alpha) * n));
    if (k < 1) k = 1;
    if (k > s.size()) k = s.size();
    return s[k - 1];
}

// Conditional value-at-risk in the inf form
//   inf_t { t + E[(X - t)^+] / alpha };
// the infimum is attained at an order statistic, so candidates are scanned
// exactly over the sorted sample.
inline double cvar_empirical(const SampleSet& xs, RiskLevel level) {
    require_samples(xs, "cvar_empirical");
    require_valid(level);
    std::vector<double> s = sorted_values(xs);
    std::size_t n = s.size();
    // suffix sums make each candidate O(1)
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + s[i];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double t = s[i];
        // sum of (x - t)^+ over x > t, using the sorted order
        std::size_t j = static_cast<std::size_t>(
            std::upper_bound(s.begin(), s.end(), t) - s.begin());
        double excess = suffix[j] - static_cast<double>(n - j) * t;
        double value = t + excess / (static_cast<double>(n) * level.alpha);
        best = std::min(best, value);
    }
    return best;
}

struct EvarResult {
    double value = 0.0;
    double z_star = 0.0;
    // true when the infimum is approached at the edge of the search domain
    // (constant variables, or finite z_max) rather than an interior point
    bool boundary = false;
};

// Entropic value-at-risk: inf_{z in (0, z_max)} [log M_X(z) - log alpha] / z.
// Bracketed on log z, refined by golden section (objective tolerance 1e-8);
// boundary infima are flagged and evaluated at the reachable edge.
inline EvarResult evar(const MgfHandle& mgf, RiskLevel level) {
    require_valid(level);
    const double log_alpha = std::log(level.alpha);
    auto objective = [&](double log_z) {
        double z = std::exp(log_z);
        double lm = mgf.log_mgf(z);
        if (!std::isfinite(lm)) return std::numeric_limits<double>::infinity();
        return (lm - log_alpha) / z;
    };

    const double hard_cap = std::isfinite(mgf.z_max)
                                ? std::log(mgf.z_max) - 1e-9
                                : std::log(1e12);
    const double hard_floor = std::log(1e-12);

    // walk a coarse lattice (endpoints included) to find the descent basin
    double best_t = 0.0;
    double best_f = std::numeric_limits<double>::infinity();
    const double step = 0.5;
    for (double t = hard_floor; t < hard_cap + step; t += step) {
        double t_eval = std::min(t, hard_cap);
        double ft = objective(t_eval);
        if (ft < best_f) {
            best_f = ft;
            best_t = t_eval;
        }
        if (t_eval >= hard_cap) break;
    }
    if (!std::isfinite(best_f))
        throw DomainError("evar: moment generating function not finite on (0, z_max)");

    double lo = std::max(hard_floor, best_t - step);
    double hi = std::min(hard_cap, best_t + step);
    MinResult m = golden_section_min(objective, lo, hi, 1e-13);

    EvarResult out;
    out.z_star = std::exp(m.x);
    out.value = m.value;
    out.boundary = (best_t >= hard_cap - step * 0.5) || (best_t <= hard_floor + step * 0.5);
    return out;
}

// EVaR of a sample set through its empirical MGF.
inline EvarResult evar_empirical(const SampleSet& xs, RiskLevel level) {
    return evar(MgfHandle::empirical(xs), level);
}

// Running mean/variance tracker driven by stochastic approximation.
struct VarianceTracker {
    double r_hat = 0.0;   // running utility estimate
    double v_hat = 0.0;   // running variance estimate, >= 0
    std::uint64_t t = 0;  // completed updates
};

// One stochastic-approximation step:
//   v <- v + beta ((payoff - r)^2 - v)   (using the pre-update mean)
//   r <- r + beta (payoff - r)
inline VarianceTracker variance_update(const VarianceTracker& tr, double payoff,
                                       double beta) {
    if (!(beta > 0.0 && beta <= 1.0))
        throw ParameterError("variance_update: beta must lie in (0, 1]");
    VarianceTracker out = tr;
    double innovation = payoff - tr.r_hat;
    out.v_hat = tr.v_hat + beta * (innovation * innovation - tr.v_hat);
    out.r_hat = tr.r_hat + beta * innovation;
    out.t = tr.t + 1;
    return out;
}

// Consistency check between CVaR - VaR and the mean of a GPD fitted to the
// excesses over VaR.
struct LinkCheckReport {
    double lhs = 0.0;      // cvar - var
    double rhs = 0.0;      // fitted GPD mean excess
    double rel_err = 0.0;  // |lhs - rhs| / |rhs|
    evt::GpdParams fit;
    double var = 0.0;
    std::size_t n_excesses = 0;
};

inline LinkCheckReport cvar_gpd_link_check(const SampleSet& xs, RiskLevel level) {
    LinkCheckReport rep;
    rep.var = var_empirical(xs, level);
    double cvar = cvar_empirical(xs, level);
    SampleSet excesses = evt::pot_excesses(xs, rep.var);
    rep.n_excesses = excesses.size();
    rep.fit = evt::fit_gpd(excesses);
    rep.fit.threshold = rep.var;
    rep.lhs = cvar - rep.var;
    rep.rhs = evt::gpd_mean(rep.fit);
    rep.rel_err = std::abs(rep.lhs - rep.rhs) / std::abs(rep.rhs);
    return rep;
}

}  // namespace tailrisk::risk
