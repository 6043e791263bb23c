#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tailrisk/errors.hpp"
#include "tailrisk/sample_set.hpp"
#include "tailrisk/special.hpp"

namespace tailrisk::evt {

// Shape magnitudes below this use the analytic xi -> 0 limit (Gumbel /
// exponential) to avoid catastrophic cancellation in (1 + xi z)^(-1/xi).
inline constexpr double kShapeEpsilon = 1e-6;

// Below this count the asymptotic fits are refused.
inline constexpr std::size_t kDefaultMinFitSamples = 30;

// Generalized extreme value parameters: location mu, scale sigma > 0,
// shape xi. Support is {z : 1 + xi (z - mu)/sigma > 0}.
struct GevParams {
    double mu = 0.0;
    double sigma = 1.0;
    double xi = 0.0;
};

// Generalized Pareto parameters for excesses over `threshold`: scale
// sigma_t > 0, shape xi. Support is {y >= 0 : 1 + xi y/sigma_t > 0}.
struct GpdParams {
    double sigma_t = 1.0;
    double xi = 0.0;
    double threshold = 0.0;
};

inline void require_valid(const GevParams& p) {
    if (!(p.sigma > 0.0)) throw ParameterError("gev: scale sigma must be > 0");
}

inline void require_valid(const GpdParams& p) {
    if (!(p.sigma_t > 0.0)) throw ParameterError("gpd: scale sigma_t must be > 0");
}

// GEV cumulative distribution function. Out-of-support z returns the
// appropriate tail limit (0 below a lower endpoint, 1 above an upper one).
inline double gev_cdf(double z, const GevParams& p) {
    require_valid(p);
    double u = (z - p.mu) / p.sigma;
    if (std::abs(p.xi) < kShapeEpsilon) return std::exp(-std::exp(-u));
    double t = 1.0 + p.xi * u;
    if (t <= 0.0) return p.xi > 0.0 ? 0.0 : 1.0;
    return std::exp(-std::pow(t, -1.0 / p.xi));
}

// GPD survival function of an excess y >= 0.
inline double gpd_survival(double y, const GpdParams& p) {
    require_valid(p);
    if (y < 0.0) throw ParameterError("gpd_survival: excess y must be >= 0");
    if (std::abs(p.xi) < kShapeEpsilon) return std::exp(-y / p.sigma_t);
    double t = 1.0 + p.xi * y / p.sigma_t;
    if (t <= 0.0) return 0.0;  // beyond the finite upper endpoint (xi < 0)
    return std::pow(t, -1.0 / p.xi);
}

inline double gpd_cdf(double y, const GpdParams& p) { return 1.0 - gpd_survival(y, p); }

// Inverse of the excess CDF: quantile of order q in [0, 1).
inline double gpd_quantile(double q, const GpdParams& p) {
    require_valid(p);
    if (!(q >= 0.0 && q < 1.0))
        throw ParameterError("gpd_quantile: requires q in [0, 1)");
    if (std::abs(p.xi) < kShapeEpsilon) return -p.sigma_t * std::log1p(-q);
    return p.sigma_t / p.xi * (std::pow(1.0 - q, -p.xi) - 1.0);
}

inline double gev_quantile(double q, const GevParams& p) {
    require_valid(p);
    if (!(q > 0.0 && q < 1.0))
        throw ParameterError("gev_quantile: requires q in (0, 1)");
    double w = -std::log(q);
    if (std::abs(p.xi) < kShapeEpsilon) return p.mu - p.sigma * std::log(w);
    return p.mu + p.sigma / p.xi * (std::pow(w, -p.xi) - 1.0);
}

// Mean excess sigma_t / (1 - xi); defined for xi < 1.
inline double gpd_mean(const GpdParams& p) {
    require_valid(p);
    if (!(p.xi < 1.0))
        throw DomainError("gpd_mean: undefined for shape xi >= 1");
    return p.sigma_t / (1.0 - p.xi);
}

// Second moment 2 sigma_t^2 / ((1 - xi)(1 - 2 xi)); defined for xi < 1/2.
inline double gpd_second_moment(const GpdParams& p) {
    require_valid(p);
    if (!(p.xi < 0.5))
        throw DomainError("gpd_second_moment: undefined for shape xi >= 1/2");
    return 2.0 * p.sigma_t * p.sigma_t / ((1.0 - p.xi) * (1.0 - 2.0 * p.xi));
}

// Maxima of consecutive complete blocks of size m; a trailing partial block
// is discarded.
inline SampleSet block_maxima(const SampleSet& xs, std::size_t m) {
    if (m < 1) throw ParameterError("block_maxima: block size must be >= 1");
    SampleSet out;
    out.units = xs.units;
    std::size_t n_blocks = xs.size() / m;
    out.values.reserve(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        double mx = xs.values[b * m];
        for (std::size_t i = 1; i < m; ++i)
            mx = std::max(mx, xs.values[b * m + i]);
        out.values.push_back(mx);
    }
    return out;
}

// Excesses x - d for every x > d, order preserved.
inline SampleSet pot_excesses(const SampleSet& xs, double d) {
    SampleSet out;
    out.units = xs.units;
    for (double x : xs.values)
        if (x > d) out.values.push_back(x - d);
    return out;
}

namespace detail {

inline void require_fit_input(const std::vector<double>& sorted, std::size_t min_samples,
                              const char* op) {
    if (sorted.size() < min_samples)
        throw SampleError(std::string(op) + ": needs at least " +
                          std::to_string(min_samples) + " samples, got " +
                          std::to_string(sorted.size()));
    double spread = sorted.back() - sorted.front();
    if (!(spread > 1e-12 * std::max(1.0, std::abs(sorted.back()))))
        throw SampleError(std::string(op) + ": degenerate sample (no spread)");
}

}  // namespace detail

// Probability-weighted-moment GPD fit on excesses. Plotting positions
// p_i = (i - 0.35)/n over ascending order statistics; with a0 the sample
// mean and a1 = (1/n) sum x_(i) (1 - p_i):
//   xi_hat    = 2 - a0 / (a0 - 2 a1)
//   sigma_hat = 2 a0 a1 / (a0 - 2 a1)
// The threshold the excesses were taken over is carried by the caller.
inline GpdParams fit_gpd(const SampleSet& excesses,
                         std::size_t min_samples = kDefaultMinFitSamples) {
    require_samples(excesses, "fit_gpd");
    std::vector<double> s = sorted_values(excesses);
    detail::require_fit_input(s, min_samples, "fit_gpd");
    std::size_t n = s.size();
    double a0 = 0.0;
    double a1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = (static_cast<double>(i) + 1.0 - 0.35) / static_cast<double>(n);
        a0 += s[i];
        a1 += s[i] * (1.0 - p);
    }
    a0 /= static_cast<double>(n);
    a1 /= static_cast<double>(n);
    double denom = a0 - 2.0 * a1;
    if (std::abs(denom) < 1e-12 * std::max(1.0, std::abs(a0)))
        throw SampleError("fit_gpd: degenerate sample (a0 == 2 a1)");
    GpdParams out;
    out.xi = 2.0 - a0 / denom;
    out.sigma_t = 2.0 * a0 * a1 / denom;
    out.threshold = 0.0;
    if (!(out.sigma_t > 0.0))
        throw SampleError("fit_gpd: degenerate sample (non-positive fitted scale)");
    return out;
}

// Probability-weighted-moment GEV fit on block maxima, using the standard
// rational approximation for the shape: with b_r = (1/n) sum p_i^r x_(i) and
//   c = (2 b1 - b0)/(3 b2 - b0) - ln 2 / ln 3,
//   k = 7.8590 c + 2.9554 c^2,
// then sigma and mu follow from gamma-function relations. k uses the
// opposite sign convention from GevParams::xi, converted on return.
inline GevParams fit_gev(const SampleSet& maxima,
                         std::size_t min_samples = kDefaultMinFitSamples) {
    require_samples(maxima, "fit_gev");
    std::vector<double> s = sorted_values(maxima);
    detail::require_fit_input(s, min_samples, "fit_gev");
    std::size_t n = s.size();
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = (static_cast<double>(i) + 1.0 - 0.35) / static_cast<double>(n);
        b0 += s[i];
        b1 += p * s[i];
        b2 += p * p * s[i];
    }
    b0 /= static_cast<double>(n);
    b1 /= static_cast<double>(n);
    b2 /= static_cast<double>(n);

    double denom3 = 3.0 * b2 - b0;
    if (std::abs(denom3) < 1e-12 * std::max(1.0, std::abs(b0)))
        throw SampleError("fit_gev: degenerate probability-weighted moments");
    double c = (2.0 * b1 - b0) / denom3 - std::log(2.0) / std::log(3.0);
    double k = 7.8590 * c + 2.9554 * c * c;

    GevParams out;
    if (std::abs(k) < kShapeEpsilon) {
        out.sigma = (2.0 * b1 - b0) / std::log(2.0);
        out.mu = b0 - kEulerGamma * out.sigma;
        out.xi = 0.0;
    } else {
        if (k <= -1.0)
            throw SampleError("fit_gev: degenerate sample (shape estimate out of range)");
        double g = std::tgamma(1.0 + k);
        out.sigma = (2.0 * b1 - b0) * k / (g * (1.0 - std::pow(2.0, -k)));
        out.mu = b0 + out.sigma * (g - 1.0) / k;
        out.xi = -k;
    }
    if (!(out.sigma > 0.0))
        throw SampleError("fit_gev: degenerate sample (non-positive fitted scale)");
    return out;
}

// GPD scale implied by GEV parameters at threshold d: sigma + xi (d - mu).
inline double gpd_scale_from_gev(const GevParams& g, double d) {
    require_valid(g);
    double s = g.sigma + g.xi * (d - g.mu);
    if (!(s > 0.0))
        throw DomainError(
            "gpd_scale_from_gev: inconsistent threshold (implied scale not positive)");
    return s;
}

}  // namespace tailrisk::evt
