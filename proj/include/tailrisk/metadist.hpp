#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tailrisk/errors.hpp"
#include "tailrisk/rng.hpp"
#include "tailrisk/sample_set.hpp"
#include "tailrisk/special.hpp"

namespace tailrisk::meta {

// First two moments of the conditional success probability, a [0,1]-valued
// random variable; feasibility requires m1^2 <= m2 <= m1.
struct MetaMoments {
    double m1 = 0.0;
    double m2 = 0.0;
};

struct BetaParams {
    double a = 1.0;
    double b = 1.0;
};

inline MetaMoments moments_from_samples(const SampleSet& ps) {
    require_samples(ps, "moments_from_samples");
    double m1 = 0.0, m2 = 0.0;
    for (double p : ps.values) {
        if (!(p >= 0.0 && p <= 1.0))
            throw DomainError("moments_from_samples: samples must lie in [0, 1]");
        m1 += p;
        m2 += p * p;
    }
    double n = static_cast<double>(ps.size());
    return MetaMoments{m1 / n, m2 / n};
}

// Beta parameters matching the first two moments:
//   a = m1 (m1 - m2) / (m2 - m1^2),  b = a (1 - m1) / m1.
inline BetaParams beta_from_moments(const MetaMoments& m) {
    double var = m.m2 - m.m1 * m.m1;
    if (!(var > 0.0))
        throw DomainError("beta_from_moments: degenerate moments (zero variance)");
    if (!(m.m2 < m.m1))
        throw DomainError("beta_from_moments: infeasible moments (m2 >= m1)");
    BetaParams out;
    out.a = m.m1 * (m.m1 - m.m2) / var;
    out.b = out.a * (1.0 - m.m1) / m.m1;
    if (!(out.a > 0.0 && out.b > 0.0))
        throw DomainError("beta_from_moments: infeasible moments (non-positive shape)");
    return out;
}

// Beta-approximated meta distribution: the survival function of
// Beta(a, b) at x.
inline double meta_ccdf(double x, const BetaParams& bp) {
    if (!(bp.a > 0.0 && bp.b > 0.0))
        throw ParameterError("meta_ccdf: beta parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0))
        throw ParameterError("meta_ccdf: x must lie in [0, 1]");
    return 1.0 - incbeta(bp.a, bp.b, x);
}

// Poisson interferer field around a fixed receiver at the origin with its
// desired transmitter at distance d0.
struct PoissonFieldConfig {
    double intensity = 1e-4;      // interferers per m^2
    double link_distance = 50.0;  // d0, meters
    double path_loss_exponent = 4.0;
    double sir_threshold = 1.0;
    double window_radius = 0.0;  // 0 -> 20 * link_distance
    std::uint64_t realizations = 10000;
    std::uint64_t seed = 1;
};

inline void require_valid(const PoissonFieldConfig& cfg) {
    if (!(cfg.intensity >= 0.0))
        throw ParameterError("poisson field: intensity must be >= 0");
    if (!(cfg.link_distance > 0.0))
        throw ParameterError("poisson field: link distance must be > 0");
    if (!(cfg.path_loss_exponent > 2.0))
        throw ParameterError("poisson field: path-loss exponent must exceed 2");
    if (!(cfg.sir_threshold > 0.0))
        throw ParameterError("poisson field: SIR threshold must be > 0");
}

// Conditional (over Rayleigh fading) success probability given interferer
// distances: prod_i 1 / (1 + theta (d0/d_i)^alpha).
inline double success_probability(const std::vector<double>& interferer_distances,
                                  double theta, double alpha_pl, double d0) {
    double p = 1.0;
    for (double d : interferer_distances)
        p /= 1.0 + theta * std::pow(d0 / d, alpha_pl);
    return p;
}

// Draws realizations of the conditional success probability P_s(theta | Phi)
// for a Poisson field. Interferers beyond the window radius are ignored;
// with path-loss exponent > 2 their contribution is negligible at the
// default radius of 20 link distances. Deterministic by seed, one derived
// stream per realization.
inline SampleSet poisson_field_success_samples(const PoissonFieldConfig& cfg) {
    require_valid(cfg);
    double radius = cfg.window_radius > 0.0 ? cfg.window_radius : 20.0 * cfg.link_distance;
    double mean_count = cfg.intensity * 3.14159265358979323846 * radius * radius;

    SampleSet out;
    out.values.reserve(cfg.realizations);
    std::vector<double> dists;
    for (std::uint64_t r = 0; r < cfg.realizations; ++r) {
        Rng rng(cfg.seed, "meta/field/" + std::to_string(r));
        long n = rng.poisson(mean_count);
        dists.clear();
        for (long i = 0; i < n; ++i) {
            // uniform in the disc
            double d = radius * std::sqrt(rng.uniform());
            rng.uniform();  // angle drawn for stream-shape stability, unused
            dists.push_back(d);
        }
        out.values.push_back(success_probability(dists, cfg.sir_threshold,
                                                 cfg.path_loss_exponent,
                                                 cfg.link_distance));
    }
    return out;
}

}  // namespace tailrisk::meta
