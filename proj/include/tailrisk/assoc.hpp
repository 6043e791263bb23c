#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tailrisk/errors.hpp"
#include "tailrisk/rng.hpp"

namespace tailrisk::assoc {

inline constexpr std::size_t kBruteForceCap = 20;  // at most 2^20 matrices

// BS-UE association instance: per-link SNRs (linear), a per-connection BS
// power cost and a per-extra-connection UE cost.
struct AssocInstance {
    std::size_t n_bs = 0;
    std::size_t n_ue = 0;
    std::vector<double> gamma;  // row-major n_bs x n_ue
    double vartheta = 0.0;
    double varphi = 0.0;
    // when set, a BS splits its power across its connections: each of its
    // links sees gamma / v_b instead of the full per-link SNR
    bool power_split = false;

    double zeta() const { return static_cast<double>(n_ue) / static_cast<double>(n_bs); }
    double link(std::size_t b, std::size_t u) const { return gamma[b * n_ue + u]; }
};

inline void require_valid(const AssocInstance& inst) {
    if (inst.n_bs == 0 || inst.n_ue == 0)
        throw ParameterError("assoc instance: needs at least one BS and one UE");
    if (inst.gamma.size() != inst.n_bs * inst.n_ue)
        throw ParameterError("assoc instance: gamma matrix shape mismatch");
    for (double g : inst.gamma)
        if (!(g >= 0.0)) throw ParameterError("assoc instance: SNR entries must be >= 0");
    if (!(inst.vartheta >= 0.0) || !(inst.varphi >= 0.0))
        throw ParameterError("assoc instance: costs must be >= 0");
}

// Binary association matrix.
struct Association {
    std::size_t n_bs = 0;
    std::size_t n_ue = 0;
    std::vector<std::uint8_t> x;  // row-major

    static Association empty(std::size_t n_bs, std::size_t n_ue) {
        return Association{n_bs, n_ue, std::vector<std::uint8_t>(n_bs * n_ue, 0)};
    }
    bool connected(std::size_t b, std::size_t u) const { return x[b * n_ue + u] != 0; }
    std::size_t bs_load(std::size_t b) const {
        std::size_t v = 0;
        for (std::size_t u = 0; u < n_ue; ++u) v += x[b * n_ue + u];
        return v;
    }
    std::size_t ue_degree(std::size_t u) const {
        std::size_t v = 0;
        for (std::size_t b = 0; b < n_bs; ++b) v += x[b * n_ue + u];
        return v;
    }
};

inline void require_shapes(const AssocInstance& inst, const Association& x) {
    require_valid(inst);
    if (x.n_bs != inst.n_bs || x.n_ue != inst.n_ue ||
        x.x.size() != inst.n_bs * inst.n_ue)
        throw ParameterError("association: shape does not match the instance");
}

// Net network utility: total connected SNR minus the BS connection cost and
// the UE multi-connectivity cost, with (nu_u - 1) clipped at zero so
// unconnected UEs incur no negative cost.
inline double network_value(const AssocInstance& inst, const Association& x) {
    require_shapes(inst, x);
    double total = 0.0;
    for (std::size_t b = 0; b < inst.n_bs; ++b) {
        std::size_t v_b = x.bs_load(b);
        if (v_b == 0) continue;
        double split = inst.power_split ? static_cast<double>(v_b) : 1.0;
        for (std::size_t u = 0; u < inst.n_ue; ++u)
            if (x.connected(b, u)) total += inst.link(b, u) / split;
        total -= inst.vartheta * static_cast<double>(v_b);
    }
    for (std::size_t u = 0; u < inst.n_ue; ++u) {
        std::size_t nu = x.ue_degree(u);
        if (nu > 1) total -= inst.varphi * static_cast<double>(nu - 1);
    }
    return total;
}

// The objective exactly as printed in the source formulation (power terms
// rewarded, SNR subtracted, unconnected UEs credited); kept for audit
// comparisons only.
inline double network_value_printed(const AssocInstance& inst, const Association& x) {
    require_shapes(inst, x);
    double total = 0.0;
    for (std::size_t b = 0; b < inst.n_bs; ++b)
        total += inst.vartheta * static_cast<double>(x.bs_load(b));
    for (std::size_t u = 0; u < inst.n_ue; ++u)
        total += inst.varphi * (static_cast<double>(x.ue_degree(u)) - 1.0);
    for (std::size_t b = 0; b < inst.n_bs; ++b)
        for (std::size_t u = 0; u < inst.n_ue; ++u)
            if (x.connected(b, u)) total -= inst.link(b, u);
    return total;
}

// Exhaustive maximizer over all 2^(B U) binary matrices. Ties go to the
// lexicographically smallest matrix (row-major bit string).
inline std::pair<Association, double> brute_force_opt(const AssocInstance& inst) {
    require_valid(inst);
    std::size_t n = inst.n_bs * inst.n_ue;
    if (n > kBruteForceCap)
        throw SizeError("brute_force_opt: instance exceeds the enumeration cap of " +
                        std::to_string(kBruteForceCap) + " links");
    Association best = Association::empty(inst.n_bs, inst.n_ue);
    Association cur = best;
    double best_value = network_value(inst, best);
    const std::uint64_t total = 1ull << n;
    for (std::uint64_t mask = 1; mask < total; ++mask) {
        // bit (n-1-j) holds flat position j, so ascending masks scan the
        // matrices in lexicographic order
        for (std::size_t j = 0; j < n; ++j)
            cur.x[j] = (mask >> (n - 1 - j)) & 1ull;
        double value = network_value(inst, cur);
        if (value > best_value) {
            best_value = value;
            best = cur;
        }
    }
    return {best, best_value};
}

// Greedy heuristic: repeatedly add the single link with the largest strictly
// positive marginal gain.
inline std::pair<Association, double> greedy_assoc(const AssocInstance& inst) {
    require_valid(inst);
    Association cur = Association::empty(inst.n_bs, inst.n_ue);
    double cur_value = network_value(inst, cur);
    for (;;) {
        double best_gain = 0.0;
        std::size_t best_j = inst.gamma.size();
        for (std::size_t j = 0; j < inst.gamma.size(); ++j) {
            if (cur.x[j]) continue;
            cur.x[j] = 1;
            double gain = network_value(inst, cur) - cur_value;
            cur.x[j] = 0;
            if (gain > best_gain) {
                best_gain = gain;
                best_j = j;
            }
        }
        if (best_j == inst.gamma.size()) break;
        cur.x[best_j] = 1;
        cur_value += best_gain;
    }
    // recompute to shed accumulated increments
    return {cur, network_value(inst, cur)};
}

struct EbarResult {
    double mean = 0.0;
    double stderr_mean = 0.0;
    bool stderr_defined = false;  // needs at least two draws
};

using ChannelSampler = std::function<std::vector<double>(Rng&)>;

// I.i.d. Rayleigh-power (exponential) per-link SNR draws.
inline ChannelSampler rayleigh_channel_sampler(std::size_t n_bs, std::size_t n_ue,
                                               double mean_snr) {
    if (!(mean_snr > 0.0))
        throw ParameterError("channel sampler: mean SNR must be > 0");
    return [n_bs, n_ue, mean_snr](Rng& rng) {
        std::vector<double> g(n_bs * n_ue);
        for (double& v : g) v = rng.exponential(mean_snr);
        return g;
    };
}

// Monte-Carlo estimate of the channel-averaged optimal network value: draws
// i.i.d. SNR matrices, solves the inner maximization on each (brute force,
// or greedy when use_greedy is set), and reports the sample mean and
// standard error. Deterministic by seed.
inline EbarResult monte_carlo_ebar(std::size_t n_bs, std::size_t n_ue,
                                   const ChannelSampler& sampler, double vartheta,
                                   double varphi, std::uint64_t n_draws,
                                   std::uint64_t seed, bool use_greedy = false) {
    if (n_draws < 1) throw ParameterError("monte_carlo_ebar: needs at least one draw");
    Rng rng(seed, "assoc/ebar");
    AssocInstance inst;
    inst.n_bs = n_bs;
    inst.n_ue = n_ue;
    inst.vartheta = vartheta;
    inst.varphi = varphi;

    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t i = 0; i < n_draws; ++i) {
        inst.gamma = sampler(rng);
        double value =
            use_greedy ? greedy_assoc(inst).second : brute_force_opt(inst).second;
        sum += value;
        sum_sq += value * value;
    }
    EbarResult out;
    double n = static_cast<double>(n_draws);
    out.mean = sum / n;
    if (n_draws >= 2) {
        double var = std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0));
        out.stderr_mean = std::sqrt(var / n);
        out.stderr_defined = true;
    }
    return out;
}

// Fraction of UEs whose best connected link SNR strictly exceeds gamma0;
// unconnected UEs count as failures.
inline double reliability_fraction(const AssocInstance& inst, const Association& x,
                                   double gamma0) {
    require_shapes(inst, x);
    std::size_t achieved = 0;
    for (std::size_t u = 0; u < inst.n_ue; ++u) {
        double best = -std::numeric_limits<double>::infinity();
        bool connected = false;
        for (std::size_t b = 0; b < inst.n_bs; ++b) {
            if (!x.connected(b, u)) continue;
            connected = true;
            double split = inst.power_split ? static_cast<double>(x.bs_load(b)) : 1.0;
            best = std::max(best, inst.link(b, u) / split);
        }
        if (connected && best > gamma0) ++achieved;
    }
    return static_cast<double>(achieved) / static_cast<double>(inst.n_ue);
}

}  // namespace tailrisk::assoc
