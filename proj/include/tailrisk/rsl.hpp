#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tailrisk/errors.hpp"
#include "tailrisk/rng.hpp"
#include "tailrisk/sample_set.hpp"

namespace tailrisk::rsl {

inline constexpr double kPi = 3.14159265358979323846;

// Risk-sensitivity magnitudes below this use the mu -> 0 (risk-neutral)
// limit of the exponential transform.
inline constexpr double kMuEpsilon = 1e-8;

// Risk-sensitive certainty equivalent (1/mu) log E[e^{mu u}] of a payoff
// sample, evaluated in log-sum-exp form.
inline double rs_transform(const SampleSet& payoffs, double mu) {
    require_samples(payoffs, "rs_transform");
    if (std::abs(mu) < kMuEpsilon) return sample_mean(payoffs);
    double mx = -std::numeric_limits<double>::infinity();
    for (double u : payoffs.values) mx = std::max(mx, mu * u);
    double acc = 0.0;
    for (double u : payoffs.values) acc += std::exp(mu * u - mx);
    return (mx + std::log(acc / static_cast<double>(payoffs.size()))) / mu;
}

// Strategy space of the mmWave agents: all (beamwidth, power) pairs.
struct ActionGrid {
    std::vector<double> beamwidths_rad;
    std::vector<double> powers_dbm;

    std::size_t size() const { return beamwidths_rad.size() * powers_dbm.size(); }
    double beamwidth(std::size_t action) const {
        return beamwidths_rad[action / powers_dbm.size()];
    }
    double power_dbm(std::size_t action) const {
        return powers_dbm[action % powers_dbm.size()];
    }

    // beamwidths 0.2..0.4 rad in steps of 0.04; powers {21, 23, 25} dBm
    static ActionGrid standard() {
        ActionGrid g;
        for (int i = 0; i <= 5; ++i) g.beamwidths_rad.push_back(0.2 + 0.04 * i);
        g.powers_dbm = {21.0, 23.0, 25.0};
        return g;
    }
};

inline void require_valid(const ActionGrid& g) {
    if (g.beamwidths_rad.empty() || g.powers_dbm.empty())
        throw ParameterError("action grid: beamwidth and power sets must be non-empty");
    for (double b : g.beamwidths_rad)
        if (!(b > 0.0 && b <= kPi))
            throw ParameterError("action grid: beamwidths must lie in (0, pi]");
}

// Per-agent learning state: utility estimates, mixed strategy, schedules.
struct AgentState {
    double mu = 0.0;              // risk-sensitivity index; 0 = classical mode
    double kappa = 10.0;          // Boltzmann temperature
    double lambda_exponent = 0.6; // learning rate n^-exponent per action
    std::vector<double> r_hat;
    std::vector<double> probs;
    std::vector<std::uint64_t> visits;
    std::uint64_t t = 0;

    static AgentState make(std::size_t n_actions, double mu, double kappa = 10.0,
                           double lambda_exponent = 0.6) {
        if (n_actions == 0) throw ParameterError("agent state: needs at least one action");
        AgentState st;
        st.mu = mu;
        st.kappa = kappa;
        st.lambda_exponent = lambda_exponent;
        st.r_hat.assign(n_actions, 0.0);
        st.probs.assign(n_actions, 1.0 / static_cast<double>(n_actions));
        st.visits.assign(n_actions, 0);
        return st;
    }
};

// One utility-estimate step for the chosen action:
//   r(a) <- r(a) + lambda ((e^{mu u} - 1)/mu - r(a)),
// with the innovation degenerating to the raw payoff as mu -> 0. The
// learning rate is n^-lambda_exponent in the action's visit count.
inline AgentState utility_estimate_update(const AgentState& st, std::size_t action,
                                          double payoff) {
    if (action >= st.r_hat.size())
        throw ParameterError("utility update: action index out of range");
    AgentState out = st;
    double n = static_cast<double>(st.visits[action] + 1);
    double lambda = std::pow(n, -st.lambda_exponent);
    double innovation = std::abs(st.mu) < kMuEpsilon
                            ? payoff
                            : std::expm1(st.mu * payoff) / st.mu;
    out.r_hat[action] += lambda * (innovation - out.r_hat[action]);
    out.visits[action] += 1;
    out.t += 1;
    return out;
}

// Boltzmann strategy over the current estimates: probs(a) proportional to
// exp(kappa r(a)), normalized in log-sum-exp form.
inline AgentState strategy_update(const AgentState& st) {
    AgentState out = st;
    double mx = -std::numeric_limits<double>::infinity();
    for (double r : st.r_hat) mx = std::max(mx, st.kappa * r);
    double total = 0.0;
    for (std::size_t a = 0; a < st.r_hat.size(); ++a) {
        out.probs[a] = std::exp(st.kappa * st.r_hat[a] - mx);
        total += out.probs[a];
    }
    for (double& p : out.probs) p /= total;
    return out;
}

// Small-cell network scenario. One UE per SC, served on the same index.
// Defaults follow published urban 28 GHz measurement constants; the blockage
// and alignment parameters are the controlled risk sources.
struct MmwaveScenario {
    std::vector<std::array<double, 2>> sc_pos;  // meters
    std::vector<std::array<double, 2>> ue_pos;  // meters; ue_pos[i] served by sc i

    double carrier_ghz = 28.0;
    double bandwidth_hz = 1e9;
    int tx_antennas = 64;  // mainlobe gain ceiling
    int rx_antennas = 4;   // UE mainlobe gain and beamwidth 2 pi / N

    double blockage_decay_per_m = 1.0 / 141.0;  // p_LOS(d) = exp(-decay d)
    double pl_los_intercept_db = 61.4, pl_los_slope_db = 20.0;
    double pl_nlos_intercept_db = 72.0, pl_nlos_slope_db = 29.2;
    double noise_figure_db = 10.0;

    // per-slot beam alignment: p_miss(theta) = exp(-theta / (2 sigma));
    // 0 disables misalignment entirely
    double pointing_sigma_rad = 0.04;
    double sidelobe_gain = 0.1;  // absolute linear gain off the mainlobe

    double mu_rsl = -1.0;
    double kappa_rsl = 400.0;  // matched to the compressed exponential-utility scale
    double kappa_csl = 10.0;
    double lambda_exponent = 0.6;
    double warmup_fraction = 0.3;       // uniform exploration phase
    double final_epoch_fraction = 0.1;  // tail of the run reported as rates

    ActionGrid grid = ActionGrid::standard();

    // Uniform SC placement with each UE at a fixed link distance and random
    // bearing. Density in SCs per km^2 over a square of the given side.
    static MmwaveScenario random_topology(double area_side_m, double density_per_km2,
                                          double link_distance_m, std::uint64_t seed) {
        if (!(area_side_m > 0.0) || !(density_per_km2 > 0.0) || !(link_distance_m > 0.0))
            throw ParameterError("mmwave topology: geometry must be positive");
        MmwaveScenario sc;
        double area_km2 = area_side_m * area_side_m * 1e-6;
        std::size_t n = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(density_per_km2 * area_km2)));
        Rng rng(seed, "rsl/topology");
        for (std::size_t i = 0; i < n; ++i) {
            double x = rng.uniform(0.0, area_side_m);
            double y = rng.uniform(0.0, area_side_m);
            double ang = rng.uniform(0.0, 2.0 * kPi);
            sc.sc_pos.push_back({x, y});
            sc.ue_pos.push_back({x + link_distance_m * std::cos(ang),
                                 y + link_distance_m * std::sin(ang)});
        }
        return sc;
    }
};

inline void require_valid(const MmwaveScenario& sc) {
    if (sc.sc_pos.empty() || sc.sc_pos.size() != sc.ue_pos.size())
        throw ParameterError("mmwave scenario: needs matching SC and UE positions");
    if (!(sc.bandwidth_hz > 0.0) || sc.rx_antennas < 1)
        throw ParameterError("mmwave scenario: bandwidth and antenna counts must be positive");
    require_valid(sc.grid);
}

enum class Scheme { RSL, CSL, BL1 };

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "RSL" || s == "rsl") return Scheme::RSL;
    if (s == "CSL" || s == "csl") return Scheme::CSL;
    if (s == "BL1" || s == "bl1") return Scheme::BL1;
    throw ParameterError("scheme must be one of RSL, CSL, BL1");
}

struct RateSummary {
    double mean = 0.0;
    double variance = 0.0;
    bool empty = true;
    std::vector<std::pair<double, double>> ccdf;  // (grid point, survival)
};

struct MmwaveResult {
    SampleSet rates_gbps;  // final-epoch per-UE per-slot rates
    RateSummary summary;
};

// Empirical survival function of the samples at the given grid points.
inline std::vector<std::pair<double, double>> rate_ccdf(const SampleSet& samples,
                                                        const std::vector<double>& grid) {
    require_samples(samples, "rate_ccdf");
    std::vector<double> s = sorted_values(samples);
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    double n = static_cast<double>(s.size());
    for (double g : grid) {
        std::size_t idx = static_cast<std::size_t>(
            std::upper_bound(s.begin(), s.end(), g) - s.begin());
        out.emplace_back(g, static_cast<double>(s.size() - idx) / n);
    }
    return out;
}

namespace detail {

struct Geometry {
    std::vector<double> d_serve;            // SC i -> UE i distance
    std::vector<std::vector<double>> d_int; // SC j -> UE i distance
    // angle at SC j between its boresight (toward UE j) and UE i
    std::vector<std::vector<double>> tx_off_angle;
    // angle at UE i between its boresight (toward SC i) and SC j
    std::vector<std::vector<double>> rx_off_angle;
};

inline double angle_between(const std::array<double, 2>& origin,
                            const std::array<double, 2>& ref,
                            const std::array<double, 2>& other) {
    double a1 = std::atan2(ref[1] - origin[1], ref[0] - origin[0]);
    double a2 = std::atan2(other[1] - origin[1], other[0] - origin[0]);
    double d = std::abs(a1 - a2);
    return d > kPi ? 2.0 * kPi - d : d;
}

inline Geometry build_geometry(const MmwaveScenario& sc) {
    std::size_t n = sc.sc_pos.size();
    Geometry g;
    g.d_serve.resize(n);
    g.d_int.assign(n, std::vector<double>(n, 0.0));
    g.tx_off_angle.assign(n, std::vector<double>(n, 0.0));
    g.rx_off_angle.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double dx = sc.ue_pos[i][0] - sc.sc_pos[i][0];
        double dy = sc.ue_pos[i][1] - sc.sc_pos[i][1];
        g.d_serve[i] = std::max(1.0, std::hypot(dx, dy));
        for (std::size_t j = 0; j < n; ++j) {
            double ddx = sc.ue_pos[i][0] - sc.sc_pos[j][0];
            double ddy = sc.ue_pos[i][1] - sc.sc_pos[j][1];
            g.d_int[j][i] = std::max(1.0, std::hypot(ddx, ddy));
            g.tx_off_angle[j][i] = angle_between(sc.sc_pos[j], sc.ue_pos[j], sc.ue_pos[i]);
            g.rx_off_angle[i][j] = angle_between(sc.ue_pos[i], sc.sc_pos[i], sc.sc_pos[j]);
        }
    }
    return g;
}

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

}  // namespace detail

// Episode-loop simulator. Per slot every SC picks an action (by scheme),
// per-link LOS/blockage and beam-alignment states are drawn, SINR is
// computed with sectored antenna gains and co-channel interference, and the
// learning agents are updated from their UE's rate in Gbps. Returns the
// rate distribution over the final epoch. Bit-reproducible for a fixed
// seed; each SC owns a named action stream and a named channel stream.
inline MmwaveResult simulate_mmwave(const MmwaveScenario& sc, Scheme scheme,
                                    std::uint64_t episodes, std::uint64_t seed) {
    require_valid(sc);
    const std::size_t n = sc.sc_pos.size();
    const std::size_t n_actions = sc.grid.size();
    const detail::Geometry geo = detail::build_geometry(sc);

    const double noise_dbm =
        -174.0 + 10.0 * std::log10(sc.bandwidth_hz) + sc.noise_figure_db;
    const double noise_mw = detail::dbm_to_mw(noise_dbm);
    const double rx_beamwidth = 2.0 * kPi / static_cast<double>(sc.rx_antennas);
    const double rx_main_gain = static_cast<double>(sc.rx_antennas);

    auto tx_main_gain = [&](double theta) {
        return std::min(2.0 * kPi / theta, static_cast<double>(sc.tx_antennas));
    };
    auto p_miss = [&](double theta) {
        if (!(sc.pointing_sigma_rad > 0.0)) return 0.0;
        return std::exp(-theta / (2.0 * sc.pointing_sigma_rad));
    };
    auto path_loss_db = [&](double d, bool los) {
        return los ? sc.pl_los_intercept_db + sc.pl_los_slope_db * std::log10(d)
                   : sc.pl_nlos_intercept_db + sc.pl_nlos_slope_db * std::log10(d);
    };

    std::vector<AgentState> agents;
    if (scheme != Scheme::BL1) {
        double mu = scheme == Scheme::RSL ? sc.mu_rsl : 0.0;
        double kappa = scheme == Scheme::RSL ? sc.kappa_rsl : sc.kappa_csl;
        agents.assign(n, AgentState::make(n_actions, mu, kappa, sc.lambda_exponent));
    }
    // max power with the narrowest beam
    const std::size_t bl1_action = sc.grid.powers_dbm.size() - 1;

    std::vector<Rng> action_rng;
    std::vector<Rng> chan_rng;
    action_rng.reserve(n);
    chan_rng.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        action_rng.emplace_back(seed, "rsl/sc/" + std::to_string(i));
        chan_rng.emplace_back(seed, "rsl/chan/" + std::to_string(i));
    }

    const std::uint64_t warmup =
        static_cast<std::uint64_t>(sc.warmup_fraction * static_cast<double>(episodes));
    std::uint64_t collect_from = episodes;
    if (episodes > 0) {
        std::uint64_t span = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(sc.final_epoch_fraction *
                                          static_cast<double>(episodes)));
        collect_from = episodes - span;
    }

    MmwaveResult out;
    out.rates_gbps.units = "Gbps";

    std::vector<std::size_t> actions(n, bl1_action);
    std::vector<bool> aligned(n, true);
    std::vector<double> rate(n, 0.0);

    for (std::uint64_t ep = 0; ep < episodes; ++ep) {
        for (std::size_t i = 0; i < n; ++i) {
            if (scheme == Scheme::BL1) {
                actions[i] = bl1_action;
            } else if (ep < warmup) {
                actions[i] = action_rng[i].uniform_index(n_actions);
            } else {
                actions[i] = action_rng[i].categorical(agents[i].probs);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            double theta_i = sc.grid.beamwidth(actions[i]);
            aligned[i] = !chan_rng[i].bernoulli(p_miss(theta_i));
        }
        for (std::size_t i = 0; i < n; ++i) {
            double theta_i = sc.grid.beamwidth(actions[i]);
            bool own_los = chan_rng[i].bernoulli(
                std::exp(-sc.blockage_decay_per_m * geo.d_serve[i]));
            double g_tx = aligned[i] ? tx_main_gain(theta_i) : sc.sidelobe_gain;
            double sig_dbm = sc.grid.power_dbm(actions[i]) +
                             10.0 * std::log10(g_tx * rx_main_gain) -
                             path_loss_db(geo.d_serve[i], own_los);
            double interference_mw = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                bool int_los = chan_rng[i].bernoulli(
                    std::exp(-sc.blockage_decay_per_m * geo.d_int[j][i]));
                double theta_j = sc.grid.beamwidth(actions[j]);
                double gt = geo.tx_off_angle[j][i] <= theta_j * 0.5
                                ? tx_main_gain(theta_j)
                                : sc.sidelobe_gain;
                double gr = geo.rx_off_angle[i][j] <= rx_beamwidth * 0.5
                                ? rx_main_gain
                                : sc.sidelobe_gain;
                double p_dbm = sc.grid.power_dbm(actions[j]) +
                               10.0 * std::log10(gt * gr) -
                               path_loss_db(geo.d_int[j][i], int_los);
                interference_mw += detail::dbm_to_mw(p_dbm);
            }
            double sinr = detail::dbm_to_mw(sig_dbm) / (noise_mw + interference_mw);
            rate[i] = sc.bandwidth_hz * std::log2(1.0 + sinr) / 1e9;
        }
        if (scheme != Scheme::BL1) {
            for (std::size_t i = 0; i < n; ++i) {
                agents[i] = utility_estimate_update(agents[i], actions[i], rate[i]);
                agents[i] = strategy_update(agents[i]);
            }
        }
        if (ep >= collect_from)
            for (std::size_t i = 0; i < n; ++i)
                out.rates_gbps.values.push_back(rate[i]);
    }

    if (!out.rates_gbps.empty()) {
        out.summary.empty = false;
        double m = sample_mean(out.rates_gbps);
        double acc = 0.0;
        for (double r : out.rates_gbps.values) acc += (r - m) * (r - m);
        out.summary.mean = m;
        out.summary.variance = acc / static_cast<double>(out.rates_gbps.size());
        std::vector<double> grid;
        for (double g = 0.0; g <= 12.0 + 1e-9; g += 0.25) grid.push_back(g);
        out.summary.ccdf = rate_ccdf(out.rates_gbps, grid);
    }
    return out;
}

}  // namespace tailrisk::rsl
