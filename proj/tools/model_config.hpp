#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "tailrisk/errors.hpp"
#include "tailrisk/mecsim.hpp"
#include "tailrisk/metadist.hpp"
#include "tailrisk/rsl.hpp"
#include "tailrisk/snc.hpp"

namespace tailrisk::cli {

using nlohmann::json;

inline json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParameterError("malformed config " + path + ": " + e.what());
    }
    return j;
}

// Arrival models for the snc subcommands:
//   {"model": "poisson",       "mean": 1.0}
//   {"model": "deterministic", "rate": 1.0}
//   {"model": "bernoulli",     "p": 0.5, "batch": 1.0}
inline snc::LogMgf arrival_from_json(const json& j) {
    std::string model = j.value("model", "poisson");
    if (model == "poisson") return snc::poisson_arrivals(j.value("mean", 1.0));
    if (model == "deterministic")
        return snc::deterministic_arrivals(j.value("rate", 1.0));
    if (model == "bernoulli")
        return snc::bernoulli_arrivals(j.value("p", 0.5), j.value("batch", 1.0));
    throw ParameterError("unknown arrival model: " + model);
}

// Service models:
//   {"kind": "constant", "bits_per_slot": 2.0}
//   {"kind": "rayleigh", "mean_snr": 10.0}
inline snc::ServiceModel service_from_json(const json& j) {
    std::string kind = j.value("kind", "rayleigh");
    if (kind == "constant")
        return snc::ConstantService{j.value("bits_per_slot", 1.0)};
    if (kind == "rayleigh") return snc::RayleighService{j.value("mean_snr", 10.0)};
    throw ParameterError("unknown service kind: " + kind);
}

inline meta::PoissonFieldConfig field_from_json(const json& j) {
    meta::PoissonFieldConfig cfg;
    cfg.intensity = j.value("intensity", cfg.intensity);
    cfg.link_distance = j.value("link_distance", cfg.link_distance);
    cfg.path_loss_exponent = j.value("path_loss_exponent", cfg.path_loss_exponent);
    cfg.sir_threshold = j.value("sir_threshold", cfg.sir_threshold);
    cfg.window_radius = j.value("window_radius", cfg.window_radius);
    cfg.realizations = j.value("realizations", cfg.realizations);
    return cfg;
}

inline mec::MecConfig mec_from_json(const json& j) {
    mec::MecConfig cfg;
    cfg.arrival_mean_bits = j.value("arrival_mean_bits", cfg.arrival_mean_bits);
    cfg.threshold_bits = j.value("threshold_bits", cfg.threshold_bits);
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    cfg.sigma_th = j.value("sigma_th", cfg.sigma_th);
    cfg.xi_th = j.value("xi_th", cfg.xi_th);
    cfg.cpu_max_cycles = j.value("cpu_max_cycles", cfg.cpu_max_cycles);
    cfg.cycles_per_bit = j.value("cycles_per_bit", cfg.cycles_per_bit);
    if (j.contains("offload")) cfg.offload = service_from_json(j.at("offload"));
    cfg.penalty_weight = j.value("penalty_weight", cfg.penalty_weight);
    cfg.kappa_cpu = j.value("kappa_cpu", cfg.kappa_cpu);
    cfg.tx_power = j.value("tx_power", cfg.tx_power);
    cfg.q1_weight = j.value("q1_weight", cfg.q1_weight);
    cfg.q2_weight = j.value("q2_weight", cfg.q2_weight);
    cfg.q3_weight = j.value("q3_weight", cfg.q3_weight);
    cfg.freq_levels = j.value("freq_levels", cfg.freq_levels);
    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.warmup_fraction = j.value("warmup_fraction", cfg.warmup_fraction);
    return cfg;
}

// Scenario configs either give explicit positions
//   {"sc_pos": [[x,y],...], "ue_pos": [[x,y],...]}
// or a generated topology
//   {"topology": {"area_side_m": 500, "density_per_km2": 24,
//                 "link_distance_m": 25, "seed": 7}}
inline rsl::MmwaveScenario scenario_from_json(const json& j) {
    rsl::MmwaveScenario sc;
    if (j.contains("topology")) {
        const json& t = j.at("topology");
        sc = rsl::MmwaveScenario::random_topology(
            t.value("area_side_m", 500.0), t.value("density_per_km2", 24.0),
            t.value("link_distance_m", 25.0), t.value("seed", 1));
    } else if (j.contains("sc_pos") && j.contains("ue_pos")) {
        for (const auto& p : j.at("sc_pos"))
            sc.sc_pos.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        for (const auto& p : j.at("ue_pos"))
            sc.ue_pos.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    } else {
        throw ParameterError("scenario config needs either topology or positions");
    }
    sc.carrier_ghz = j.value("carrier_ghz", sc.carrier_ghz);
    sc.bandwidth_hz = j.value("bandwidth_hz", sc.bandwidth_hz);
    sc.tx_antennas = j.value("tx_antennas", sc.tx_antennas);
    sc.rx_antennas = j.value("rx_antennas", sc.rx_antennas);
    sc.blockage_decay_per_m = j.value("blockage_decay_per_m", sc.blockage_decay_per_m);
    sc.pl_los_intercept_db = j.value("pl_los_intercept_db", sc.pl_los_intercept_db);
    sc.pl_los_slope_db = j.value("pl_los_slope_db", sc.pl_los_slope_db);
    sc.pl_nlos_intercept_db = j.value("pl_nlos_intercept_db", sc.pl_nlos_intercept_db);
    sc.pl_nlos_slope_db = j.value("pl_nlos_slope_db", sc.pl_nlos_slope_db);
    sc.noise_figure_db = j.value("noise_figure_db", sc.noise_figure_db);
    sc.pointing_sigma_rad = j.value("pointing_sigma_rad", sc.pointing_sigma_rad);
    sc.sidelobe_gain = j.value("sidelobe_gain", sc.sidelobe_gain);
    sc.mu_rsl = j.value("mu_rsl", sc.mu_rsl);
    sc.kappa_rsl = j.value("kappa_rsl", sc.kappa_rsl);
    sc.kappa_csl = j.value("kappa_csl", sc.kappa_csl);
    sc.lambda_exponent = j.value("lambda_exponent", sc.lambda_exponent);
    sc.warmup_fraction = j.value("warmup_fraction", sc.warmup_fraction);
    sc.final_epoch_fraction = j.value("final_epoch_fraction", sc.final_epoch_fraction);
    if (j.contains("beamwidths_rad"))
        sc.grid.beamwidths_rad = j.at("beamwidths_rad").get<std::vector<double>>();
    if (j.contains("powers_dbm"))
        sc.grid.powers_dbm = j.at("powers_dbm").get<std::vector<double>>();
    return sc;
}

}  // namespace tailrisk::cli
