// tailrisk command-line front end: every analysis and simulator behind
// deterministic, file-based I/O. Exit codes: 0 success, 1 usage error,
// 2 domain or numeric error (the message names the failing precondition).

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailrisk/assoc.hpp"
#include "tailrisk/errors.hpp"
#include "tailrisk/evt.hpp"
#include "tailrisk/mecsim.hpp"
#include "tailrisk/metadist.hpp"
#include "tailrisk/risk.hpp"
#include "tailrisk/rng.hpp"
#include "tailrisk/rsl.hpp"
#include "tailrisk/snc.hpp"

#include "io_util.hpp"
#include "model_config.hpp"

namespace tr = tailrisk;
using tr::cli::fmt;
using tr::cli::print_kv;

namespace {

std::function<double(tr::Rng&)> arrival_sampler_from_json(const tr::cli::json& j) {
    std::string model = j.value("model", "poisson");
    if (model == "poisson") {
        double mean = j.value("mean", 1.0);
        return [mean](tr::Rng& rng) { return static_cast<double>(rng.poisson(mean)); };
    }
    if (model == "deterministic") {
        double rate = j.value("rate", 1.0);
        return [rate](tr::Rng&) { return rate; };
    }
    if (model == "bernoulli") {
        double p = j.value("p", 0.5);
        double batch = j.value("batch", 1.0);
        return [p, batch](tr::Rng& rng) { return rng.bernoulli(p) ? batch : 0.0; };
    }
    throw tr::ParameterError("unknown arrival model: " + model);
}

std::function<double(tr::Rng&)> service_sampler_from_json(const tr::cli::json& j) {
    tr::snc::ServiceModel svc = tr::cli::service_from_json(j);
    if (std::holds_alternative<tr::snc::ConstantService>(svc)) {
        double c = std::get<tr::snc::ConstantService>(svc).bits_per_slot;
        return [c](tr::Rng&) { return c; };
    }
    double mean_snr = std::get<tr::snc::RayleighService>(svc).mean_snr;
    return [mean_snr](tr::Rng& rng) {
        return std::log2(1.0 + rng.exponential(mean_snr));
    };
}

tr::assoc::AssocInstance instance_from_files(const std::string& gamma_path,
                                             double vartheta, double varphi,
                                             bool power_split) {
    auto rows = tr::cli::read_matrix_csv(gamma_path);
    tr::assoc::AssocInstance inst;
    inst.n_bs = rows.size();
    inst.n_ue = rows.front().size();
    for (const auto& r : rows)
        inst.gamma.insert(inst.gamma.end(), r.begin(), r.end());
    inst.vartheta = vartheta;
    inst.varphi = varphi;
    inst.power_split = power_split;
    return inst;
}

void write_association_csv(const std::string& path, const tr::assoc::Association& x) {
    tr::cli::AtomicWriter w(path);
    for (std::size_t u = 0; u < x.n_ue; ++u)
        w.stream() << (u ? "," : "") << "ue" << u;
    w.stream() << "\n";
    for (std::size_t b = 0; b < x.n_bs; ++b) {
        for (std::size_t u = 0; u < x.n_ue; ++u)
            w.stream() << (u ? "," : "") << int(x.x[b * x.n_ue + u]);
        w.stream() << "\n";
    }
    w.commit();
}

struct CommonOpts {
    std::string in_path, out_path, config_path;
    double alpha = 0.05;
    std::uint64_t seed = 0;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tail, risk and scale analyses for low-latency systems"};
    app.require_subcommand(1);

    CommonOpts opt;
    int exit_code = 0;

    // ---- evt ----------------------------------------------------------
    auto* evt_cmd = app.add_subcommand("evt", "extreme value theory fits and reductions");
    evt_cmd->require_subcommand(1);

    std::size_t min_samples = tr::evt::kDefaultMinFitSamples;
    auto* fit_gpd = evt_cmd->add_subcommand("fit-gpd", "PWM fit of a GPD to excesses");
    fit_gpd->add_option("--in", opt.in_path, "excess samples CSV")->required();
    fit_gpd->add_option("--min-samples", min_samples, "minimum accepted sample count");
    fit_gpd->callback([&] {
        auto p = tr::evt::fit_gpd(tr::cli::read_samples_csv(opt.in_path), min_samples);
        print_kv("sigma_t", p.sigma_t);
        print_kv("xi", p.xi);
    });

    auto* fit_gev = evt_cmd->add_subcommand("fit-gev", "PWM fit of a GEV to block maxima");
    fit_gev->add_option("--in", opt.in_path, "maxima samples CSV")->required();
    fit_gev->add_option("--min-samples", min_samples, "minimum accepted sample count");
    fit_gev->callback([&] {
        auto p = tr::evt::fit_gev(tr::cli::read_samples_csv(opt.in_path), min_samples);
        print_kv("mu", p.mu);
        print_kv("sigma", p.sigma);
        print_kv("xi", p.xi);
    });

    double threshold = 0.0;
    auto* pot = evt_cmd->add_subcommand("pot", "peaks-over-threshold excesses");
    pot->add_option("--in", opt.in_path)->required();
    pot->add_option("--threshold", threshold, "exceedance threshold d")->required();
    pot->add_option("--out", opt.out_path, "excess CSV")->required();
    pot->callback([&] {
        auto ex = tr::evt::pot_excesses(tr::cli::read_samples_csv(opt.in_path), threshold);
        tr::cli::write_samples_csv(opt.out_path, "excess", ex.values);
        print_kv("n_excesses", static_cast<double>(ex.size()));
    });

    std::size_t block = 1;
    auto* blocks = evt_cmd->add_subcommand("blocks", "block maxima reduction");
    blocks->add_option("--in", opt.in_path)->required();
    blocks->add_option("--block", block, "block size m")->required();
    blocks->add_option("--out", opt.out_path, "maxima CSV")->required();
    blocks->callback([&] {
        auto mx = tr::evt::block_maxima(tr::cli::read_samples_csv(opt.in_path), block);
        tr::cli::write_samples_csv(opt.out_path, "maximum", mx.values);
        print_kv("n_blocks", static_cast<double>(mx.size()));
    });

    // ---- risk ---------------------------------------------------------
    auto* risk_cmd = app.add_subcommand("risk", "risk measures on empirical samples");
    risk_cmd->require_subcommand(1);

    auto add_risk_sub = [&](const char* name, const char* desc, auto fn) {
        auto* sub = risk_cmd->add_subcommand(name, desc);
        sub->add_option("--in", opt.in_path, "samples CSV")->required();
        sub->add_option("--alpha", opt.alpha, "risk level in (0, 1]");
        sub->callback([&, fn] {
            fn(tr::cli::read_samples_csv(opt.in_path), tr::risk::RiskLevel{opt.alpha});
        });
        return sub;
    };
    add_risk_sub("var", "empirical value-at-risk",
                 [](const tr::SampleSet& xs, tr::risk::RiskLevel a) {
                     print_kv("var", tr::risk::var_empirical(xs, a));
                 });
    add_risk_sub("cvar", "empirical conditional value-at-risk",
                 [](const tr::SampleSet& xs, tr::risk::RiskLevel a) {
                     print_kv("cvar", tr::risk::cvar_empirical(xs, a));
                 });
    add_risk_sub("evar", "empirical entropic value-at-risk",
                 [](const tr::SampleSet& xs, tr::risk::RiskLevel a) {
                     auto r = tr::risk::evar_empirical(xs, a);
                     print_kv("evar", r.value);
                     print_kv("z_star", r.z_star);
                     print_kv("boundary", r.boundary ? 1.0 : 0.0);
                 });
    add_risk_sub("link-check", "CVaR minus VaR against the fitted GPD mean",
                 [](const tr::SampleSet& xs, tr::risk::RiskLevel a) {
                     auto rep = tr::risk::cvar_gpd_link_check(xs, a);
                     print_kv("lhs", rep.lhs);
                     print_kv("rhs", rep.rhs);
                     print_kv("rel_err", rep.rel_err);
                     print_kv("var", rep.var);
                     print_kv("xi", rep.fit.xi);
                     print_kv("sigma_t", rep.fit.sigma_t);
                     print_kv("n_excesses", static_cast<double>(rep.n_excesses));
                 });

    // ---- rsl ----------------------------------------------------------
    auto* rsl_cmd = app.add_subcommand("rsl", "risk-sensitive learning case study");
    rsl_cmd->require_subcommand(1);
    std::string scheme_name = "RSL";
    std::uint64_t episodes = 4000;
    auto* simulate = rsl_cmd->add_subcommand("simulate", "mmWave beam/power learning run");
    simulate->add_option("--config", opt.config_path, "scenario JSON")->required();
    simulate->add_option("--scheme", scheme_name, "RSL, CSL or BL1");
    simulate->add_option("--episodes", episodes, "learning slots");
    simulate->add_option("--seed", opt.seed, "master seed")->required();
    simulate->add_option("--out", opt.out_path, "CCDF CSV (grid_point, ccdf)");
    simulate->callback([&] {
        auto sc = tr::cli::scenario_from_json(tr::cli::load_config(opt.config_path));
        auto res = tr::rsl::simulate_mmwave(sc, tr::rsl::scheme_from_string(scheme_name),
                                            episodes, opt.seed);
        print_kv("n_rates", static_cast<double>(res.rates_gbps.size()));
        print_kv("empty", res.summary.empty ? 1.0 : 0.0);
        if (!res.summary.empty) {
            print_kv("mean", res.summary.mean);
            print_kv("variance", res.summary.variance);
        }
        if (!opt.out_path.empty()) {
            tr::cli::AtomicWriter w(opt.out_path);
            w.stream() << "grid_point,ccdf\n";
            for (auto& [g, p] : res.summary.ccdf)
                w.stream() << fmt(g) << "," << fmt(p) << "\n";
            w.commit();
        }
    });

    // ---- snc ----------------------------------------------------------
    auto* snc_cmd = app.add_subcommand("snc", "effective bandwidth and delay bounds");
    snc_cmd->require_subcommand(1);

    double theta = 1.0, capacity = 1.0;
    auto* effbw = snc_cmd->add_subcommand("effbw", "effective bandwidth Lambda(theta)/theta");
    effbw->add_option("--config", opt.config_path, "arrival model JSON")->required();
    effbw->add_option("--theta", theta, "positive MGF argument")->required();
    effbw->callback([&] {
        auto lam = tr::cli::arrival_from_json(tr::cli::load_config(opt.config_path));
        print_kv("effective_bandwidth", tr::snc::effective_bandwidth(lam, theta));
    });

    auto* decay = snc_cmd->add_subcommand("decay", "queue tail decay rate at constant capacity");
    decay->add_option("--config", opt.config_path, "arrival model JSON")->required();
    decay->add_option("--capacity", capacity, "constant service rate")->required();
    decay->callback([&] {
        auto lam = tr::cli::arrival_from_json(tr::cli::load_config(opt.config_path));
        auto r = tr::snc::decay_rate(lam, capacity);
        print_kv("zero_tail", r.zero_tail ? 1.0 : 0.0);
        if (!r.zero_tail) print_kv("theta_star", r.theta_star);
    });

    int wmax = 10;
    auto* bound = snc_cmd->add_subcommand("bound", "delay-violation bound sweep over w");
    bound->add_option("--config", opt.config_path,
                      "JSON with rho, sigma and a service model")->required();
    bound->add_option("--wmax", wmax, "largest delay bound to evaluate");
    bound->add_option("--out", opt.out_path, "CSV (w, bound, argmin_s)");
    bound->callback([&] {
        auto j = tr::cli::load_config(opt.config_path);
        tr::snc::ArrivalEnvelope env{j.value("rho", 1.0), j.value("sigma", 0.0)};
        auto svc = tr::cli::service_from_json(j.value("service", tr::cli::json::object()));
        std::vector<std::array<double, 3>> rows;
        for (int w = 1; w <= wmax; ++w) {
            auto b = tr::snc::delay_violation_bound(w, env, svc);
            rows.push_back({static_cast<double>(w), b.bound, b.s_star});
        }
        print_kv("wmax", static_cast<double>(wmax));
        print_kv("bound_at_wmax", rows.back()[1]);
        if (!opt.out_path.empty()) {
            tr::cli::AtomicWriter w(opt.out_path);
            w.stream() << "w,bound,argmin_s\n";
            for (auto& r : rows)
                w.stream() << fmt(r[0]) << "," << fmt(r[1]) << "," << fmt(r[2]) << "\n";
            w.commit();
        }
    });

    std::uint64_t slots = 1000000;
    auto* qsim = snc_cmd->add_subcommand("queue-sim", "discrete-time queue simulation");
    qsim->add_option("--config", opt.config_path,
                     "JSON with arrival and service models")->required();
    qsim->add_option("--slots", slots, "simulated slots");
    qsim->add_option("--seed", opt.seed, "master seed")->required();
    qsim->add_option("--out", opt.out_path, "trace CSV (t, q)");
    qsim->callback([&] {
        auto j = tr::cli::load_config(opt.config_path);
        auto arr = arrival_sampler_from_json(j.value("arrival", tr::cli::json::object()));
        auto svc = service_sampler_from_json(j.value("service", tr::cli::json::object()));
        auto res = tr::snc::queue_sim(arr, svc, slots, opt.seed,
                                      j.value("warmup_fraction", 0.0));
        print_kv("mean_queue", res.mean_queue);
        print_kv("slots", static_cast<double>(res.queue.size()));
        for (int w : {1, 2, 5, 10})
            print_kv("violation_freq_w" + std::to_string(w), res.violation_frequency(w));
        if (!opt.out_path.empty()) {
            tr::cli::AtomicWriter w(opt.out_path);
            w.stream() << "t,q\n";
            for (std::size_t t = 0; t < res.queue.size(); ++t)
                w.stream() << t << "," << fmt(res.queue[t]) << "\n";
            w.commit();
        }
    });

    // ---- meta ---------------------------------------------------------
    auto* meta_cmd = app.add_subcommand("meta", "meta distribution of conditional success");
    meta_cmd->require_subcommand(1);

    auto* moments = meta_cmd->add_subcommand("moments", "first two moments of success samples");
    moments->add_option("--in", opt.in_path, "success probability CSV")->required();
    moments->callback([&] {
        auto m = tr::meta::moments_from_samples(tr::cli::read_samples_csv(opt.in_path));
        print_kv("m1", m.m1);
        print_kv("m2", m.m2);
    });

    double m1_arg = -1.0, m2_arg = -1.0;
    auto* beta = meta_cmd->add_subcommand("beta", "beta approximation from moments");
    beta->add_option("--in", opt.in_path, "success probability CSV");
    beta->add_option("--m1", m1_arg, "first moment (overrides --in)");
    beta->add_option("--m2", m2_arg, "second moment (overrides --in)");
    beta->callback([&] {
        tr::meta::MetaMoments m;
        if (m1_arg >= 0.0 && m2_arg >= 0.0) {
            m = {m1_arg, m2_arg};
        } else if (!opt.in_path.empty()) {
            m = tr::meta::moments_from_samples(tr::cli::read_samples_csv(opt.in_path));
        } else {
            throw CLI::ValidationError("beta", "needs --in or both --m1 and --m2");
        }
        auto bp = tr::meta::beta_from_moments(m);
        print_kv("a", bp.a);
        print_kv("b", bp.b);
        print_kv("m1", m.m1);
        print_kv("m2", m.m2);
    });

    auto* field = meta_cmd->add_subcommand("field", "Poisson-field success probability samples");
    field->add_option("--config", opt.config_path, "field JSON")->required();
    field->add_option("--seed", opt.seed, "master seed")->required();
    field->add_option("--out", opt.out_path, "samples CSV")->required();
    field->callback([&] {
        auto cfg = tr::cli::field_from_json(tr::cli::load_config(opt.config_path));
        cfg.seed = opt.seed;
        auto samples = tr::meta::poisson_field_success_samples(cfg);
        tr::cli::write_samples_csv(opt.out_path, "p_success", samples.values);
        auto m = tr::meta::moments_from_samples(samples);
        print_kv("n", static_cast<double>(samples.size()));
        print_kv("m1", m.m1);
        print_kv("m2", m.m2);
    });

    // ---- mec ----------------------------------------------------------
    auto* mec_cmd = app.add_subcommand("mec", "MEC task-queue control simulator");
    mec_cmd->require_subcommand(1);

    auto* mec_run_cmd = mec_cmd->add_subcommand("run", "drift-plus-penalty controlled run");
    mec_run_cmd->add_option("--config", opt.config_path, "MEC config JSON");
    mec_run_cmd->add_option("--seed", opt.seed, "master seed")->required();
    mec_run_cmd->add_option("--out", opt.out_path, "trace CSV (t, X, Q1, Q2, Q3, f, offload)");
    mec_run_cmd->callback([&] {
        tr::mec::MecConfig cfg;
        if (!opt.config_path.empty())
            cfg = tr::cli::mec_from_json(tr::cli::load_config(opt.config_path));
        cfg.seed = opt.seed;
        auto res = tr::mec::mec_run(cfg);
        const auto& rep = res.report;
        print_kv("violation_freq", rep.violation_freq);
        print_kv("epsilon", cfg.epsilon);
        print_kv("meets_epsilon", rep.meets_epsilon ? 1.0 : 0.0);
        print_kv("excess_empty", rep.excess_empty ? 1.0 : 0.0);
        print_kv("cond_mean_excess", rep.cond_mean_excess);
        print_kv("mean_bound", rep.mean_bound);
        print_kv("meets_mean", rep.meets_mean ? 1.0 : 0.0);
        print_kv("cond_second_moment_excess", rep.cond_second_moment_excess);
        print_kv("second_bound", rep.second_bound);
        print_kv("meets_second", rep.meets_second ? 1.0 : 0.0);
        for (int i = 0; i < 3; ++i) {
            print_kv("q" + std::to_string(i + 1) + "_final", rep.q_final[i]);
            print_kv("q" + std::to_string(i + 1) + "_avg", rep.q_avg[i]);
        }
        if (!opt.out_path.empty()) {
            tr::cli::AtomicWriter w(opt.out_path);
            w.stream() << "t,X,Q1,Q2,Q3,f,offload\n";
            const auto& tr_ = res.trace;
            for (std::size_t t = 0; t < tr_.x.size(); ++t)
                w.stream() << t << "," << fmt(tr_.x[t]) << "," << fmt(tr_.q1[t]) << ","
                           << fmt(tr_.q2[t]) << "," << fmt(tr_.q3[t]) << ","
                           << fmt(tr_.freq[t]) << "," << int(tr_.offload[t]) << "\n";
            w.commit();
        }
    });

    double warmup_fraction = 0.1;
    auto* analyze = mec_cmd->add_subcommand("analyze", "EVT post-analysis of a trace");
    analyze->add_option("--in", opt.in_path, "trace CSV from mec run")->required();
    analyze->add_option("--threshold", threshold, "queue threshold d")->required();
    analyze->add_option("--warmup-fraction", warmup_fraction, "leading fraction to discard");
    analyze->add_option("--out", opt.out_path, "queue CCDF CSV");
    analyze->callback([&] {
        auto rows = tr::cli::read_matrix_csv(opt.in_path);
        tr::mec::QueueTrace trace;
        for (const auto& r : rows) {
            if (r.size() < 2)
                throw tr::ParameterError("trace rows need at least columns t, X");
            trace.x.push_back(r[1]);
        }
        trace.warmup =
            static_cast<std::uint64_t>(warmup_fraction * static_cast<double>(trace.x.size()));
        auto ta = tr::mec::mec_tail_analysis(trace, threshold);
        print_kv("xi", ta.fit.xi);
        print_kv("sigma_t", ta.fit.sigma_t);
        print_kv("ks_distance", ta.ks_distance);
        print_kv("n_excesses", static_cast<double>(ta.n_excesses));
        if (!opt.out_path.empty()) {
            tr::cli::AtomicWriter w(opt.out_path);
            w.stream() << "x,ccdf\n";
            for (auto& [g, p] : ta.ccdf) w.stream() << fmt(g) << "," << fmt(p) << "\n";
            w.commit();
        }
    });

    // ---- assoc --------------------------------------------------------
    auto* assoc_cmd = app.add_subcommand("assoc", "multi-connectivity association");
    assoc_cmd->require_subcommand(1);

    std::string gamma_path;
    double vartheta = 1.0, varphi = 1.0;
    bool power_split = false, printed_objective = false;

    auto add_opt_solver = [&](const char* name, const char* desc, bool greedy) {
        auto* sub = assoc_cmd->add_subcommand(name, desc);
        sub->add_option("--gamma", gamma_path, "SNR matrix CSV (BS rows, UE columns)")
            ->required();
        sub->add_option("--vartheta", vartheta, "per-connection BS cost");
        sub->add_option("--varphi", varphi, "per-extra-connection UE cost");
        sub->add_flag("--power-split", power_split, "divide BS power across its links");
        sub->add_flag("--printed-objective", printed_objective,
                      "also report the as-printed objective for audit");
        sub->add_option("--out", opt.out_path, "association matrix CSV");
        sub->callback([&, greedy] {
            auto inst = instance_from_files(gamma_path, vartheta, varphi, power_split);
            auto [x, value] = greedy ? tr::assoc::greedy_assoc(inst)
                                     : tr::assoc::brute_force_opt(inst);
            print_kv("value", value);
            print_kv("connections", [&] {
                double c = 0;
                for (auto v : x.x) c += v;
                return c;
            }());
            if (printed_objective)
                print_kv("printed_objective", tr::assoc::network_value_printed(inst, x));
            if (!opt.out_path.empty()) write_association_csv(opt.out_path, x);
        });
    };
    add_opt_solver("brute", "exhaustive optimum (B*U <= 20)", false);
    add_opt_solver("greedy", "greedy heuristic", true);

    std::size_t n_bs = 3, n_ue = 3;
    double mean_snr = 10.0;
    std::uint64_t draws = 2000;
    bool use_greedy = false;
    auto* ebar = assoc_cmd->add_subcommand("ebar", "Monte-Carlo channel-averaged optimum");
    ebar->add_option("--bs", n_bs, "number of BSs");
    ebar->add_option("--ues", n_ue, "number of UEs");
    ebar->add_option("--mean-snr", mean_snr, "Rayleigh mean SNR per link");
    ebar->add_option("--vartheta", vartheta, "per-connection BS cost");
    ebar->add_option("--varphi", varphi, "per-extra-connection UE cost");
    ebar->add_option("--draws", draws, "Monte-Carlo draws");
    ebar->add_flag("--greedy", use_greedy, "greedy inner optimizer (for large instances)");
    ebar->add_option("--seed", opt.seed, "master seed")->required();
    ebar->callback([&] {
        auto res = tr::assoc::monte_carlo_ebar(
            n_bs, n_ue, tr::assoc::rayleigh_channel_sampler(n_bs, n_ue, mean_snr),
            vartheta, varphi, draws, opt.seed, use_greedy);
        print_kv("mean", res.mean);
        print_kv("stderr", res.stderr_mean);
        print_kv("stderr_defined", res.stderr_defined ? 1.0 : 0.0);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const tr::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return exit_code;
}
