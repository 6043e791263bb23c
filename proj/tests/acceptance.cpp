// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tailrisk/assoc.hpp"
#include "tailrisk/evt.hpp"
#include "tailrisk/mecsim.hpp"
#include "tailrisk/metadist.hpp"
#include "tailrisk/risk.hpp"
#include "tailrisk/rng.hpp"
#include "tailrisk/rsl.hpp"
#include "tailrisk/snc.hpp"

namespace fs = std::filesystem;
using namespace tailrisk;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& details) {
    std::printf("%s  %s (%s)\n", pass ? "PASS" : "FAIL", name.c_str(), details.c_str());
    if (!pass) ++failures;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---- 1. EVT recovery ---------------------------------------------------

void criterion_1() {
    bool pass = true;
    std::string detail;
    double worst_time = 0.0;
    int case_idx = 0;
    for (double xi : {-0.2, 0.0, 0.3}) {
        Rng rng(1000 + case_idx++, "acceptance/evt");
        SampleSet xs;
        xs.values.reserve(100000);
        for (int i = 0; i < 100000; ++i) {
            double u = rng.uniform();
            xs.values.push_back(xi == 0.0 ? -std::log1p(-u)
                                          : (std::pow(1.0 - u, -xi) - 1.0) / xi);
        }
        double t0 = now_seconds();
        evt::GpdParams p = evt::fit_gpd(xs);
        double dt = now_seconds() - t0;
        worst_time = std::max(worst_time, dt);
        bool ok = std::abs(p.xi - xi) <= 0.05 && std::abs(p.sigma_t - 1.0) <= 0.05;
        pass = pass && ok && dt < 1.0;
        detail += "xi=" + fmt(xi) + ": xi_hat=" + fmt(p.xi) +
                  " sigma_hat=" + fmt(p.sigma_t) + "; ";
    }
    report("1. evt-recovery", pass, detail + "max fit time " + fmt(worst_time) + "s");
}

// ---- 2. CVaR-GPD link --------------------------------------------------

void criterion_2() {
    Rng rng(2000, "acceptance/link");
    SampleSet xs;
    for (int i = 0; i < 100000; ++i) xs.values.push_back(rng.exponential(1.0));
    auto rep = risk::cvar_gpd_link_check(xs, {0.05});
    report("2. cvar-gpd-link", rep.rel_err <= 0.05,
           "lhs=" + fmt(rep.lhs) + " rhs=" + fmt(rep.rhs) +
               " rel_err=" + fmt(rep.rel_err));
}

// ---- 3. Risk ordering --------------------------------------------------

void criterion_3() {
    Rng rng(3000, "acceptance/ordering");
    int violations = 0;
    const int sets = 1000, n = 10000;
    for (int s = 0; s < sets; ++s) {
        SampleSet xs;
        xs.values.reserve(n);
        int kind = s % 4;
        for (int i = 0; i < n; ++i) {
            switch (kind) {
                case 0: xs.values.push_back(rng.normal(1.0, 2.0)); break;
                case 1: xs.values.push_back(rng.exponential(1.5)); break;
                case 2: xs.values.push_back(rng.uniform(-2.0, 7.0)); break;
                default: {
                    double u = rng.uniform();
                    xs.values.push_back(std::pow(1.0 - u, -0.25) - 1.0);  // heavy tail
                }
            }
        }
        risk::RiskLevel a{0.05};
        double v = risk::var_empirical(xs, a);
        double c = risk::cvar_empirical(xs, a);
        double e = risk::evar_empirical(xs, a).value;
        if (!(v <= c + 1e-6 && c <= e + 1e-6)) ++violations;
    }
    auto gauss = risk::MgfHandle::from_log_mgf([](double z) { return 0.5 * z * z; });
    double analytic = risk::evar(gauss, {0.05}).value;
    double expected = std::sqrt(-2.0 * std::log(0.05));
    bool gauss_ok = std::abs(analytic - expected) <= 1e-3;
    report("3. risk-ordering", violations == 0 && gauss_ok,
           "ordering violations " + std::to_string(violations) + "/1000; gaussian evar=" +
               fmt(analytic) + " vs " + fmt(expected));
}

// ---- 4. Effective-bandwidth decay --------------------------------------

void criterion_4() {
    double t0 = now_seconds();
    snc::DecayResult r = snc::decay_rate(snc::poisson_arrivals(1.0), 2.0);
    bool theta_ok = std::abs(r.theta_star - 1.25643) <= 1e-5;

    auto poisson1 = [](Rng& rng) { return static_cast<double>(rng.poisson(1.0)); };
    auto const2 = [](Rng&) { return 2.0; };
    snc::QueueSimResult res = snc::queue_sim(poisson1, const2, 10000000, 4017, 0.1);

    std::vector<double> q = res.queue;
    std::sort(q.begin(), q.end());
    double n = static_cast<double>(q.size());
    std::vector<std::pair<double, double>> pts;
    for (double x = 2.0; x <= 60.0; x += 1.0) {
        std::size_t idx = static_cast<std::size_t>(
            std::upper_bound(q.begin(), q.end(), x) - q.begin());
        double surv = (n - static_cast<double>(idx)) / n;
        if (surv < 1e-5) break;
        pts.emplace_back(x, std::log(surv));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double m = static_cast<double>(pts.size());
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double dt = now_seconds() - t0;
    bool slope_ok = std::abs(-slope - r.theta_star) / r.theta_star <= 0.10;
    report("4. effective-bandwidth-decay", theta_ok && slope_ok && dt < 30.0,
           "theta*=" + fmt(r.theta_star) + " sim slope=" + fmt(-slope) + " time=" +
               fmt(dt) + "s");
}

// ---- 5. SNC bound validity ----------------------------------------------

void criterion_5() {
    bool pass = true;
    std::string detail;
    int cell = 0;
    for (double gbar : {5.0, 10.0}) {
        for (double rho : {0.5, 1.0}) {
            snc::ArrivalEnvelope env{rho, 0.0};
            snc::RayleighService svc{gbar};
            auto arr = [rho](Rng&) { return rho; };
            auto ray = [gbar](Rng& rng) {
                return std::log2(1.0 + rng.exponential(gbar));
            };
            snc::QueueSimResult res =
                snc::queue_sim(arr, ray, 1000000, 5000 + cell++, 0.1);
            double prev_bound = 1.0;
            for (int w = 1; w <= 10; ++w) {
                double bound = snc::delay_violation_bound(w, env, svc).bound;
                double freq = res.violation_frequency(w);
                if (freq > bound || bound > prev_bound + 1e-12) pass = false;
                prev_bound = bound;
            }
            detail += "(g=" + fmt(gbar) + ",rho=" + fmt(rho) + ") ";
        }
    }
    report("5. snc-bound-validity", pass, detail + "all cells freq <= bound, bound monotone");
}

// ---- 6. MEC constraints --------------------------------------------------

void criterion_6() {
    mec::MecConfig cfg;
    cfg.horizon = 1000000;
    cfg.seed = 6001;
    mec::MecRunResult run_t = mec::mec_run(cfg);

    mec::MecConfig cfg2 = cfg;
    cfg2.horizon = 2000000;
    mec::MecRunResult run_2t = mec::mec_run(cfg2);

    bool viol_ok = run_t.report.violation_freq <= 1.1 * cfg.epsilon;
    mec::TailAnalysis ta = mec::mec_tail_analysis(run_t.trace, cfg.threshold_bits);
    bool ks_ok = ta.ks_distance <= 0.05;
    bool sublinear = true;
    for (int i = 0; i < 3; ++i) {
        double at_t = run_t.report.q_avg[i] / static_cast<double>(cfg.horizon);
        double at_2t = run_2t.report.q_avg[i] / static_cast<double>(cfg2.horizon);
        if (at_t > 1e-12 && at_2t > 0.55 * at_t) sublinear = false;
    }
    report("6. mec-constraints", viol_ok && ks_ok && sublinear,
           "violation_freq=" + fmt(run_t.report.violation_freq) + " (eps=" +
               fmt(cfg.epsilon) + ") ks=" + fmt(ta.ks_distance) + " n_excess=" +
               std::to_string(ta.n_excesses) + (sublinear ? " q-sublinear" : " q-growing"));
}

// ---- 7. mmWave learning --------------------------------------------------

void criterion_7() {
    const int seeds = 20;
    const std::uint64_t episodes = 6000;
    int ordered = 0;
    for (int s = 0; s < seeds; ++s) {
        rsl::MmwaveScenario sc =
            rsl::MmwaveScenario::random_topology(500.0, 24.0, 25.0, 7000 + s);
        double var_rsl =
            rsl::simulate_mmwave(sc, rsl::Scheme::RSL, episodes, 7100 + s).summary.variance;
        double var_csl =
            rsl::simulate_mmwave(sc, rsl::Scheme::CSL, episodes, 7100 + s).summary.variance;
        double var_bl1 =
            rsl::simulate_mmwave(sc, rsl::Scheme::BL1, episodes, 7100 + s).summary.variance;
        if (var_rsl < var_csl && var_rsl < var_bl1) ++ordered;
    }
    bool ordering_ok = ordered >= 18;  // >= 90% of 20 seeds

    rsl::MmwaveScenario eq = rsl::MmwaveScenario::random_topology(400.0, 24.0, 25.0, 71);
    eq.mu_rsl = 0.0;
    eq.kappa_rsl = eq.kappa_csl;
    bool equal = rsl::simulate_mmwave(eq, rsl::Scheme::RSL, 1500, 72).rates_gbps.values ==
                 rsl::simulate_mmwave(eq, rsl::Scheme::CSL, 1500, 72).rates_gbps.values;
    report("7. mmwave-risk-learning", ordering_ok && equal,
           "variance ordering in " + std::to_string(ordered) + "/20 seeds; mu->0 " +
               (equal ? "trajectories identical" : "trajectories diverge"));
}

// ---- 8. Meta distribution -------------------------------------------------

void criterion_8() {
    meta::PoissonFieldConfig cfg;
    cfg.intensity = 1e-4;
    cfg.link_distance = 50.0;
    cfg.path_loss_exponent = 4.0;
    cfg.sir_threshold = 1.0;
    cfg.realizations = 10000;
    cfg.seed = 8000;
    SampleSet ps = meta::poisson_field_success_samples(cfg);
    meta::BetaParams bp = meta::beta_from_moments(meta::moments_from_samples(ps));

    std::vector<double> s = sorted_values(ps);
    double n = static_cast<double>(s.size());
    double sup = 0.0;
    for (double x = 0.0; x <= 1.0; x += 0.002) {
        std::size_t idx = static_cast<std::size_t>(
            std::upper_bound(s.begin(), s.end(), x) - s.begin());
        double emp = (n - static_cast<double>(idx)) / n;
        sup = std::max(sup, std::abs(emp - meta::meta_ccdf(x, bp)));
    }

    bool round_trip = true;
    for (double a = 0.1; a <= 50.0; a *= 2.1) {
        for (double b = 0.1; b <= 50.0; b *= 2.1) {
            double m1 = a / (a + b);
            double m2 = m1 * (a + 1.0) / (a + b + 1.0);
            meta::BetaParams r = meta::beta_from_moments({m1, m2});
            if (std::abs(r.a - a) > 1e-9 * a || std::abs(r.b - b) > 1e-9 * b)
                round_trip = false;
        }
    }
    report("8. meta-distribution", sup <= 0.05 && round_trip,
           "sup-distance=" + fmt(sup) + (round_trip ? ", moment round-trip 1e-9"
                                                    : ", round-trip FAILED"));
}

// ---- 9. Association --------------------------------------------------------

void criterion_9() {
    Rng rng(9000, "acceptance/assoc");
    int dominance_violations = 0;
    for (int rep = 0; rep < 500; ++rep) {
        assoc::AssocInstance inst;
        inst.n_bs = rep % 2 == 0 ? 3 : 4;
        inst.n_ue = 3;
        inst.gamma.resize(inst.n_bs * inst.n_ue);
        for (double& g : inst.gamma) g = rng.exponential(3.0);
        inst.vartheta = rng.uniform(0.2, 2.0);
        inst.varphi = rng.uniform(0.0, 2.5);
        if (assoc::greedy_assoc(inst).second >
            assoc::brute_force_opt(inst).second + 1e-9)
            ++dominance_violations;
    }

    assoc::EbarResult mc = assoc::monte_carlo_ebar(
        3, 3, assoc::rayleigh_channel_sampler(3, 3, 10.0), 1.0, 1.0, 2000, 9001);
    bool stderr_ok = mc.stderr_defined && mc.stderr_mean / mc.mean <= 0.01;

    std::vector<double> fixed{5.0, 1.0, 2.0, 4.0};
    assoc::AssocInstance inst;
    inst.n_bs = inst.n_ue = 2;
    inst.gamma = fixed;
    inst.vartheta = 1.0;
    inst.varphi = 3.0;
    assoc::EbarResult degenerate = assoc::monte_carlo_ebar(
        2, 2, [&](Rng&) { return fixed; }, 1.0, 3.0, 100, 9002);
    bool degenerate_ok = degenerate.mean == assoc::brute_force_opt(inst).second &&
                         degenerate.stderr_mean == 0.0;

    report("9. association", dominance_violations == 0 && stderr_ok && degenerate_ok,
           "dominance violations " + std::to_string(dominance_violations) +
               "/500; ebar rel stderr=" + fmt(mc.stderr_mean / mc.mean) +
               (degenerate_ok ? "; degenerate exact" : "; degenerate mismatch"));
}

// ---- 10. CLI determinism ----------------------------------------------------

struct CliRun {
    int exit_code;
    std::string stdout_text;
};

CliRun run_cli(const std::string& args, const fs::path& out_file) {
    std::string cmd = std::string(TAILRISK_CLI_PATH) + " " + args + " > " +
                      out_file.string() + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return {rc == -1 ? -1 : WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_10() {
    fs::path dir = fs::temp_directory_path() / "tailrisk_acceptance";
    fs::create_directories(dir);
    auto wf = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name);
        out << content;
        return (dir / name).string();
    };

    std::string scen = wf("scenario.json",
                          "{\"topology\": {\"area_side_m\": 300, \"density_per_km2\": 24,"
                          " \"link_distance_m\": 25, \"seed\": 4}}");
    std::string queue = wf("queue.json",
                           "{\"arrival\": {\"model\": \"poisson\", \"mean\": 1.0},"
                           " \"service\": {\"kind\": \"rayleigh\", \"mean_snr\": 10}}");
    std::string field = wf("field.json", "{\"realizations\": 1000}");
    std::string mecc = wf("mec.json", "{\"horizon\": 50000}");

    struct Cmd {
        std::string name, args;
        std::vector<std::string> outputs;
    };
    std::vector<Cmd> cmds = {
        {"rsl-simulate",
         "rsl simulate --config " + scen + " --scheme RSL --episodes 800 --seed 11 --out " +
             (dir / "r_OUT.csv").string(),
         {(dir / "r_OUT.csv").string()}},
        {"snc-queue-sim",
         "snc queue-sim --config " + queue + " --slots 20000 --seed 12 --out " +
             (dir / "q_OUT.csv").string(),
         {(dir / "q_OUT.csv").string()}},
        {"meta-field",
         "meta field --config " + field + " --seed 13 --out " + (dir / "f_OUT.csv").string(),
         {(dir / "f_OUT.csv").string()}},
        {"mec-run",
         "mec run --config " + mecc + " --seed 14 --out " + (dir / "m_OUT.csv").string(),
         {(dir / "m_OUT.csv").string()}},
        {"assoc-ebar",
         "assoc ebar --bs 3 --ues 3 --mean-snr 10 --vartheta 1 --varphi 1 --draws 300 "
         "--seed 15",
         {}},
    };

    bool pass = true;
    std::string detail;
    for (const Cmd& c : cmds) {
        CliRun first = run_cli(c.args, dir / "stdout1.txt");
        std::vector<std::string> snapshot;
        for (const std::string& f : c.outputs) snapshot.push_back(slurp(f));
        CliRun second = run_cli(c.args, dir / "stdout2.txt");
        bool same = first.exit_code == 0 && second.exit_code == 0 &&
                    first.stdout_text == second.stdout_text;
        for (std::size_t i = 0; i < c.outputs.size(); ++i)
            same = same && snapshot[i] == slurp(c.outputs[i]);
        if (!same) {
            pass = false;
            detail += c.name + " DIFFERS; ";
        }
    }
    report("10. cli-determinism", pass,
           pass ? "all stochastic subcommands byte-identical" : detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
