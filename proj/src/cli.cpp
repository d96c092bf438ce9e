#include "cvtag/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>

#include "CLI11.hpp"

#include "cvtag/dv_tagging.hpp"
#include "cvtag/errors.hpp"
#include "cvtag/sweep.hpp"

namespace cvtag {

namespace {

unsigned threads_from_env() {
    const char* v = std::getenv("CVTAG_THREADS");
    if (v == nullptr || *v == '\0')
        return 0; // auto
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 0)
        throw config_error("CVTAG_THREADS must be a non-negative integer");
    return static_cast<unsigned>(n);
}

struct CommonOpts {
    std::string preset_name = "table1";
    std::string config_path;
    double v1 = 0.0;
    double v2 = 0.0;
    double loss_db_per_km = -1.0; // <0: use the preset's value
    bool strict_paper = false;
    // parameter overrides; NaN = keep preset value
    double eta = std::nan("");
    double eps_c = std::nan("");
    double v_el = std::nan("");
    double va = std::nan("");
    double beta = std::nan("");
};

// Flat key=value config files are applied by hand after the command line has
// been parsed: a key only takes effect when its flag was not given on the
// command line, so flags always win.  (CLI11 only processes set_config() on
// the top-level app, not on subcommands, hence the manual pass.)
void apply_config_file(CLI::App* cmd, const std::string& path) {
    if (path.empty())
        return;
    std::ifstream f(path);
    if (!f)
        throw config_error("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const auto where = [&] { return path + ":" + std::to_string(line_no); };
        std::string s = line;
        s.erase(0, s.find_first_not_of(" \t"));
        if (s.empty() || s[0] == '#')
            continue;
        s.erase(s.find_last_not_of(" \t\r") + 1);
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw config_error("expected key=value at " + where());
        std::string key = s.substr(0, eq);
        std::string value = s.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        if (key.empty())
            throw config_error("empty key at " + where());
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw config_error("unknown config key '" + key + "' at " + where());
        if (opt->count() > 0)
            continue; // the command line always wins
        try {
            opt->add_result(value.empty() && opt->get_expected_min() == 0 ? "true" : value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw config_error("bad value for '" + key + "' at " + where() + ": " + e.what());
        }
    }
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path,
                    "flat key=value file mirroring the flags; "
                    "command-line flags take precedence");
    cmd->add_option("--preset", o.preset_name, "parameter preset: table1 or table3")
        ->capture_default_str();
    cmd->add_option("--v1", o.v1, "modulation gain variance V1")->capture_default_str();
    cmd->add_option("--v2", o.v2, "detector gain variance V2")->capture_default_str();
    cmd->add_option("--loss-db-per-km", o.loss_db_per_km,
                    "fiber attenuation (default: preset value, 0.2)");
    cmd->add_flag("--strict-paper", o.strict_paper,
                  "use the literal table electronic-noise variance eta*v_el/(1-eta)");
    cmd->add_option("--eta", o.eta, "override detector efficiency");
    cmd->add_option("--eps-c", o.eps_c, "override channel excess noise");
    cmd->add_option("--v-el", o.v_el, "override electronic noise");
    cmd->add_option("--va", o.va, "override modulation variance V_A");
    cmd->add_option("--beta", o.beta, "override reconciliation efficiency (fraction)");
}

void add_grid(CLI::App* cmd, KGrid& g) {
    cmd->add_option("--k-min", g.k_min, "cutoff grid lower bound")->capture_default_str();
    cmd->add_option("--k-max", g.k_max, "cutoff grid upper bound")->capture_default_str();
    cmd->add_option("--k-step", g.step, "cutoff grid step")->capture_default_str();
}

Preset resolve_preset(const CommonOpts& o) {
    Preset p = preset_by_name(o.preset_name);
    if (!std::isnan(o.eta)) p.params.eta = o.eta;
    if (!std::isnan(o.eps_c)) p.params.eps_c = o.eps_c;
    if (!std::isnan(o.v_el)) p.params.v_el = o.v_el;
    if (!std::isnan(o.va)) p.params.V_A = o.va;
    if (!std::isnan(o.beta)) p.params.beta = o.beta;
    if (o.loss_db_per_km >= 0.0) {
        if (!(o.loss_db_per_km > 0.0))
            throw config_error("fiber loss must be > 0 dB/km");
        p.fiber_loss_db_per_km = o.loss_db_per_km;
    }
    return p;
}

SweepConfig make_config(const CommonOpts& o, const Preset& p, const KGrid& grid,
                        unsigned threads) {
    SweepConfig cfg;
    cfg.grid = grid;
    cfg.V1 = o.v1;
    cfg.V2 = o.v2;
    cfg.loss_db_per_km = p.fiber_loss_db_per_km;
    cfg.strict_paper = o.strict_paper;
    cfg.threads = threads;
    return cfg;
}

void print_breakdown(std::ostream& out, double L, double T_c, const CutoffPlan& plan,
                     const KeyRateBreakdown& br) {
    out << "distance_km = " << format_g12(L) << '\n'
        << "T_c = " << format_g12(T_c) << '\n'
        << "k1 = " << format_g12(plan.k1) << '\n'
        << "k2 = " << format_g12(plan.k2) << '\n'
        << "k3 = " << format_g12(plan.k3) << '\n'
        << "p0 = " << format_g12(br.p0) << '\n'
        << "I_AB = " << format_g12(br.I_AB) << '\n'
        << "H_XB = " << format_g12(br.H_XB) << '\n'
        << "chi_BE = " << format_g12(br.chi_BE) << '\n'
        << "rate_signed = " << format_g12(br.rate) << '\n'
        << "rate = " << format_g12(std::max(br.rate, 0.0)) << '\n';
}

void write_output(const std::string& path, const std::string& payload, std::ostream& out) {
    if (path.empty()) {
        out << payload;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw config_error("cannot open output file: " + path);
    f << payload;
    if (!f)
        throw config_error("failed writing output file: " + path);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"CV-QKD tagged key-rate toolkit"};
    app.require_subcommand(1);
    const unsigned threads = threads_from_env();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "distance sweep, CSV output");
    CommonOpts sweep_o;
    KGrid sweep_grid;
    double lmin = 0.0, lmax = 120.0, lstep = 1.0;
    std::string out_path;
    add_common(sweep, sweep_o);
    add_grid(sweep, sweep_grid);
    sweep->add_option("--lmin", lmin, "start distance, km")->capture_default_str();
    sweep->add_option("--lmax", lmax, "end distance, km")->capture_default_str();
    sweep->add_option("--lstep", lstep, "distance step, km")->capture_default_str();
    sweep->add_option("--out", out_path, "output CSV path (default: stdout)");

    // maxdist
    auto* maxdist = app.add_subcommand("maxdist", "maximum secure distance");
    CommonOpts maxdist_o;
    KGrid maxdist_grid;
    add_common(maxdist, maxdist_o);
    add_grid(maxdist, maxdist_grid);

    // rate
    auto* rate = app.add_subcommand("rate", "single-point key-rate breakdown");
    CommonOpts rate_o;
    CutoffPlan rate_plan;
    double rate_distance = 0.0;
    add_common(rate, rate_o);
    rate->add_option("--distance", rate_distance, "distance, km")->capture_default_str();
    rate->add_option("--k1", rate_plan.k1, "modulation cutoff")->capture_default_str();
    rate->add_option("--k2", rate_plan.k2, "channel cutoff")->capture_default_str();
    rate->add_option("--k3", rate_plan.k3, "detection cutoff")->capture_default_str();

    // optimize
    auto* optimize = app.add_subcommand("optimize", "grid-search the cutoff plan");
    CommonOpts opt_o;
    KGrid opt_grid;
    double opt_distance = 0.0;
    add_common(optimize, opt_o);
    add_grid(optimize, opt_grid);
    optimize->add_option("--distance", opt_distance, "distance, km")->capture_default_str();

    // mc-check
    auto* mc = app.add_subcommand("mc-check", "Monte-Carlo vs analytic effective params");
    CommonOpts mc_o;
    std::uint64_t mc_samples = 1000000;
    std::uint64_t mc_seed = 12345;
    double mc_distance = 25.0;
    add_common(mc, mc_o);
    mc->add_option("--distance", mc_distance, "distance, km")->capture_default_str();
    mc->add_option("--samples", mc_samples, "sample count")->capture_default_str();
    mc->add_option("--seed", mc_seed, "rng seed")->capture_default_str();

    // dv
    auto* dv = app.add_subcommand("dv", "discrete-variable tagging calculators");
    dv->require_subcommand(1);
    auto* gllp = dv->add_subcommand("gllp", "K = (1-p) s (1 - H2(delta))");
    DvTaggedInput gllp_in{0.0, 0.0, 0.0};
    gllp->add_option("--p", gllp_in.p_tagged, "tagged fraction")->required();
    gllp->add_option("--s", gllp_in.s, "post-error-correction key length")->required();
    gllp->add_option("--delta", gllp_in.delta, "untagged phase error rate")->required();
    auto* wcp = dv->add_subcommand("wcp", "K = Q1 (1 - H2(e1)) - f Qu H2(Eu)");
    WcpInput wcp_in{0.0, 0.0, 1.0, 0.0, 0.0};
    bool wcp_literal = false;
    wcp->add_option("--q1", wcp_in.Q1, "single-photon gain")->required();
    wcp->add_option("--e-phase", wcp_in.e_phase, "single-photon phase error rate")->required();
    wcp->add_option("--f-u", wcp_in.f_u, "error-correction coefficient")->required();
    wcp->add_option("--qu", wcp_in.Qu, "total gain Q(u)")->required();
    wcp->add_option("--eu", wcp_in.Eu, "total QBER E(u)")->required();
    wcp->add_flag("--literal-linear", wcp_literal,
                  "use the literal f*Qu*Eu correction instead of f*Qu*H2(Eu)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    if (sweep->parsed()) {
        apply_config_file(sweep, sweep_o.config_path);
        const Preset p = resolve_preset(sweep_o);
        SweepConfig cfg = make_config(sweep_o, p, sweep_grid, threads);
        cfg.L_min = lmin;
        cfg.L_max = lmax;
        cfg.L_step = lstep;
        write_output(out_path, to_csv(distance_sweep(p, cfg)), out);
    } else if (maxdist->parsed()) {
        apply_config_file(maxdist, maxdist_o.config_path);
        const Preset p = resolve_preset(maxdist_o);
        const MaxDistResult r = max_secure_distance(p, make_config(maxdist_o, p, maxdist_grid, threads));
        if (r.insecure_at_zero)
            err << "warning: optimized rate non-positive already at 0 km\n";
        out << "max_secure_distance_km = " << format_g12(r.distance_km) << '\n';
    } else if (rate->parsed()) {
        apply_config_file(rate, rate_o.config_path);
        const Preset p = resolve_preset(rate_o);
        const SweepConfig cfg = make_config(rate_o, p, KGrid{}, threads);
        const KeyRateBreakdown br = rate_at_distance(p, rate_distance, cfg, rate_plan);
        const double T_c = transmittance_from_distance(rate_distance, cfg.loss_db_per_km);
        print_breakdown(out, rate_distance, T_c, rate_plan, br);
    } else if (optimize->parsed()) {
        apply_config_file(optimize, opt_o.config_path);
        const Preset p = resolve_preset(opt_o);
        const SweepConfig cfg = make_config(opt_o, p, opt_grid, threads);
        const OptimizeResult r = optimize_at_distance(p, opt_distance, cfg);
        const double T_c = transmittance_from_distance(opt_distance, cfg.loss_db_per_km);
        print_breakdown(out, opt_distance, T_c, r.plan, r.breakdown);
    } else if (mc->parsed()) {
        apply_config_file(mc, mc_o.config_path);
        if (mc_samples == 0)
            throw config_error("--samples must be >= 1");
        const Preset p = resolve_preset(mc_o);
        const SweepConfig cfg = make_config(mc_o, p, KGrid{}, threads);
        const double T_c = transmittance_from_distance(mc_distance, cfg.loss_db_per_km);
        double T_build = T_c;
        if (p.params.eps_c > 0.0)
            T_build = std::min(T_build, 1.0 - 1e-12);
        const Pipeline pipe =
            build_preset_pipeline(p.params.V_A, T_build, p.params.eps_c, p.params.eta,
                                  p.params.v_el, cfg.V1, cfg.V2, cfg.strict_paper);
        const PipelineMoments m = simulate_moments(pipe, mc_samples, mc_seed, threads);
        const EffectiveParams eff = effective_params(pipe);

        const double n = static_cast<double>(m.n);
        const double slope_pred = pipeline_mean_gain(pipe);
        const double slope_emp = m.slope();
        const double var_pred = pipeline_output_variance(pipe);
        const double var_engine =
            eff.eta * eff.T_eff * (p.params.V_A + eff.eps_eff) + 1.0 + eff.v_el;
        const double var_emp = m.var_xo();

        const double mean_xi = m.sum_xi / n;
        const double var_xi = m.sum_xi2 / n - mean_xi * mean_xi;
        const double resid = std::max(var_emp - slope_emp * slope_emp * var_xi, 0.0);
        const double se_slope = std::sqrt(resid / (n * var_xi));
        const double se_var = var_emp * std::sqrt(2.0 / n);

        const double slope_gap = std::abs(slope_emp - slope_pred);
        const double var_gap = std::abs(var_emp - var_pred);
        out << "samples = " << m.n << '\n'
            << "slope_analytic = " << format_g12(slope_pred) << '\n'
            << "slope_empirical = " << format_g12(slope_emp) << '\n'
            << "slope_gap_sigma = " << format_g12(slope_gap / se_slope) << '\n'
            << "var_analytic = " << format_g12(var_pred) << '\n'
            << "var_engine_form = " << format_g12(var_engine) << '\n'
            << "var_empirical = " << format_g12(var_emp) << '\n'
            << "var_gap_sigma = " << format_g12(var_gap / se_var) << '\n';
        const bool ok = slope_gap <= 3.0 * se_slope && var_gap <= 3.0 * se_var;
        out << "within_3_sigma = " << (ok ? "yes" : "no") << '\n';
        if (!ok)
            return 3;
    } else if (gllp->parsed()) {
        out << "key_length = " << format_g12(gllp_rate(gllp_in)) << '\n';
    } else if (wcp->parsed()) {
        out << "rate = " << format_g12(wcp_rate(wcp_in, wcp_literal)) << '\n';
    }
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        return run(argc, argv, out, err);
    } catch (const numerical_domain_error& e) {
        err << "numerical domain error: " << e.what() << '\n';
        return 2;
    } catch (const config_error& e) {
        err << "configuration error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace cvtag
