#include "cvtag/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <thread>

#include "cvtag/errors.hpp"

namespace cvtag {

namespace {

// A sweep that starts at L = 0 hits T_c = 1, where the lossy-channel noise
// model is singular for eps_c > 0; back the transmittance off by 1e-12
// (rate continuous at that scale) while reporting the true T_c.
constexpr double kUnitTransmittanceBackoff = 1e-12;

Pipeline pipeline_at(const Preset& preset, double T_c, const SweepConfig& cfg) {
    double T_build = T_c;
    if (preset.params.eps_c > 0.0)
        T_build = std::min(T_build, 1.0 - kUnitTransmittanceBackoff);
    return build_preset_pipeline(preset.params.V_A, T_build, preset.params.eps_c,
                                 preset.params.eta, preset.params.v_el, cfg.V1, cfg.V2,
                                 cfg.strict_paper);
}

SweepRow evaluate_row(const Preset& preset, double L, const SweepConfig& cfg) {
    const double T_c = transmittance_from_distance(L, cfg.loss_db_per_km);
    const Pipeline p = pipeline_at(preset, T_c, cfg);
    // the optimizer runs serially here; sweeps parallelize across distances
    const OptimizeResult opt = optimize_cutoffs(preset.params, p, cfg.grid, 1);
    const KeyRateBreakdown& br = opt.breakdown;
    return SweepRow{L,          T_c,     br.p0,     opt.plan.k1,
                    opt.plan.k3, br.I_AB, br.H_XB,   br.chi_BE,
                    br.rate,    std::max(br.rate, 0.0)};
}

double optimized_signed_rate(const Preset& preset, double L, const SweepConfig& cfg,
                             unsigned threads) {
    const double T_c = transmittance_from_distance(L, cfg.loss_db_per_km);
    const Pipeline p = pipeline_at(preset, T_c, cfg);
    return optimize_cutoffs(preset.params, p, cfg.grid, threads).breakdown.rate;
}

} // namespace

Preset preset_table1() {
    return Preset{"table1", SystemParams{0.60, 0.02, 0.02, 18.0, 0.956}, 0.0025, 0.0015, 0.2};
}

Preset preset_table3() {
    return Preset{"table3", SystemParams{0.6134, 0.0081, 0.1523, 7.65, 0.98}, 0.0025, 0.0015, 0.2};
}

Preset preset_by_name(const std::string& name) {
    if (name == "table1")
        return preset_table1();
    if (name == "table3")
        return preset_table3();
    throw config_error("unknown preset '" + name + "' (expected table1 or table3)");
}

double transmittance_from_distance(double L_km, double loss_db_per_km) {
    if (!(L_km >= 0.0))
        throw config_error("distance must be >= 0");
    if (!(loss_db_per_km > 0.0))
        throw config_error("fiber loss must be > 0 dB/km");
    return std::pow(10.0, -loss_db_per_km * L_km / 10.0);
}

std::vector<SweepRow> distance_sweep(const Preset& preset, const SweepConfig& cfg) {
    if (!(cfg.L_min >= 0.0) || cfg.L_max < cfg.L_min)
        throw config_error("distance range requires 0 <= lmin <= lmax");
    if (!(cfg.L_step > 0.0))
        throw config_error("lstep must be > 0");

    const std::size_t n =
        static_cast<std::size_t>((cfg.L_max - cfg.L_min) / cfg.L_step + 1e-9) + 1;
    std::vector<SweepRow> rows(n);

    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_thread_count(cfg.threads), n));
    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < n; i += workers) {
            const double L = cfg.L_min + static_cast<double>(i) * cfg.L_step;
            rows[i] = evaluate_row(preset, L, cfg);
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }

    // Sanity check: while the link is secure the signed rate must fall with
    // distance, and once it has gone non-positive it must never recover.  Deep
    // in the insecure regime the signed rate legitimately relaxes back toward
    // zero from below (every term of the rate vanishes as T -> 0), so an
    // increase between two insecure rows is expected physics, not an error.
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double prev = rows[i - 1].rate_signed;
        const double cur = rows[i].rate_signed;
        if (cur > prev + 1e-12 && (prev > 0.0 || cur > 0.0))
            throw numerical_domain_error(
                "sweep sanity check failed: signed rate increased with distance "
                "inside the secure region");
    }
    return rows;
}

MaxDistResult max_secure_distance(const Preset& preset, const SweepConfig& cfg) {
    // no reconciliation, no key: every term of the rate is non-positive
    if (preset.params.beta == 0.0)
        return MaxDistResult{0.0, true};

    auto rate_at = [&](double L) { return optimized_signed_rate(preset, L, cfg, cfg.threads); };

    if (!(rate_at(0.0) > 0.0))
        return MaxDistResult{0.0, true};

    double lo = 0.0, hi = 1.0;
    while (rate_at(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 16384.0)
            throw numerical_domain_error(
                "max_secure_distance: rate still positive beyond 16384 km");
    }
    while (hi - lo > 0.1) {
        const double mid = 0.5 * (lo + hi);
        if (rate_at(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return MaxDistResult{lo, false};
}

KeyRateBreakdown rate_at_distance(const Preset& preset, double L_km,
                                  const SweepConfig& cfg, const CutoffPlan& plan) {
    const double T_c = transmittance_from_distance(L_km, cfg.loss_db_per_km);
    const Pipeline p = pipeline_at(preset, T_c, cfg);
    return rate_with_tagging(TaggedRateInput{preset.params, p, plan});
}

OptimizeResult optimize_at_distance(const Preset& preset, double L_km,
                                    const SweepConfig& cfg) {
    const double T_c = transmittance_from_distance(L_km, cfg.loss_db_per_km);
    const Pipeline p = pipeline_at(preset, T_c, cfg);
    return optimize_cutoffs(preset.params, p, cfg.grid, cfg.threads);
}

std::string format_g12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
}

std::string to_csv(const std::vector<SweepRow>& rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const SweepRow& r : rows) {
        out += format_g12(r.distance_km);
        for (double v : {r.T_c, r.p0, r.k1, r.k3, r.I_AB, r.H_XB, r.chi_BE,
                         r.rate_signed, r.rate}) {
            out += ',';
            out += format_g12(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<SweepRow> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw config_error("CSV header mismatch");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string field;
        double v[10];
        for (int i = 0; i < 10; ++i) {
            if (!std::getline(ss, field, ','))
                throw config_error("CSV row with fewer than 10 fields");
            std::size_t pos = 0;
            try {
                v[i] = std::stod(field, &pos);
            } catch (const std::exception&) {
                throw config_error("CSV field is not a number: " + field);
            }
            if (pos != field.size())
                throw config_error("CSV field is not a number: " + field);
        }
        if (std::getline(ss, field, ','))
            throw config_error("CSV row with more than 10 fields");
        rows.push_back(SweepRow{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
    }
    return rows;
}

} // namespace cvtag
