#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cvtag/tagging.hpp"

namespace cvtag {

// Immutable built-in parameter sets; V1/V2 are the default gain-fluctuation
// variances applied when a sweep enables them.
struct Preset {
    std::string name;
    SystemParams params;
    double V1;
    double V2;
    double fiber_loss_db_per_km;
};

Preset preset_table1(); // eta=0.60, eps_c=0.02, v_el=0.02, V_A=18, beta=0.956
Preset preset_table3(); // eta=0.6134, eps_c=0.0081, v_el=0.1523, V_A=7.65, beta=0.98
Preset preset_by_name(const std::string& name);

// T_c = 10^(-loss*L/10)
double transmittance_from_distance(double L_km, double loss_db_per_km);

struct SweepRow {
    double distance_km;
    double T_c;
    double p0;
    double k1;
    double k3;
    double I_AB;
    double H_XB;
    double chi_BE;
    double rate_signed;
    double rate; // max(rate_signed, 0)
};

inline constexpr const char* kCsvHeader =
    "distance_km,T_c,p0,k1,k3,I_AB,H_XB,chi_BE,rate_signed,rate";

struct SweepConfig {
    double L_min = 0.0;
    double L_max = 120.0;
    double L_step = 1.0;
    KGrid grid{};
    double V1 = 0.0;
    double V2 = 0.0;
    double loss_db_per_km = 0.2;
    bool strict_paper = false;
    unsigned threads = 0;
};

// One row per distance, ascending; each row carries the optimized plan.
// Sanity check (hard failure): the signed rate must be non-increasing while
// positive and must never return to positive once lost.  Below zero it may
// legitimately creep back toward 0 as loss grows, since all rate terms
// vanish with T.
std::vector<SweepRow> distance_sweep(const Preset& preset, const SweepConfig& cfg);

struct MaxDistResult {
    double distance_km;
    bool insecure_at_zero; // rate non-positive already at L = 0
};

// Largest L with optimized signed rate > 0, bisected to 0.1 km.
MaxDistResult max_secure_distance(const Preset& preset, const SweepConfig& cfg);

// Single-distance evaluation used by the CLI `rate`/`optimize` commands.
KeyRateBreakdown rate_at_distance(const Preset& preset, double L_km,
                                  const SweepConfig& cfg, const CutoffPlan& plan);
OptimizeResult optimize_at_distance(const Preset& preset, double L_km,
                                    const SweepConfig& cfg);

// 12-significant-digit decimal serialization; parse -> re-emit is a fixed point.
std::string format_g12(double x);
std::string to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_csv(std::istream& in);

} // namespace cvtag
