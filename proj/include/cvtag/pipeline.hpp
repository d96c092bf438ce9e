#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cvtag/distributions.hpp"
#include "cvtag/rng.hpp"

namespace cvtag {

enum class StageLabel { modulation, channel, detection };

// One imperfect stage f(X) = a*X + sqrt(max(0, 1-a^2)) * b.
struct StageTransform {
    Distribution a;
    Distribution b;
    StageLabel label;
};

// Enforces the stage invariants (zero-mean b; a essentially inside [-1,1]
// whenever b carries noise).
StageTransform make_stage(Distribution a, Distribution b, StageLabel label);

// a = Degenerate(sqrt(T_c)), b = Gaussian(0, T_c*eps_c/(1-T_c)).
StageTransform lossy_channel_stage(double T_c, double eps_c);

// a = Degenerate(cos(theta)), b = Gaussian(0, quadrature_variance); |theta| < pi/2.
StageTransform phase_rotation_stage(double theta, double quadrature_variance);

// a = Gaussian(1, V1) (Degenerate(1) when V1 = 0), b = Degenerate(0).
StageTransform modulation_stage(double V1);

// a = Gaussian(sqrt(eta), V2) (Degenerate when V2 = 0), b = Gaussian(0, var_b).
StageTransform detection_stage(double eta, double V2, double var_b);

// Exact constructor-known parameters, carried so analytic extraction does not
// lose precision re-deriving them from stage moments (sqrt/square round-trips).
struct PresetShape {
    double T_c;
    double eps_c;
    double eta;
    double v_el; // engine-convention electronic noise actually injected
    double V1;
    double V2;
};

struct Pipeline {
    StageTransform modulation;
    StageTransform channel;
    StageTransform detection;
    double V_A; // modulation variance of the classical symbols
    std::optional<PresetShape> shape; // set by build_preset_pipeline
};

// Input-referred description of the composed pipeline.
struct EffectiveParams {
    double T_eff;   // squared mean amplitude gain of modulation+channel
    double eps_eff; // input-referred excess noise including fluctuations
    double eta;
    double v_el;
};

// Standard three-stage pipeline for the application presets.
// Engine convention: Var(b_d) = v_el/(1-eta) so the injected electronic noise
// at the output is exactly v_el. strict_paper keeps the literal table value
// eta*v_el/(1-eta) instead (output contribution eta*v_el).
Pipeline build_preset_pipeline(double V_A, double T_c, double eps_c, double eta,
                               double v_el, double V1, double V2,
                               bool strict_paper = false);

// One draw of f(x) = a*x + sqrt(max(0, 1-a^2))*b.
double apply_stage(const StageTransform& s, double x, RngStream& rng);

// Accumulated sums over n samples of (x_i, x_o); order-independent merge.
struct PipelineMoments {
    std::uint64_t n = 0;
    double sum_xi = 0, sum_xi2 = 0;
    double sum_xo = 0, sum_xo2 = 0;
    double sum_xixo = 0;

    double mean_xo() const { return sum_xo / static_cast<double>(n); }
    double var_xo() const;
    // least-squares slope of x_o on x_i
    double slope() const;
};

struct PipelineSample {
    double x_i; // classical symbol, ~ Gaussian(0, V_A)
    double x_o; // detector output quadrature
};

// Full sample set (single stream); the moment variant shards deterministically
// across workers with derived seeds (results depend only on seed and n).
std::vector<PipelineSample> simulate_pipeline(const Pipeline& p, std::uint64_t n,
                                              RngStream& rng);
PipelineMoments simulate_moments(const Pipeline& p, std::uint64_t n,
                                 std::uint64_t seed, unsigned threads = 0);

// Analytic extraction; requires the standard preset shape.
EffectiveParams effective_params(const Pipeline& p);

// Predicted unconditional Var(x_o) from the stage-moment recursion
// M_k = E[a^2] M_{k-1} + max(0, 1-E[a^2]) + (1-E[a^2]) Var(b).
double pipeline_output_variance(const Pipeline& p);

// Predicted E[x_o | x_i] coefficient: product of stage gain means.
double pipeline_mean_gain(const Pipeline& p);

unsigned resolve_thread_count(unsigned requested);

} // namespace cvtag
