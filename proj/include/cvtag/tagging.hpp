#pragma once

#include "cvtag/gg02.hpp"
#include "cvtag/pipeline.hpp"

namespace cvtag {

// Cutoff coefficients on the mean stage gains; all >= 1 (a cutoff below the
// mean gives p0 <= 1/2 per stage and is rejected).
struct CutoffPlan {
    double k1 = 1.0; // modulation
    double k2 = 1.0; // channel
    double k3 = 1.0; // detection
};

void validate(const CutoffPlan& plan);

struct TaggedRateInput {
    SystemParams params;
    Pipeline pipeline;
    CutoffPlan plan;
};

// p0 = cdf(a_m, k1*abar_m) * cdf(a_c, k2*abar_c) * cdf(a_d, k3*abar_d).
double untagged_probability(const Pipeline& pipeline, const CutoffPlan& plan);

struct MappedChannel {
    double V_A_claimed; // k^2 * V_A
    EffectiveChannel ch; // T_eff/k^2, k^2 * eps_eff
};

// The measured-statistics-preserving rescaling for Alice's data mapped to k*X:
// preserves Bob's variance and the A'-B covariance under the rescaled claim.
MappedChannel mapped_effective_channel(const EffectiveParams& eff, double V_A,
                                       const CutoffPlan& plan);

// Tagged rate: beta*I_AB - (1-p0)*H_XB - p0*chi_BE, with I_AB/H_XB at the
// measured effective channel and chi_BE at the mapped (conservative) channel.
// Cutoffs on non-fluctuating stages do not enter the mapping (their gain is
// never above its mean, so the worst-case rescaling for them is k = 1).
KeyRateBreakdown rate_with_tagging(const TaggedRateInput& in);

struct KGrid {
    double k_min = 1.0;
    double k_max = 1.3;
    double step = 0.005;
};

struct OptimizeResult {
    CutoffPlan plan;
    KeyRateBreakdown breakdown;
};

// Exhaustive grid search maximizing rate_with_tagging; ties broken toward
// smaller k1, then k2, then k3. Axes for non-fluctuating stages collapse to
// k_min (the rate does not depend on them).
OptimizeResult optimize_cutoffs(const SystemParams& params, const Pipeline& pipeline,
                                const KGrid& grid, unsigned threads = 0);

} // namespace cvtag
