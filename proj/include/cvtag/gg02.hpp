#pragma once

namespace cvtag {

// Evaluation parameters for the Gaussian-modulation coherent-state protocol
// with reverse reconciliation and trusted homodyne detection.
// All noise quantities in shot-noise units; beta stored as a fraction.
struct SystemParams {
    double eta;   // mean detector efficiency, (0, 1]
    double eps_c; // channel excess noise referred to channel input, >= 0
    double v_el;  // detector electronic noise, >= 0
    double V_A;   // modulation variance, > 0
    double beta;  // reconciliation efficiency, (0, 1]
};

// The channel actually entering the key-rate formulas (possibly an effective
// or a cutoff-mapped one).
struct EffectiveChannel {
    double T;   // power transmittance, (0, 1]
    double eps; // excess noise referred to channel input, >= 0
};

struct ChannelTerms {
    double chi_line; // channel noise referred to input
    double chi_hom;  // homodyne detector noise referred to detector input
    double chi_tot;  // total input-referred noise
    double V;        // V_A + 1
    double V_B;      // Bob's measured quadrature variance
};

// Tagged-rate decomposition; `rate` is the signed secret fraction in bits/use.
struct KeyRateBreakdown {
    double p0;
    double I_AB;
    double H_XB;
    double chi_BE;
    double rate;
};

void validate(const SystemParams& p);
void validate(const EffectiveChannel& ch);

double binary_entropy(double x);
double g_func(double x); // (x+1)log2(x+1) - x log2(x), G(0)=0

ChannelTerms channel_terms(const SystemParams& p, const EffectiveChannel& ch);
double mutual_information(const SystemParams& p, const EffectiveChannel& ch);
double bob_entropy_from_variance(double V_B); // (1/2) log2(2*pi*e*V_B)
double bob_entropy(const SystemParams& p, const EffectiveChannel& ch);
double holevo_bound(const SystemParams& p, const EffectiveChannel& ch);
double perfect_rate(const SystemParams& p, const EffectiveChannel& ch); // beta*I - chi

} // namespace cvtag
