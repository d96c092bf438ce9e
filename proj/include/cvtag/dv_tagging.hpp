#pragma once

namespace cvtag {

// GLLP-style discrete-variable tagging inputs.
struct DvTaggedInput {
    double p_tagged; // tagged fraction, [0, 1]
    double s;        // post-error-correction key length, >= 0
    double delta;    // untagged phase error rate, [0, 1]
};

// Weak-coherent-pulse decoy-style rate inputs.
struct WcpInput {
    double Q1;      // single-photon gain, >= 0
    double e_phase; // single-photon phase error rate, [0, 1]
    double f_u;     // error-correction coefficient, >= 1
    double Qu;      // total gain Q(u), >= Q1
    double Eu;      // total QBER E(u), [0, 1]
};

// K = (1-p) * s * (1 - H2(delta)); signed, callers clamp.
double gllp_rate(const DvTaggedInput& in);

// K = Q1 * (1 - H2(e_phase)) - f_u * Qu * H2(Eu).
// `literal_linear_correction` replaces the H2(Eu) cost with the plain Eu form.
double wcp_rate(const WcpInput& in, bool literal_linear_correction = false);

} // namespace cvtag
