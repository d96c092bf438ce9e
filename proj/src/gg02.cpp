#include "cvtag/gg02.hpp"

#include <cmath>
#include <string>

#include "cvtag/errors.hpp"

namespace cvtag {

namespace {

constexpr double kTwoPiE = 17.079468445347134131; // 2*pi*e
constexpr double kDiscriminantSlack = -1e-9;

// sqrt of a discriminant that is non-negative in exact arithmetic; tiny
// negatives are rounding noise, anything larger is a real domain violation.
double safe_disc_sqrt(double disc, const char* label) {
    if (disc < 0.0) {
        if (disc < kDiscriminantSlack)
            throw numerical_domain_error(std::string("negative ") + label +
                                         " discriminant beyond rounding tolerance");
        disc = 0.0;
    }
    return std::sqrt(disc);
}

double g_of_lambda(double lambda) {
    double x = 0.5 * (lambda - 1.0);
    if (x < 0.0) {
        if (x < kDiscriminantSlack)
            throw numerical_domain_error("symplectic eigenvalue below 1 beyond rounding tolerance");
        x = 0.0;
    }
    return g_func(x);
}

} // namespace

void validate(const SystemParams& p) {
    if (!(p.eta > 0.0) || p.eta > 1.0)
        throw config_error("eta must lie in (0, 1]");
    if (!(p.eps_c >= 0.0))
        throw config_error("eps_c must be >= 0");
    if (!(p.v_el >= 0.0))
        throw config_error("v_el must be >= 0");
    if (!(p.V_A > 0.0))
        throw config_error("V_A must be > 0");
    if (!(p.beta > 0.0) || p.beta > 1.0)
        throw config_error("beta must lie in (0, 1] (fraction, not percent)");
}

void validate(const EffectiveChannel& ch) {
    if (ch.T == 0.0)
        throw numerical_domain_error("singular channel: T = 0");
    if (!(ch.T > 0.0) || ch.T > 1.0)
        throw config_error("T must lie in (0, 1]");
    if (!(ch.eps >= 0.0))
        throw config_error("eps must be >= 0");
}

double binary_entropy(double x) {
    if (!(x >= 0.0) || x > 1.0)
        throw numerical_domain_error("binary_entropy argument outside [0, 1]");
    if (x == 0.0 || x == 1.0)
        return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double g_func(double x) {
    if (!(x >= 0.0))
        throw numerical_domain_error("g_func argument must be >= 0");
    if (x == 0.0)
        return 0.0;
    return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

ChannelTerms channel_terms(const SystemParams& p, const EffectiveChannel& ch) {
    validate(p);
    validate(ch);
    ChannelTerms t{};
    t.V = p.V_A + 1.0;
    t.chi_line = 1.0 / ch.T - 1.0 + ch.eps;
    t.chi_hom = (1.0 - p.eta) / p.eta + p.v_el / p.eta;
    t.chi_tot = t.chi_line + t.chi_hom / ch.T;
    t.V_B = p.eta * ch.T * (t.V + t.chi_tot);
    return t;
}

double mutual_information(const SystemParams& p, const EffectiveChannel& ch) {
    const ChannelTerms t = channel_terms(p, ch);
    return 0.5 * std::log2((t.V + t.chi_tot) / (1.0 + t.chi_tot));
}

double bob_entropy_from_variance(double V_B) {
    if (!(V_B > 0.0))
        throw numerical_domain_error("Bob variance must be > 0");
    return 0.5 * std::log2(kTwoPiE * V_B);
}

double bob_entropy(const SystemParams& p, const EffectiveChannel& ch) {
    return bob_entropy_from_variance(channel_terms(p, ch).V_B);
}

double holevo_bound(const SystemParams& p, const EffectiveChannel& ch) {
    const ChannelTerms t = channel_terms(p, ch);
    const double V = t.V;
    const double T = ch.T;

    const double A = V * V * (1.0 - 2.0 * T) + 2.0 * T + T * T * (V + t.chi_line) * (V + t.chi_line);
    const double B = T * T * (V * t.chi_line + 1.0) * (V * t.chi_line + 1.0);
    const double lam1_sq = 0.5 * (A + safe_disc_sqrt(A * A - 4.0 * B, "lambda12"));
    // product of roots: avoids cancellation in the small eigenvalue
    const double lam2_sq = B / lam1_sq;

    const double sqrtB = std::sqrt(B);
    const double denom = T * (V + t.chi_tot);
    const double C = (A * t.chi_hom + V * sqrtB + T * (V + t.chi_line)) / denom;
    const double D = sqrtB * (V + sqrtB * t.chi_hom) / denom;
    const double lam3_sq = 0.5 * (C + safe_disc_sqrt(C * C - 4.0 * D, "lambda34"));
    const double lam4_sq = D / lam3_sq;

    return g_of_lambda(std::sqrt(lam1_sq)) + g_of_lambda(std::sqrt(lam2_sq)) -
           g_of_lambda(std::sqrt(lam3_sq)) - g_of_lambda(std::sqrt(lam4_sq));
}

double perfect_rate(const SystemParams& p, const EffectiveChannel& ch) {
    return p.beta * mutual_information(p, ch) - holevo_bound(p, ch);
}

} // namespace cvtag
