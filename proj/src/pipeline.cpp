#include "cvtag/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "cvtag/errors.hpp"

namespace cvtag {

namespace {

constexpr double kUnitMassTolerance = 1e-6;
constexpr std::uint64_t kShardSize = std::uint64_t{1} << 20;

double vacuum_coeff(const StageTransform& s) {
    return std::sqrt(std::max(0.0, 1.0 - s.a.second_moment()));
}

// One stage of the simulation: the generic transform plus the vacuum the
// moment recursion accounts for via max(0, 1 - E[a^2]).
double simulate_stage(const StageTransform& s, double x, double vac, RngStream& rng) {
    double y = apply_stage(s, x, rng);
    if (vac > 0.0)
        y += vac * rng.gaussian01();
    return y;
}

double stage_moment_step(const StageTransform& s, double m_prev) {
    const double ea2 = s.a.second_moment();
    return ea2 * m_prev + std::max(0.0, 1.0 - ea2) + (1.0 - ea2) * s.b.variance();
}

} // namespace

StageTransform make_stage(Distribution a, Distribution b, StageLabel label) {
    if (b.mean() != 0.0)
        throw config_error("stage additive term b must have mean 0");
    if (b.variance() > 0.0 && a.mass_outside_unit() >= kUnitMassTolerance)
        throw config_error("stage gain a must be essentially confined to [-1, 1] "
                           "when b carries noise (P(|a|>1) >= 1e-6)");
    return StageTransform{a, b, label};
}

StageTransform lossy_channel_stage(double T_c, double eps_c) {
    if (!(T_c > 0.0) || T_c > 1.0)
        throw config_error("channel transmittance must lie in (0, 1]");
    if (!(eps_c >= 0.0))
        throw config_error("channel excess noise must be >= 0");
    if (T_c == 1.0) {
        if (eps_c > 0.0)
            throw singular_variance_error(
                "lossy channel noise variance T*eps/(1-T) is singular at T = 1");
        return make_stage(Distribution::degenerate(1.0), Distribution::degenerate(0.0),
                          StageLabel::channel);
    }
    const double var_b = eps_c > 0.0 ? T_c * eps_c / (1.0 - T_c) : 0.0;
    const Distribution b = eps_c > 0.0 ? Distribution::gaussian(0.0, var_b)
                                       : Distribution::degenerate(0.0);
    return make_stage(Distribution::degenerate(std::sqrt(T_c)), b, StageLabel::channel);
}

StageTransform phase_rotation_stage(double theta, double quadrature_variance) {
    if (!(std::abs(theta) < 1.5707963267948966))
        throw config_error("phase rotation angle must satisfy |theta| < pi/2");
    if (!(quadrature_variance >= 1.0))
        throw config_error("conjugate quadrature variance must be >= 1");
    if (theta == 0.0)
        return make_stage(Distribution::degenerate(1.0), Distribution::degenerate(0.0),
                          StageLabel::channel);
    return make_stage(Distribution::degenerate(std::cos(theta)),
                      Distribution::gaussian(0.0, quadrature_variance),
                      StageLabel::channel);
}

StageTransform modulation_stage(double V1) {
    if (!(V1 >= 0.0))
        throw config_error("modulation gain variance V1 must be >= 0");
    const Distribution a = V1 > 0.0 ? Distribution::gaussian(1.0, V1)
                                    : Distribution::degenerate(1.0);
    return make_stage(a, Distribution::degenerate(0.0), StageLabel::modulation);
}

StageTransform detection_stage(double eta, double V2, double var_b) {
    if (!(eta > 0.0) || eta > 1.0)
        throw config_error("detector efficiency must lie in (0, 1]");
    if (!(V2 >= 0.0))
        throw config_error("detector gain variance V2 must be >= 0");
    if (!(var_b >= 0.0))
        throw config_error("detector noise variance must be >= 0");
    const double root_eta = std::sqrt(eta);
    const Distribution a = V2 > 0.0 ? Distribution::gaussian(root_eta, V2)
                                    : Distribution::degenerate(root_eta);
    const Distribution b = var_b > 0.0 ? Distribution::gaussian(0.0, var_b)
                                       : Distribution::degenerate(0.0);
    return make_stage(a, b, StageLabel::detection);
}

Pipeline build_preset_pipeline(double V_A, double T_c, double eps_c, double eta,
                               double v_el, double V1, double V2, bool strict_paper) {
    if (!(V_A > 0.0))
        throw config_error("V_A must be > 0");
    if (v_el > 0.0 && eta >= 1.0)
        throw config_error("electronic noise requires eta < 1 "
                           "(beamsplitter model is singular at eta = 1)");
    const double var_bd = v_el > 0.0
                              ? (strict_paper ? eta * v_el / (1.0 - eta) : v_el / (1.0 - eta))
                              : 0.0;
    Pipeline p{modulation_stage(V1), lossy_channel_stage(T_c, eps_c),
               detection_stage(eta, V2, var_bd), V_A, std::nullopt};
    // (1-eta)*Var(b_d): v_el under the engine convention, eta*v_el under strict.
    const double v_el_injected = v_el > 0.0 ? (strict_paper ? eta * v_el : v_el) : 0.0;
    p.shape = PresetShape{T_c, eps_c, eta, v_el_injected, V1, V2};
    return p;
}

double apply_stage(const StageTransform& s, double x, RngStream& rng) {
    const double a = s.a.sample(rng);
    const double b = s.b.sample(rng);
    return a * x + std::sqrt(std::max(0.0, 1.0 - a * a)) * b;
}

double PipelineMoments::var_xo() const {
    const double nn = static_cast<double>(n);
    const double m = sum_xo / nn;
    return sum_xo2 / nn - m * m;
}

double PipelineMoments::slope() const {
    return sum_xixo / sum_xi2;
}

namespace {

PipelineMoments run_shard(const Pipeline& p, std::uint64_t count, RngStream rng) {
    const double sd_A = std::sqrt(p.V_A);
    const double vac_m = vacuum_coeff(p.modulation);
    const double vac_c = vacuum_coeff(p.channel);
    const double vac_d = vacuum_coeff(p.detection);
    PipelineMoments m;
    m.n = count;
    for (std::uint64_t i = 0; i < count; ++i) {
        const double x_i = sd_A * rng.gaussian01();
        const double q0 = x_i + rng.gaussian01(); // quadrature = symbol + shot noise
        double q = simulate_stage(p.modulation, q0, vac_m, rng);
        q = simulate_stage(p.channel, q, vac_c, rng);
        q = simulate_stage(p.detection, q, vac_d, rng);
        m.sum_xi += x_i;
        m.sum_xi2 += x_i * x_i;
        m.sum_xo += q;
        m.sum_xo2 += q * q;
        m.sum_xixo += x_i * q;
    }
    return m;
}

} // namespace

std::vector<PipelineSample> simulate_pipeline(const Pipeline& p, std::uint64_t n,
                                              RngStream& rng) {
    const double sd_A = std::sqrt(p.V_A);
    const double vac_m = vacuum_coeff(p.modulation);
    const double vac_c = vacuum_coeff(p.channel);
    const double vac_d = vacuum_coeff(p.detection);
    std::vector<PipelineSample> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double x_i = sd_A * rng.gaussian01();
        const double q0 = x_i + rng.gaussian01();
        double q = simulate_stage(p.modulation, q0, vac_m, rng);
        q = simulate_stage(p.channel, q, vac_c, rng);
        q = simulate_stage(p.detection, q, vac_d, rng);
        out.push_back({x_i, q});
    }
    return out;
}

unsigned resolve_thread_count(unsigned requested) {
    if (requested != 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

PipelineMoments simulate_moments(const Pipeline& p, std::uint64_t n,
                                 std::uint64_t seed, unsigned threads) {
    const RngStream base(seed);
    const std::uint64_t shards = n == 0 ? 0 : (n + kShardSize - 1) / kShardSize;
    std::vector<PipelineMoments> partial(shards);

    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_thread_count(threads),
                                                      shards == 0 ? 1 : shards));
    auto work = [&](unsigned w) {
        for (std::uint64_t s = w; s < shards; s += workers) {
            const std::uint64_t lo = s * kShardSize;
            const std::uint64_t count = std::min(kShardSize, n - lo);
            partial[s] = run_shard(p, count, base.derive(s));
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

    // merge in shard order: bit-reproducible for any worker count
    PipelineMoments total;
    for (const auto& m : partial) {
        total.n += m.n;
        total.sum_xi += m.sum_xi;
        total.sum_xi2 += m.sum_xi2;
        total.sum_xo += m.sum_xo;
        total.sum_xo2 += m.sum_xo2;
        total.sum_xixo += m.sum_xixo;
    }
    return total;
}

double pipeline_mean_gain(const Pipeline& p) {
    return p.modulation.a.mean() * p.channel.a.mean() * p.detection.a.mean();
}

double pipeline_output_variance(const Pipeline& p) {
    double m = p.V_A + 1.0; // coherent-state quadrature: symbol + shot noise
    m = stage_moment_step(p.modulation, m);
    m = stage_moment_step(p.channel, m);
    m = stage_moment_step(p.detection, m);
    return m;
}

EffectiveParams effective_params(const Pipeline& p) {
    double T_c, eps_c, eta, v_el, V1, V2;
    if (p.shape) {
        T_c = p.shape->T_c;
        eps_c = p.shape->eps_c;
        eta = p.shape->eta;
        v_el = p.shape->v_el;
        V1 = p.shape->V1;
        V2 = p.shape->V2;
    } else {
        // infer from stage moments; demands the standard preset shape
        if (p.modulation.label != StageLabel::modulation ||
            p.channel.label != StageLabel::channel ||
            p.detection.label != StageLabel::detection)
            throw unsupported_shape_error("stages must be ordered modulation, channel, detection");
        if (p.modulation.b.variance() != 0.0)
            throw unsupported_shape_error(
                "modulation stage must be gain-only (b = 0); use Monte-Carlo estimation instead");
        if (p.modulation.a.mean() <= 0.0)
            throw unsupported_shape_error("modulation gain mean must be positive");
        if (p.channel.a.variance() != 0.0)
            throw unsupported_shape_error(
                "channel gain must be deterministic (lossy_channel_stage); "
                "use Monte-Carlo estimation instead");
        const double a_c = p.channel.a.mean();
        if (!(a_c > 0.0) || a_c > 1.0)
            throw unsupported_shape_error("channel gain must lie in (0, 1]");
        const double a_d = p.detection.a.mean();
        if (!(a_d > 0.0) || a_d > 1.0)
            throw unsupported_shape_error("detector gain mean must lie in (0, 1]");
        T_c = a_c * a_c;
        eps_c = T_c < 1.0 ? (1.0 - T_c) * p.channel.b.variance() / T_c : 0.0;
        eta = a_d * a_d;
        v_el = (1.0 - eta) * p.detection.b.variance();
        V1 = p.modulation.a.variance();
        V2 = p.detection.a.variance();
    }

    const double abar_m = p.modulation.a.mean();
    const double T_eff = abar_m * abar_m * T_c;
    const double M_in = p.V_A + 1.0;
    // second moment arriving at the detector
    const double M_det = stage_moment_step(p.channel, stage_moment_step(p.modulation, M_in));
    const double eps_eff =
        eps_c + V1 * M_in + (V2 > 0.0 ? V2 * M_det / (eta * T_eff) : 0.0);
    return EffectiveParams{T_eff, eps_eff, eta, v_el};
}

} // namespace cvtag
