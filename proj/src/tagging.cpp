#include "cvtag/tagging.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "cvtag/errors.hpp"

namespace cvtag {

namespace {

void check_consistent(const TaggedRateInput& in, const EffectiveParams& eff) {
    validate(in.params);
    validate(in.plan);
    if (in.pipeline.V_A != in.params.V_A)
        throw config_error("pipeline modulation variance disagrees with params.V_A");
    if (std::abs(eff.eta - in.params.eta) > 1e-9)
        throw config_error("pipeline detector efficiency disagrees with params.eta");
}

// A non-fluctuating stage's gain never exceeds its mean, so its cutoff does
// not enter the worst-case data mapping (k_i -> 1 there).
CutoffPlan reduced_mapping_plan(const Pipeline& p, const CutoffPlan& plan) {
    CutoffPlan r;
    r.k1 = p.modulation.a.variance() > 0.0 ? plan.k1 : 1.0;
    r.k2 = p.channel.a.variance() > 0.0 ? plan.k2 : 1.0;
    r.k3 = p.detection.a.variance() > 0.0 ? plan.k3 : 1.0;
    return r;
}

KeyRateBreakdown evaluate_rate(const SystemParams& params, const Pipeline& pipeline,
                               const EffectiveParams& eff, const CutoffPlan& plan) {
    const double p0 = untagged_probability(pipeline, plan);

    SystemParams measured = params;
    measured.eta = eff.eta;
    measured.v_el = eff.v_el;
    const EffectiveChannel ch{eff.T_eff, eff.eps_eff};
    const double I_AB = mutual_information(measured, ch);
    const double H_XB = bob_entropy(measured, ch);

    const MappedChannel mapped =
        mapped_effective_channel(eff, params.V_A, reduced_mapping_plan(pipeline, plan));
    SystemParams claimed = measured;
    claimed.V_A = mapped.V_A_claimed;
    const double chi = holevo_bound(claimed, mapped.ch);

    const double rate = params.beta * I_AB - (1.0 - p0) * H_XB - p0 * chi;
    return KeyRateBreakdown{p0, I_AB, H_XB, chi, rate};
}

} // namespace

void validate(const CutoffPlan& plan) {
    if (!(plan.k1 >= 1.0) || !(plan.k2 >= 1.0) || !(plan.k3 >= 1.0))
        throw config_error("cutoff coefficients must be >= 1");
}

double untagged_probability(const Pipeline& pipeline, const CutoffPlan& plan) {
    validate(plan);
    const double f1 = pipeline.modulation.a.cdf(plan.k1 * pipeline.modulation.a.mean());
    const double f2 = pipeline.channel.a.cdf(plan.k2 * pipeline.channel.a.mean());
    const double f3 = pipeline.detection.a.cdf(plan.k3 * pipeline.detection.a.mean());
    return f1 * f2 * f3;
}

MappedChannel mapped_effective_channel(const EffectiveParams& eff, double V_A,
                                       const CutoffPlan& plan) {
    validate(plan);
    const double k = plan.k1 * plan.k2 * plan.k3;
    if (k == 1.0)
        return MappedChannel{V_A, EffectiveChannel{eff.T_eff, eff.eps_eff}};
    const double k2 = k * k;
    const MappedChannel mapped{k2 * V_A, EffectiveChannel{eff.T_eff / k2, k2 * eff.eps_eff}};
    if (!(mapped.ch.T > 0.0) || mapped.ch.T > 1.0)
        throw numerical_domain_error("mapped transmittance left (0, 1]");
    return mapped;
}

KeyRateBreakdown rate_with_tagging(const TaggedRateInput& in) {
    const EffectiveParams eff = effective_params(in.pipeline);
    check_consistent(in, eff);
    return evaluate_rate(in.params, in.pipeline, eff, in.plan);
}

OptimizeResult optimize_cutoffs(const SystemParams& params, const Pipeline& pipeline,
                                const KGrid& grid, unsigned threads) {
    validate(params);
    if (!(grid.k_min >= 1.0))
        throw config_error("k_min must be >= 1");
    if (!(grid.step > 0.0))
        throw config_error("k grid step must be > 0");
    if (grid.k_max < grid.k_min)
        throw config_error("empty cutoff grid: k_max < k_min");

    const EffectiveParams eff = effective_params(pipeline);
    check_consistent(TaggedRateInput{params, pipeline, CutoffPlan{}}, eff);

    // index-based grid: no accumulation error, same points on every platform
    const std::size_t n_axis =
        static_cast<std::size_t>((grid.k_max - grid.k_min) / grid.step + 1e-9) + 1;
    std::vector<double> axis;
    axis.reserve(n_axis);
    for (std::size_t i = 0; i < n_axis; ++i)
        axis.push_back(grid.k_min + static_cast<double>(i) * grid.step);

    const std::vector<double> k_min_only{grid.k_min};
    const std::vector<double>& ax1 = pipeline.modulation.a.variance() > 0.0 ? axis : k_min_only;
    const std::vector<double>& ax2 = pipeline.channel.a.variance() > 0.0 ? axis : k_min_only;
    const std::vector<double>& ax3 = pipeline.detection.a.variance() > 0.0 ? axis : k_min_only;

    struct Candidate {
        double rate = 0.0;
        CutoffPlan plan;
        KeyRateBreakdown breakdown{};
        bool valid = false;
    };
    // total order: higher rate wins, ties toward smaller (k1, k2, k3)
    auto better = [](const Candidate& a, const Candidate& b) {
        if (!b.valid) return false;
        if (!a.valid) return true;
        if (b.rate != a.rate) return b.rate > a.rate;
        if (b.plan.k1 != a.plan.k1) return b.plan.k1 < a.plan.k1;
        if (b.plan.k2 != a.plan.k2) return b.plan.k2 < a.plan.k2;
        return b.plan.k3 < a.plan.k3;
    };

    const std::size_t n1 = ax1.size();
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_thread_count(threads), n1));
    std::vector<Candidate> best_per_worker(workers == 0 ? 1 : workers);

    auto scan = [&](unsigned w) {
        Candidate best;
        for (std::size_t i = w; i < n1; i += workers) {
            for (double k2 : ax2) {
                for (double k3 : ax3) {
                    const CutoffPlan plan{ax1[i], k2, k3};
                    const KeyRateBreakdown br = evaluate_rate(params, pipeline, eff, plan);
                    const Candidate c{br.rate, plan, br, true};
                    if (better(best, c))
                        best = c;
                }
            }
        }
        best_per_worker[w] = best;
    };

    if (workers <= 1) {
        scan(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(scan, w);
        for (auto& t : pool)
            t.join();
    }

    Candidate best;
    for (const auto& c : best_per_worker)
        if (better(best, c))
            best = c;
    return OptimizeResult{best.plan, best.breakdown};
}

} // namespace cvtag
