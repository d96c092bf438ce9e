#pragma once

#include "cvtag/rng.hpp"

namespace cvtag {

// Scalar probability law for stage gains/noise terms (shot-noise units).
// Value type: cheap to copy, immutable after construction.
class Distribution {
  public:
    enum class Kind { gaussian, uniform, degenerate };

    static Distribution gaussian(double mean, double variance);
    static Distribution uniform(double lo, double hi);
    static Distribution degenerate(double value);

    Kind kind() const { return kind_; }

    double mean() const;
    double variance() const;
    // mean^2 + variance, exactly (needed by the stage-moment recursion).
    double second_moment() const { return mean() * mean() + variance(); }

    // P(A <= x); right-continuous step for point masses.
    double cdf(double x) const;
    // Density; throws config_error for a point mass (no density exists).
    double pdf(double x) const;
    double sample(RngStream& rng) const;

    // P(|A| > 1), used by the stage-construction invariant.
    double mass_outside_unit() const;

    bool operator==(const Distribution&) const = default;

  private:
    Distribution(Kind k, double p1, double p2) : kind_(k), p1_(p1), p2_(p2) {}

    Kind kind_;
    double p1_; // gaussian: mean, uniform: lo, degenerate: value
    double p2_; // gaussian: variance, uniform: hi, degenerate: unused (0)
};

} // namespace cvtag
