#include "cvtag/distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cvtag/errors.hpp"

namespace cvtag {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void require_finite(double x, const char* name) {
    if (!std::isfinite(x))
        throw config_error(std::string("distribution parameter not finite: ") + name);
}

// Standard normal cdf via erfc; relative error well below 1e-12.
double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

} // namespace

Distribution Distribution::gaussian(double mean, double variance) {
    require_finite(mean, "mean");
    require_finite(variance, "variance");
    if (variance < 0.0)
        throw config_error("gaussian variance must be >= 0");
    return Distribution(Kind::gaussian, mean, variance);
}

Distribution Distribution::uniform(double lo, double hi) {
    require_finite(lo, "lo");
    require_finite(hi, "hi");
    if (!(lo < hi))
        throw config_error("uniform requires lo < hi");
    return Distribution(Kind::uniform, lo, hi);
}

Distribution Distribution::degenerate(double value) {
    require_finite(value, "value");
    return Distribution(Kind::degenerate, value, 0.0);
}

double Distribution::mean() const {
    switch (kind_) {
    case Kind::gaussian: return p1_;
    case Kind::uniform: return 0.5 * (p1_ + p2_);
    case Kind::degenerate: return p1_;
    }
    return 0.0;
}

double Distribution::variance() const {
    switch (kind_) {
    case Kind::gaussian: return p2_;
    case Kind::uniform: {
        const double w = p2_ - p1_;
        return w * w / 12.0;
    }
    case Kind::degenerate: return 0.0;
    }
    return 0.0;
}

double Distribution::cdf(double x) const {
    switch (kind_) {
    case Kind::gaussian:
        if (p2_ == 0.0)
            return x < p1_ ? 0.0 : 1.0;
        return norm_cdf((x - p1_) / std::sqrt(p2_));
    case Kind::uniform:
        if (x <= p1_) return 0.0;
        if (x >= p2_) return 1.0;
        return (x - p1_) / (p2_ - p1_);
    case Kind::degenerate:
        return x < p1_ ? 0.0 : 1.0;
    }
    return 0.0;
}

double Distribution::pdf(double x) const {
    switch (kind_) {
    case Kind::gaussian: {
        if (p2_ == 0.0)
            throw config_error("point mass has no density");
        const double s = std::sqrt(p2_);
        const double z = (x - p1_) / s;
        return kInvSqrt2Pi / s * std::exp(-0.5 * z * z);
    }
    case Kind::uniform:
        return (x >= p1_ && x <= p2_) ? 1.0 / (p2_ - p1_) : 0.0;
    case Kind::degenerate:
        throw config_error("point mass has no density");
    }
    return 0.0;
}

double Distribution::sample(RngStream& rng) const {
    switch (kind_) {
    case Kind::gaussian:
        if (p2_ == 0.0)
            return p1_;
        return p1_ + std::sqrt(p2_) * rng.gaussian01();
    case Kind::uniform:
        return p1_ + (p2_ - p1_) * rng.uniform01();
    case Kind::degenerate:
        return p1_;
    }
    return 0.0;
}

double Distribution::mass_outside_unit() const {
    switch (kind_) {
    case Kind::gaussian: {
        if (p2_ == 0.0)
            return std::abs(p1_) > 1.0 ? 1.0 : 0.0;
        const double s = std::sqrt(p2_);
        return norm_cdf((-1.0 - p1_) / s) + 1.0 - norm_cdf((1.0 - p1_) / s);
    }
    case Kind::uniform: {
        const double w = p2_ - p1_;
        const double inside = std::max(0.0, std::min(p2_, 1.0) - std::max(p1_, -1.0));
        return 1.0 - inside / w;
    }
    case Kind::degenerate:
        return std::abs(p1_) > 1.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

} // namespace cvtag
