#include "cvtag/dv_tagging.hpp"

#include <string>

#include "cvtag/errors.hpp"
#include "cvtag/gg02.hpp"

namespace cvtag {

namespace {

void require_unit_interval(double x, const char* name) {
    if (!(x >= 0.0) || x > 1.0)
        throw config_error(std::string(name) + " must lie in [0, 1]");
}

} // namespace

double gllp_rate(const DvTaggedInput& in) {
    require_unit_interval(in.p_tagged, "p_tagged");
    require_unit_interval(in.delta, "delta");
    if (!(in.s >= 0.0))
        throw config_error("s must be >= 0");
    return (1.0 - in.p_tagged) * in.s * (1.0 - binary_entropy(in.delta));
}

double wcp_rate(const WcpInput& in, bool literal_linear_correction) {
    if (!(in.Q1 >= 0.0))
        throw config_error("Q1 must be >= 0");
    if (!(in.Qu >= in.Q1))
        throw config_error("Qu must be >= Q1");
    if (!(in.f_u >= 1.0))
        throw config_error("f_u must be >= 1");
    require_unit_interval(in.e_phase, "e_phase");
    require_unit_interval(in.Eu, "Eu");
    const double correction =
        literal_linear_correction ? in.Eu : binary_entropy(in.Eu);
    return in.Q1 * (1.0 - binary_entropy(in.e_phase)) - in.f_u * in.Qu * correction;
}

} // namespace cvtag
