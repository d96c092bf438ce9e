#pragma once

#include <stdexcept>
#include <string>

namespace cvtag {

// Invalid user-supplied configuration: bad parameter ranges, malformed grids,
// unsupported pipeline shapes. CLI maps this to exit code 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A parameter combination that is syntactically valid but analytically singular
// (e.g. lossy channel with T=1 and excess noise > 0).
struct singular_variance_error : config_error {
    explicit singular_variance_error(const std::string& what) : config_error(what) {}
};

// Pipeline does not match the modulation/channel/detection preset shape required
// by the analytic effective-parameter extraction.
struct unsupported_shape_error : config_error {
    explicit unsupported_shape_error(const std::string& what) : config_error(what) {}
};

// Numerical evaluation left its validity domain (singular channel, discriminant
// negative beyond rounding tolerance, entropy argument out of range).
// CLI maps this to exit code 2.
struct numerical_domain_error : std::runtime_error {
    explicit numerical_domain_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cvtag
