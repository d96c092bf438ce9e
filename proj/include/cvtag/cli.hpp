#pragma once

#include <iosfwd>

namespace cvtag {

// Full command-line driver with injectable streams (tests call it in-process).
// Exit codes: 0 success, 1 configuration/usage error, 2 numerical domain error,
// 3 Monte-Carlo check exceeded its 3-sigma bound.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace cvtag
