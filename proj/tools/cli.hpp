#pragma once

#include <iosfwd>

namespace cssdpp::cli {

/// Entry point of the cssdpp command line. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cssdpp::cli
