#pragma once

#include <iosfwd>

namespace hfree::cli {

/// Entry point of the `hfree` tool. Exit codes: 0 pass, 1 fail or evaluation
/// error, 2 usage or manifest error, 3 below critical dimension.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace hfree::cli
