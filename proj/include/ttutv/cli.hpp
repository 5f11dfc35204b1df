#pragma once

#include <string>
#include <vector>

namespace ttutv {

/// Entry point behind the command-line tool. Exit codes: 0 success, 1 usage
/// error, 2 I/O or parse error, 3 numerical or invariant failure.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace ttutv
