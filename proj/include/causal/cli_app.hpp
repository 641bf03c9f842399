#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace causal {

// Command-line surface of the causal-bounds tool. args excludes the program
// name. Returns the process exit code:
//   0 success, 1 usage or parse error, 2 invalid model or distribution,
//   3 bound-violation diagnostic, 4 reproduction or verification mismatch.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace causal
