#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cherryvine::cli {

/// Runs the command line `args` (program name first) and returns the exit
/// code: 0 success, 1 domain failure, 2 input or parse failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cherryvine::cli
