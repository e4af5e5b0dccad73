#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mirs {

enum ExitCode : int {
    exit_ok = 0,
    exit_property_failure = 1,
    exit_validation = 2,
    exit_non_generic = 3,
};

/// The mirs command line. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mirs
