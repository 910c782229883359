#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smlab {

// smlab space|op|suite NAME|report DIR. args excludes the program name.
// Returns the process exit code (0 pass, 1 fail, 2 configuration, 3 budget).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smlab
