#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modframe {

/// Exit codes: 0 certified / success, 1 falsified, 2 undetermined or
/// hypotheses not met, 3 input error. Reports go to `out` as JSON,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace modframe
