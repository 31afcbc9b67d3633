#pragma once

#include <string>
#include <vector>

namespace patchsim::demos {

/// The shipped spring-mass patch (same text as fixtures/springmass.pst),
/// frozen so demo numbers cannot drift.
extern const char* const kSpringmassNetlist;

const std::vector<std::string>& demo_names();

/// Run one named demo: writes <name>.csv, <name>.svg and <name>_report.txt
/// into out_dir (created if missing) and returns the report text.
/// Unknown names throw ContractError.
std::string run_demo(const std::string& name, const std::string& out_dir);

} // namespace patchsim::demos
