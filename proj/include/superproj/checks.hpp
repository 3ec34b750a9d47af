#pragma once

#include "superproj/report.hpp"
#include "superproj/scenario.hpp"

namespace superproj {

/// Runs one check. Kernel exceptions propagate.
CheckResult run_check(const Scenario& s, const CheckSpec& spec);

/// Runs the scenario's checks in declaration order, restricted to `only` when
/// it is non-empty. Each check is isolated: an exception becomes an error
/// result and the remaining checks still run. Unknown names in `only` raise
/// ValidationError.
Report run_checks(const Scenario& s, const std::vector<std::string>& only = {});

}  // namespace superproj
