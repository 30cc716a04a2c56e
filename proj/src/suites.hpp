#pragma once

#include "report.hpp"

#include <string>
#include <vector>

namespace tracelab {

struct SuiteInfo {
    std::string name;
    std::string summary;
    int criterion = 0;  // acceptance criterion number, 0 when none
};

const std::vector<SuiteInfo>& suite_list();
/// Default configuration; every threshold a suite gates on lives here.
ojson suite_defaults(const std::string& name);
/// Runs a suite with `overrides` merged over the defaults (unknown keys are an error).
SuiteReport run_suite(const std::string& name, const ojson& overrides = ojson::object(), int threads = 0);

}  // namespace tracelab
