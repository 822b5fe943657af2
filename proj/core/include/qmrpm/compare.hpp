#pragma once

#include <string>

#include "qmrpm/distribution.hpp"
#include "qmrpm/report.hpp"

namespace qmrpm {

/// One exact comparison per value in the union of supports.
void compare_distributions(CheckReport& report, const std::string& where,
                           const Distribution& expected, const Distribution& actual);

void compare_joint_laws(CheckReport& report, const std::string& where, const JointLaw& expected,
                        const JointLaw& actual);

}  // namespace qmrpm
