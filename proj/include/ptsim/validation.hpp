#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ptsim/config.hpp"

namespace ptsim {

struct CheckResult {
    std::string name;
    bool passed = false;
    bool skipped = false;
    double worst = 0.0;      // worst residual seen (or margin, see detail)
    double tolerance = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    double seconds = 0.0;

    bool all_passed() const;
};

/// Runs the kernel, spectrum, interference and master-equation invariant
/// suites against the configured network, plus the three-way comparison of
/// scattering, Lindblad and (for the coupler) closed-form coincidences.
ValidationReport run_validation(const RunConfig& config);

void print_report(const ValidationReport& report, std::ostream& out);

}  // namespace ptsim
