#ifndef RENYICF_VERIFY_HPP
#define RENYICF_VERIFY_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace renyicf {

struct CheckResult {
    std::string name;
    bool pass = false;
    double achieved = 0.0;   // the measured deviation / statistic
    double tolerance = 0.0;  // the bound it must satisfy (0 = informational)
    std::string note;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    double seconds = 0.0;

    bool pass() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Registered identity suites:
//   duality-2d, replica-duality-2d, duality-3d, limits, jarzynski-small,
//   sw-correctness, scale-table, analysis-recovery, physics-reference
std::vector<std::string> suite_names();
SuiteReport run_suite(const std::string& name);

void print_report(const SuiteReport& rep, std::ostream& os);       // human readable
void print_report_json(const SuiteReport& rep, std::ostream& os);  // machine readable

}  // namespace renyicf

#endif
