#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace nct {

// One measured quantity against a pinned tolerance (measured <= tol, or >= tol when
// at_least). Informational checks are reported but do not enter the verdict.
struct AcceptanceCheck {
    std::string name;
    double measured = 0.0;
    double tol = 0.0;
    bool pass = false;
    bool informational = false;
    bool at_least = false;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<AcceptanceCheck> checks;
    double seconds = 0.0;
    nlohmann::json notes = nlohmann::json::object();
    bool pass() const;
};

// Criteria 1..9; throws RejectedInput for other ids.
CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {1, 2, 3, 4, 5, 6, 7, 8, 9});

nlohmann::json to_json(const CriterionResult& r);
// "criterion N: PASS|FAIL  title (seconds)".
std::string summary_line(const CriterionResult& r);
// One indented line per check: verdict, name, measured, relation, tolerance.
std::string detail_lines(const CriterionResult& r);

}  // namespace nct
