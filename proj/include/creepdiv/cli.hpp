#pragma once

#include "creepdiv/levy_model.hpp"
#include "creepdiv/scale.hpp"
#include "creepdiv/simulate.hpp"
#include "creepdiv/threshold.hpp"
#include "creepdiv/value.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace creepdiv {

/// Exit codes: 0 success, 1 rejected input (ValidationError or bad flags),
/// 2 numerical failure (NumericalError).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Rounds to 9 significant digits; non-finite values pass through.
double round9(double v);
std::string format9(double v);

/// Solution document for `solve`. Roots, residues and b_star are kept at full
/// precision so `check` can recompute b* from them; the rest is rounded to 9
/// significant digits.
nlohmann::ordered_json solve_report(const LevyModel& m);

struct CheckResult {
    double stored_b_star = 0.0;
    double recomputed_b_star = 0.0;
    bool ok = false;  // |stored - recomputed| <= 1e-10
};

/// Re-solves the threshold problem from the roots stored in a solution document.
CheckResult check_solution(const nlohmann::ordered_json& solution);

/// CSV with header b,A_S,theta_S,g_S,r_S.
std::string scan_csv(const std::vector<ScanRow>& rows);

/// CSV with header x,V,V1,V2,hjb_residual; the residual is empty inside the
/// excluded band around b.
std::string verify_csv(const HjbReport& report);

nlohmann::ordered_json outcome_json(const SimOutcome& o);
nlohmann::ordered_json comparison_json(const StrategyComparison& c);

/// CSV with header path_id,ruin_time,class,discounted_dividends.
std::string paths_csv(const SimOutcome& o);

}  // namespace creepdiv
