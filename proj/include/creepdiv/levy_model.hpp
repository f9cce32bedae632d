#pragma once

#include <string>
#include <vector>

namespace creepdiv {

/// One exponential phase of the hyperexponential claim density
/// rho(x) = sum_i arrival_rate_i * decay_i * exp(-decay_i * x).
struct JumpPhase {
    double arrival_rate = 0.0;  // lambda_i
    double decay = 0.0;         // p_i
};

/// Surplus model X_t = c t + sigma B_t - (compound Poisson, hyperexponential
/// claims) together with the control problem data: discount rate q, maximal
/// dividend rate delta and the terminal value S paid on creeping ruin.
///
/// The drift c is the compensated drift, i.e. the mean rate of the
/// continuous part; the Levy measure has finite mass so no small-jump
/// compensation is needed.
class LevyModel {
public:
    struct Params {
        double c = 0.0;
        double sigma = 0.0;
        std::vector<JumpPhase> jumps;
        double q = 0.0;
        double delta = 0.0;
        double S = 0.0;
    };

    /// Throws InvalidModel on non-finite values, non-positive jump data,
    /// q <= 0, delta <= 0, sigma < 0, S < 0, or decays closer than 1e-8
    /// relative (duplicate phases must be merged by summing arrival rates).
    explicit LevyModel(Params params);

    double c() const { return p_.c; }
    double sigma() const { return p_.sigma; }
    double q() const { return p_.q; }
    double delta() const { return p_.delta; }
    double S() const { return p_.S; }
    const std::vector<JumpPhase>& jumps() const { return p_.jumps; }
    const Params& params() const { return p_; }

    /// Pi(0, inf) = sum of arrival rates.
    double jump_mass() const;
    double max_decay() const;

    LevyModel with_S(double S) const;

private:
    Params p_;
};

/// X is the uncontrolled surplus, Y = X - delta t the surplus paying at the
/// maximal rate.
enum class Process { X, Y };

/// psi_X(theta) = c theta + sigma^2 theta^2 / 2 - sum_i lambda_i theta / (p_i + theta).
/// Throws PoleEvaluation at theta = -p_i.
double psi_X(const LevyModel& m, double theta);
/// psi_Y(theta) = psi_X(theta) - delta theta.
double psi_Y(const LevyModel& m, double theta);
double psi(const LevyModel& m, Process which, double theta);
double psi_prime(const LevyModel& m, Process which, double theta);

/// Largest root of psi = q: Phi(q) for X, phi(q) for Y.
double right_inverse(const LevyModel& m, Process which);

struct AssumptionReport {
    bool sigma_positive = false;
    bool phi_bound = false;         // phi(q) < 2 delta / sigma^2
    bool finite_mass = false;
    bool s_mass_bound = false;      // S < c / (Pi(0,inf) + q)
    bool drift_positivity = false;  // c - delta + sigma^2 phi(q) / 2 > 0
    double Phi_q = 0.0;
    double phi_q = 0.0;
    double s_window_upper = 0.0;    // NaN when the window denominator is not positive
    bool s_in_window = false;       // 0 < S < s_window_upper
    bool near_window_boundary = false;
    std::vector<std::string> messages;

    /// Every clause of the standing assumption (the S-window excluded).
    bool assumptions_hold() const {
        return sigma_positive && phi_bound && finite_mass && s_mass_bound;
    }
};

/// Evaluates the standing assumption and the positive-threshold S-window.
/// Never throws; violations are listed in `messages`.
AssumptionReport validate_assumptions(const LevyModel& m);

}  // namespace creepdiv
