#pragma once

#include "creepdiv/levy_model.hpp"
#include "creepdiv/scale.hpp"

#include <vector>

namespace creepdiv {

/// A_S(b): the coefficient of W in the value of the threshold-b strategy,
///     int_b^inf e^{-phi y} (1 - S sigma^2/2 W''(y)) dy / int_b^inf e^{-phi y} W'(y) dy.
double A_S(const ScalePair& sp, const LevyModel& m, double b);

/// A_S'(b) = W'(b) / int_b^inf e^{-phi (y-b)} W'(y) dy * (A_S(b) - theta_S(b)).
double A_S_prime(const ScalePair& sp, const LevyModel& m, double b);

/// theta_S(b) = (1 - S sigma^2/2 W''(b)) / W'(b); at b = 0 the right limit sigma^2/2 + S c.
double theta_S(const ScalePair& sp, const LevyModel& m, double b);

/// Closed-form derivative of theta_S.
double theta_S_prime(const ScalePair& sp, const LevyModel& m, double b);

/// g_S(b) = -S sigma^2/2 W'''(b) / W''(b). Throws PoleEvaluation near a*.
double g_S(const ScalePair& sp, const LevyModel& m, double b);

/// r_S(b) = -S sigma^2/2 W''''(b) / W'''(b).
double r_S(const ScalePair& sp, const LevyModel& m, double b);

struct ThresholdDiagnostics {
    int A_slope_changes = 0;      // sign changes of A_S along the grid
    bool A_rise_then_fall = false;
    int theta_slope_changes = 0;
    bool theta_unimodal = false;
    double theta_grid_peak = 0.0;  // grid argmax of theta_S
    bool ordering_holds = false;   // b* <= a_S* <= a*
    bool near_window_boundary = false;
    std::vector<double> grid;      // 400 log-spaced points on (1e-6, a* + 5)
};

struct ThresholdSolution {
    double b_star = 0.0;
    double a_star = 0.0;
    double a_S_star = 0.0;
    double A_at_b = 0.0;
    double theta_at_b = 0.0;
    double s_window_upper = 0.0;
    bool positive_threshold = false;  // false: S is outside the window and b* = 0
    ThresholdDiagnostics diagnostics;
};

/// a_S*: the single crossing of theta_S' through zero on (0, a*), or 0 when
/// theta_S starts out non-increasing.
double locate_a_S_star(const ScalePair& sp, const LevyModel& m);

/// Optimal threshold b* = inf{b >= 0 : A_S(b) <= theta_S(b)}.
///
/// Throws InvalidModel when the standing assumption fails and BracketFailure
/// when A_S - theta_S does not change sign on (0, a_S*] although S lies in
/// the window.
ThresholdSolution solve_threshold(const ScalePair& sp, const LevyModel& m);

struct ScanRow {
    double b = 0.0;
    double A = 0.0;
    double theta = 0.0;
    double g = 0.0;  // NaN at the pole a*
    double r = 0.0;
};

/// Evenly spaced rows on [b_min, b_max]; `steps` >= 2 points.
std::vector<ScanRow> scan_threshold(const ScalePair& sp, const LevyModel& m, double b_min, double b_max,
                                    int steps);

}  // namespace creepdiv
