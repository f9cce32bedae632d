#include "creepdiv/threshold.hpp"

#include "creepdiv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace creepdiv {

namespace {

double half_s_sigma2(const LevyModel& m) { return 0.5 * m.S() * m.sigma() * m.sigma(); }

// Sign changes in the sequence of successive differences, ignoring flat steps.
int slope_changes(const std::vector<double>& values, int* first_sign, int* last_sign) {
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    const double flat = 1e-13 * std::max(1.0, scale);
    int prev = 0;
    int changes = 0;
    *first_sign = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double d = values[i] - values[i - 1];
        if (std::abs(d) <= flat) continue;
        const int s = d > 0 ? 1 : -1;
        if (*first_sign == 0) *first_sign = s;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    *last_sign = prev;
    return changes;
}

}  // namespace

double A_S(const ScalePair& sp, const LevyModel& m, double b) {
    const double phi = sp.phi_q;
    const ExpPolySum W1 = derivative(sp.W);
    const ExpPolySum W2 = derivative(W1);
    const double num = std::exp(-phi * b) / phi - half_s_sigma2(m) * tail_laplace(W2, phi, b);
    const double den = tail_laplace(W1, phi, b);
    return num / den;
}

double A_S_prime(const ScalePair& sp, const LevyModel& m, double b) {
    const ExpPolySum W1 = derivative(sp.W);
    const double tail = std::exp(sp.phi_q * b) * tail_laplace(W1, sp.phi_q, b);
    return W1(b) / tail * (A_S(sp, m, b) - theta_S(sp, m, b));
}

double theta_S(const ScalePair& sp, const LevyModel& m, double b) {
    if (b <= 0.0) return 0.5 * m.sigma() * m.sigma() + m.S() * m.c();
    const ExpPolySum W1 = derivative(sp.W);
    const ExpPolySum W2 = derivative(W1);
    return (1.0 - half_s_sigma2(m) * W2(b)) / W1(b);
}

double theta_S_prime(const ScalePair& sp, const LevyModel& m, double b) {
    const ExpPolySum W1 = derivative(sp.W);
    const ExpPolySum W2 = derivative(W1);
    const ExpPolySum W3 = derivative(W2);
    const double w1 = W1(b);
    const double w2 = W2(b);
    const double w3 = W3(b);
    return (-w2 + half_s_sigma2(m) * (w2 * w2 - w1 * w3)) / (w1 * w1);
}

double g_S(const ScalePair& sp, const LevyModel& m, double b) {
    const ExpPolySum W2 = derivative(sp.W, 2);
    const ExpPolySum W3 = derivative(W2);
    const double w2 = W2(b);
    const double w3 = W3(b);
    if (std::abs(w2) < 1e-12 * std::abs(w3)) {
        std::ostringstream os;
        os << "g_S evaluated at its pole (W''(" << b << ") = 0)";
        throw PoleEvaluation(os.str());
    }
    return -half_s_sigma2(m) * w3 / w2;
}

double r_S(const ScalePair& sp, const LevyModel& m, double b) {
    const ExpPolySum W3 = derivative(sp.W, 3);
    const ExpPolySum W4 = derivative(W3);
    const double w3 = W3(b);
    const double w4 = W4(b);
    if (std::abs(w3) < 1e-12 * std::abs(w4)) throw PoleEvaluation("r_S evaluated where W''' vanishes");
    return -half_s_sigma2(m) * w4 / w3;
}

double locate_a_S_star(const ScalePair& sp, const LevyModel& m) {
    if (sp.a_star <= 0.0) return 0.0;
    if (theta_S_prime(sp, m, 0.0) <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = sp.a_star;
    if (theta_S_prime(sp, m, hi) > 0.0) {
        throw BracketFailure("theta_S' does not change sign on (0, a*)");
    }
    for (int iter = 0; iter < 300; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (theta_S_prime(sp, m, mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ThresholdSolution solve_threshold(const ScalePair& sp, const LevyModel& m) {
    const AssumptionReport report = validate_assumptions(m);
    if (!report.assumptions_hold()) {
        std::ostringstream os;
        os << "standing assumption violated:";
        for (const auto& msg : report.messages) os << "\n  " << msg;
        throw InvalidModel(os.str());
    }

    ThresholdSolution sol;
    sol.a_star = sp.a_star;
    sol.s_window_upper = report.s_window_upper;
    sol.a_S_star = locate_a_S_star(sp, m);
    sol.diagnostics.near_window_boundary = report.near_window_boundary;

    auto gap = [&](double b) { return A_S(sp, m, b) - theta_S(sp, m, b); };

    sol.positive_threshold = report.s_in_window && gap(0.0) > 0.0;
    if (sol.positive_threshold) {
        double lo = 0.0;
        double hi = sol.a_S_star;
        if (!(hi > 0.0) || gap(hi) > 0.0) {
            throw BracketFailure("A_S - theta_S has no sign change on (0, a_S*] although S is in the window");
        }
        for (int iter = 0; iter < 300; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (gap(mid) > 0.0 ? lo : hi) = mid;
        }
        sol.b_star = 0.5 * (lo + hi);
    }
    sol.A_at_b = A_S(sp, m, sol.b_star);
    sol.theta_at_b = theta_S(sp, m, sol.b_star);

    // Shape diagnostics on a log-spaced grid.
    auto& d = sol.diagnostics;
    const double upper = sp.a_star + 5.0;
    const int n = 400;
    d.grid.resize(n);
    std::vector<double> A_vals(n);
    std::vector<double> theta_vals(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        d.grid[i] = std::exp(std::log(1e-6) + t * (std::log(upper) - std::log(1e-6)));
        A_vals[i] = A_S(sp, m, d.grid[i]);
        theta_vals[i] = theta_S(sp, m, d.grid[i]);
    }
    int first = 0;
    int last = 0;
    d.A_slope_changes = slope_changes(A_vals, &first, &last);
    d.A_rise_then_fall = (d.A_slope_changes == 1 && first > 0) || (d.A_slope_changes == 0 && first < 0);
    d.theta_slope_changes = slope_changes(theta_vals, &first, &last);
    d.theta_unimodal = (d.theta_slope_changes == 1 && first > 0) || (d.theta_slope_changes == 0 && first < 0);
    d.theta_grid_peak = d.grid[std::max_element(theta_vals.begin(), theta_vals.end()) - theta_vals.begin()];

    const double slack = 1e-12 * std::max(1.0, sp.a_star);
    d.ordering_holds = sol.b_star <= sol.a_S_star + slack && sol.a_S_star <= sol.a_star + slack;
    if (!d.ordering_holds) {
        std::ostringstream os;
        os << "ordering b* <= a_S* <= a* violated: " << sol.b_star << ", " << sol.a_S_star << ", "
           << sol.a_star;
        throw BracketFailure(os.str());
    }
    return sol;
}

std::vector<ScanRow> scan_threshold(const ScalePair& sp, const LevyModel& m, double b_min, double b_max,
                                    int steps) {
    if (!(b_min >= 0.0) || !(b_max > b_min) || steps < 2) {
        throw InvalidConfig("scan needs 0 <= b_min < b_max and at least 2 steps");
    }
    std::vector<ScanRow> rows;
    rows.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        ScanRow row;
        row.b = b_min + (b_max - b_min) * i / (steps - 1);
        row.A = A_S(sp, m, row.b);
        row.theta = theta_S(sp, m, row.b);
        try {
            row.g = g_S(sp, m, row.b);
        } catch (const PoleEvaluation&) {
            row.g = std::numeric_limits<double>::quiet_NaN();
        }
        try {
            row.r = r_S(sp, m, row.b);
        } catch (const PoleEvaluation&) {
            row.r = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace creepdiv
