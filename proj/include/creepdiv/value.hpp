#pragma once

#include "creepdiv/expsum.hpp"
#include "creepdiv/levy_model.hpp"
#include "creepdiv/scale.hpp"

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace creepdiv {

/// Value of the threshold-b strategy: expected discounted dividends plus S
/// times the discounted creeping-ruin indicator.
///
/// Stored as two exp-poly sums in absolute x: `below()` on (0, b] and
/// `above()` on (b, inf). V vanishes on (-inf, 0) and V(0) = V(0+) = S.
class ValueFunction {
public:
    ValueFunction(LevyModel model, double b, double A_b, ExpPolySum below, ExpPolySum above);

    double b() const { return b_; }
    double A_b() const { return A_b_; }
    const LevyModel& model() const { return model_; }
    const ExpPolySum& below() const { return below_[0]; }
    const ExpPolySum& above() const { return above_[0]; }

    enum class Branch { automatic, below, above };

    /// d-th derivative (d = 0, 1, 2). `automatic` picks below for x <= b
    /// (when b > 0) and above otherwise; the explicit branches give one-sided
    /// values at x = b.
    double derivative(double x, int d, Branch branch = Branch::automatic) const;
    double operator()(double x) const { return derivative(x, 0); }

    /// Pieces for `apply_generator`.
    std::vector<Piece> pieces() const;

private:
    LevyModel model_;
    double b_;
    double A_b_;
    ExpPolySum below_[3];
    ExpPolySum above_[3];
};

enum class Assembly {
    automatic,  // reduced form at b = 0, general otherwise
    general,    // refracted convolution form, any b >= 0
    reduced,    // b = 0 only: S sigma^2/2 Wb' + (A_S(0) - S delta) Wb - delta Wb-bar
};

ValueFunction build_value(const ScalePair& sp, const LevyModel& m, double b,
                          Assembly assembly = Assembly::automatic);

struct ValueDerivatives {
    double V1 = 0.0;
    double V2 = 0.0;
};

ValueDerivatives value_derivatives(const ValueFunction& vf, double x,
                                   ValueFunction::Branch branch = ValueFunction::Branch::automatic);

/// (G - q)V(x) + delta max(0, 1 - V'(x)); non-positive everywhere iff V solves the HJB inequality.
double hjb_residual(const ValueFunction& vf, double x);

struct HjbPoint {
    double x = 0.0;
    double V = 0.0;
    double V1 = 0.0;
    double V2 = 0.0;
    double residual = std::numeric_limits<double>::quiet_NaN();  // NaN inside the excluded band
    bool derivative_ok = true;
    bool generator_ok = true;
};

struct HjbReport {
    std::vector<HjbPoint> points;
    std::vector<double> violations;  // offending grid points
    double derivative_tolerance = 1e-6;
    double residual_tolerance = 1e-6;
    double excluded_band = 1e-4;
    bool passed() const { return violations.empty(); }
};

/// Checks V' >= 1 on (0, b], V' <= 1 on (b, inf) and the generator form of
/// the HJB inequality (outside a 1e-4 band around b) at every grid point.
/// Never throws; see `require_hjb`.
HjbReport hjb_verify(const ValueFunction& vf, const std::vector<double>& grid);

/// Throws HJBViolation listing the offending points when the report failed.
void require_hjb(const HjbReport& report);

/// p_S(z) of the spectral representation of V' above b*.
double p_S(const ValueFunction& vf, const ScalePair& sp, double z);

/// Atoms (z_j, xi_j) of the completely monotone part f(x) = sum_j xi_j e^{-z_j x}
/// of Wbold = phi'(q) e^{phi x} - f.
std::vector<std::pair<double, double>> spectral_atoms(const ScalePair& sp);

/// V'(x) for x > b* from sum_j e^{-x z_j} p_S(z_j) xi_j.
double spectral_value_derivative(const ValueFunction& vf, const ScalePair& sp, double x);

struct PSignScan {
    int sign_changes = 0;
    double beta = std::numeric_limits<double>::infinity();  // first zero of p_S, inf if none
    double z_hi = 0.0;
};

/// Dense scan of p_S on (0, z_hi], z_hi = 10 max(phi(q), max p_i).
PSignScan scan_p_S(const ValueFunction& vf, const ScalePair& sp, int points = 4000);

}  // namespace creepdiv
