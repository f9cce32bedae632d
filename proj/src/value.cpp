#include "creepdiv/value.hpp"

#include "creepdiv/errors.hpp"
#include "creepdiv/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace creepdiv {

namespace {

constexpr auto kWhole = ExpPolySum::Support::whole_line;

}  // namespace

ValueFunction::ValueFunction(LevyModel model, double b, double A_b, ExpPolySum below, ExpPolySum above)
    : model_(std::move(model)), b_(b), A_b_(A_b) {
    below_[0] = below.with_support(kWhole);
    above_[0] = above.with_support(kWhole);
    for (int d = 1; d < 3; ++d) {
        below_[d] = creepdiv::derivative(below_[d - 1]);
        above_[d] = creepdiv::derivative(above_[d - 1]);
    }
}

double ValueFunction::derivative(double x, int d, Branch branch) const {
    if (d < 0 || d > 2) throw InvalidConfig("value function derivatives are available up to order 2");
    if (branch == Branch::automatic) {
        if (x < 0.0) return 0.0;
        branch = (b_ > 0.0 && x <= b_) ? Branch::below : Branch::above;
    }
    return branch == Branch::below ? below_[d](x) : above_[d](x);
}

std::vector<Piece> ValueFunction::pieces() const {
    std::vector<Piece> out;
    if (b_ > 0.0) out.push_back({0.0, b_, below_[0]});
    out.push_back({b_, std::numeric_limits<double>::infinity(), above_[0]});
    return out;
}

ValueFunction build_value(const ScalePair& sp, const LevyModel& m, double b, Assembly assembly) {
    if (!(b >= 0.0)) throw InvalidConfig("threshold b must be non-negative");
    if (assembly == Assembly::automatic) assembly = (b == 0.0) ? Assembly::reduced : Assembly::general;
    if (assembly == Assembly::reduced && b != 0.0) {
        throw InvalidConfig("the reduced value-function form applies to b = 0 only");
    }

    const double half = 0.5 * m.S() * m.sigma() * m.sigma();
    const double delta = m.delta();
    const double A = A_S(sp, m, b);
    const ExpPolySum W = sp.W.with_support(kWhole);
    const ExpPolySum W1 = derivative(W);
    const ExpPolySum W2 = derivative(W1);
    const ExpPolySum Wb = sp.Wbold.with_support(kWhole);
    const ExpPolySum Wb_bar = antiderivative(Wb);

    if (assembly == Assembly::reduced) {
        ExpPolySum above = half * derivative(Wb) + (A - m.S() * delta) * Wb - delta * Wb_bar;
        return ValueFunction(m, 0.0, A, ExpPolySum(), std::move(above));
    }

    ExpPolySum below = half * W1 + A * W;
    const ExpPolySum creep_part = W1 + delta * convolve_on(Wb, W2, b);
    const ExpPolySum dividend_part = W + delta * convolve_on(Wb, W1, b);
    ExpPolySum above = half * creep_part + A * dividend_part - delta * translate(Wb_bar, b);
    return ValueFunction(m, b, A, std::move(below), std::move(above));
}

ValueDerivatives value_derivatives(const ValueFunction& vf, double x, ValueFunction::Branch branch) {
    return {vf.derivative(x, 1, branch), vf.derivative(x, 2, branch)};
}

double hjb_residual(const ValueFunction& vf, double x) {
    const auto pieces = vf.pieces();
    const LevyModel& m = vf.model();
    const double generator = apply_generator(m, pieces, x) - m.q() * vf(x);
    return generator + m.delta() * std::max(0.0, 1.0 - vf.derivative(x, 1));
}

HjbReport hjb_verify(const ValueFunction& vf, const std::vector<double>& grid) {
    HjbReport report;
    const double b = vf.b();
    const double q = vf.model().q();
    for (double x : grid) {
        if (!(x > 0.0)) continue;
        HjbPoint pt;
        pt.x = x;
        pt.V = vf(x);
        pt.V1 = vf.derivative(x, 1);
        pt.V2 = vf.derivative(x, 2);
        pt.derivative_ok = (x <= b) ? pt.V1 >= 1.0 - report.derivative_tolerance
                                    : pt.V1 <= 1.0 + report.derivative_tolerance;
        if (std::abs(x - b) >= report.excluded_band) {
            pt.residual = hjb_residual(vf, x);
            pt.generator_ok = pt.residual <= report.residual_tolerance * (1.0 + q * std::abs(pt.V));
        }
        if (!pt.derivative_ok || !pt.generator_ok) report.violations.push_back(x);
        report.points.push_back(pt);
    }
    return report;
}

void require_hjb(const HjbReport& report) {
    if (report.passed()) return;
    std::ostringstream os;
    os << "HJB verification failed at " << report.violations.size() << " grid point(s):";
    const std::size_t shown = std::min<std::size_t>(report.violations.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) os << ' ' << report.violations[i];
    if (shown < report.violations.size()) os << " ...";
    throw HJBViolation(os.str());
}

double p_S(const ValueFunction& vf, const ScalePair& sp, double z) {
    const LevyModel& m = vf.model();
    const double b = vf.b();
    const double s2 = m.sigma() * m.sigma();
    const double delta = m.delta();
    const ExpPolySum W1 = derivative(sp.W.with_support(kWhole));
    const ExpPolySum W2 = derivative(W1);
    const double I2 = integrate(multiply_exp(W2, z), 0.0, b);
    const double I1 = integrate(multiply_exp(W1, z), 0.0, b);
    return -0.5 * m.S() * s2 * (z * z + 2.0 * delta * z / s2 + delta * z * I2) + delta * std::exp(b * z) +
           vf.A_b() * (z - delta * z * I1);
}

std::vector<std::pair<double, double>> spectral_atoms(const ScalePair& sp) {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& t : sp.Wbold.terms()) {
        if (t.rate < 0.0) atoms.emplace_back(-t.rate, -t.coeff);
    }
    return atoms;
}

double spectral_value_derivative(const ValueFunction& vf, const ScalePair& sp, double x) {
    double sum = 0.0;
    for (const auto& [z, xi] : spectral_atoms(sp)) sum += std::exp(-x * z) * p_S(vf, sp, z) * xi;
    return sum;
}

PSignScan scan_p_S(const ValueFunction& vf, const ScalePair& sp, int points) {
    PSignScan scan;
    scan.z_hi = 10.0 * std::max(sp.phi_q, vf.model().max_decay());
    double prev_z = 0.0;
    double prev = p_S(vf, sp, 0.0);
    for (int i = 1; i <= points; ++i) {
        const double z = scan.z_hi * i / points;
        const double value = p_S(vf, sp, z);
        if ((prev > 0.0) != (value > 0.0)) {
            if (scan.sign_changes == 0) scan.beta = prev_z + (z - prev_z) * prev / (prev - value);
            ++scan.sign_changes;
        }
        prev = value;
        prev_z = z;
    }
    return scan;
}

}  // namespace creepdiv
