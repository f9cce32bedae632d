#include "creepdiv/levy_model.hpp"

#include "creepdiv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace creepdiv {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

LevyModel::LevyModel(Params params) : p_(std::move(params)) {
    auto fail = [](const std::string& what) { throw InvalidModel(what); };
    if (!finite(p_.c)) fail("drift c must be finite");
    if (!finite(p_.sigma) || p_.sigma < 0.0) fail("sigma must be finite and non-negative");
    if (!finite(p_.q) || p_.q <= 0.0) fail("discount rate q must be positive");
    if (!finite(p_.delta) || p_.delta <= 0.0) fail("maximal dividend rate delta must be positive");
    if (!finite(p_.S) || p_.S < 0.0) fail("terminal value S must be non-negative");
    for (const auto& j : p_.jumps) {
        if (!finite(j.arrival_rate) || j.arrival_rate <= 0.0) fail("jump arrival rates must be positive");
        if (!finite(j.decay) || j.decay <= 0.0) fail("jump decay rates must be positive");
    }
    std::sort(p_.jumps.begin(), p_.jumps.end(),
              [](const JumpPhase& a, const JumpPhase& b) { return a.decay < b.decay; });
    for (std::size_t i = 1; i < p_.jumps.size(); ++i) {
        const double a = p_.jumps[i - 1].decay;
        const double b = p_.jumps[i].decay;
        if (b - a < 1e-8 * b) fail("jump decay rates must be pairwise distinct; merge duplicate phases");
    }
}

double LevyModel::jump_mass() const {
    double mass = 0.0;
    for (const auto& j : p_.jumps) mass += j.arrival_rate;
    return mass;
}

double LevyModel::max_decay() const { return p_.jumps.empty() ? 0.0 : p_.jumps.back().decay; }

LevyModel LevyModel::with_S(double S) const {
    Params p = p_;
    p.S = S;
    return LevyModel(std::move(p));
}

double psi_X(const LevyModel& m, double theta) {
    double value = m.c() * theta + 0.5 * m.sigma() * m.sigma() * theta * theta;
    for (const auto& j : m.jumps()) {
        const double denom = j.decay + theta;
        if (denom == 0.0) throw PoleEvaluation("Laplace exponent evaluated at the pole -p_i");
        value -= j.arrival_rate * theta / denom;
    }
    return value;
}

double psi_Y(const LevyModel& m, double theta) { return psi_X(m, theta) - m.delta() * theta; }

double psi(const LevyModel& m, Process which, double theta) {
    return which == Process::X ? psi_X(m, theta) : psi_Y(m, theta);
}

double psi_prime(const LevyModel& m, Process which, double theta) {
    double value = m.c() + m.sigma() * m.sigma() * theta;
    for (const auto& j : m.jumps()) {
        const double denom = j.decay + theta;
        if (denom == 0.0) throw PoleEvaluation("Laplace exponent derivative evaluated at a pole");
        value -= j.arrival_rate * j.decay / (denom * denom);
    }
    return which == Process::X ? value : value - m.delta();
}

double right_inverse(const LevyModel& m, Process which) {
    const double q = m.q();
    const double tol = 1e-12 * std::max(1.0, q);
    auto f = [&](double t) { return psi(m, which, t) - q; };

    // psi is convex with psi(0) = 0 < q, so f < 0 on [0, root) and > 0 beyond.
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw RootIsolationFailure("right inverse: no upper bracket found");
    }

    double x = hi;
    for (int iter = 0; iter < 200; ++iter) {
        const double fx = f(x);
        if (std::abs(fx) < tol) return x;
        if (fx < 0.0) lo = x; else hi = x;
        const double d = psi_prime(m, which, x);
        double next = x - fx / d;
        if (!(d > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) return next;
        x = next;
    }
    return x;
}

AssumptionReport validate_assumptions(const LevyModel& m) {
    AssumptionReport r;
    const double s2 = m.sigma() * m.sigma();
    r.Phi_q = right_inverse(m, Process::X);
    r.phi_q = right_inverse(m, Process::Y);

    r.sigma_positive = m.sigma() > 0.0;
    r.finite_mass = std::isfinite(m.jump_mass());
    r.phi_bound = r.sigma_positive ? r.phi_q < 2.0 * m.delta() / s2 : true;
    r.s_mass_bound = m.S() < m.c() / (m.jump_mass() + m.q());
    const double denom = m.c() - m.delta() + r.phi_q * s2 / 2.0;
    r.drift_positivity = denom > 0.0;

    if (denom > 0.0) {
        r.s_window_upper = (m.delta() / r.phi_q - s2 / 2.0) / denom;
        r.s_in_window = m.S() > 0.0 && m.S() < r.s_window_upper;
        r.near_window_boundary = std::abs(m.S() - r.s_window_upper) <= 1e-8;
    } else {
        r.s_window_upper = std::numeric_limits<double>::quiet_NaN();
    }

    auto note = [&](bool ok, const std::string& msg) {
        if (!ok) r.messages.push_back(msg);
    };
    note(r.sigma_positive, "sigma must be strictly positive (no creeping without a Gaussian part)");
    std::ostringstream phi_msg;
    phi_msg << "phi(q) = " << r.phi_q << " must be below 2 delta / sigma^2";
    note(r.phi_bound, phi_msg.str());
    note(r.finite_mass, "Levy measure must have finite mass");
    std::ostringstream s_msg;
    s_msg << "S = " << m.S() << " must be below c / (Pi(0,inf) + q) = " << m.c() / (m.jump_mass() + m.q());
    note(r.s_mass_bound, s_msg.str());
    note(r.drift_positivity, "c - delta + sigma^2 phi(q) / 2 must be positive");
    return r;
}

}  // namespace creepdiv
