#pragma once

#include "creepdiv/levy_model.hpp"
#include "creepdiv/scale.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace testing_support {

using creepdiv::JumpPhase;
using creepdiv::LevyModel;

// Brownian motion with drift 2, unit volatility, exponential(0.5) claims at rate 1.
inline LevyModel reference_model(double S = 0.05) {
    return LevyModel({2.0, 1.0, {{1.0, 0.5}}, 4.0, 1.8, S});
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// Adaptive Gauss-Kronrod on a finite interval.
template <class F>
double quad(F&& f, double a, double b) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13, &err);
}

// e^{-theta x} W(x) summed term by term so the exponentials never overflow.
inline double damped_W(const creepdiv::ScalePair& sp, double theta, double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < sp.roots_X.size(); ++k) s += sp.residues_X[k] * std::exp((sp.roots_X[k] - theta) * x);
    return s;
}

// Double-exponential quadrature on [a, inf).
template <class F>
double quad_tail(F&& f, double a) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([&](double t) { return f(a + t); }, 0.0, std::numeric_limits<double>::infinity(),
                                1e-13);
}

struct RandomModelOptions {
    int max_phases = 3;
    bool positive_threshold = true;  // S drawn inside the positive-threshold window
};

// Draws models until one satisfies the standing assumption. Decays are kept at
// least 20% apart so the root isolation is well conditioned.
inline LevyModel random_model(std::mt19937_64& rng, RandomModelOptions opt = {}) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (;;) {
        LevyModel::Params p;
        std::uniform_int_distribution<int> phases(0, opt.max_phases);
        const int k = phases(rng);
        double decay = 0.3 + 0.7 * U(rng);
        for (int i = 0; i < k; ++i) {
            p.jumps.push_back({0.1 + 1.4 * U(rng), decay});
            decay *= 1.2 + 1.8 * U(rng);
        }
        p.sigma = 0.5 + U(rng);
        p.c = 0.5 + 2.5 * U(rng);
        p.q = 0.3 + 3.7 * U(rng);
        p.delta = (0.3 + 0.9 * U(rng)) * p.c;
        p.S = 1e-3;
        LevyModel m(p);
        const auto r = creepdiv::validate_assumptions(m);
        if (!r.sigma_positive || !r.phi_bound || !r.finite_mass) continue;
        const double mass_bound = m.c() / (m.jump_mass() + m.q());
        double S = 0.0;
        if (opt.positive_threshold) {
            if (!(r.s_window_upper > 0.0)) continue;
            S = (0.1 + 0.8 * U(rng)) * std::min(r.s_window_upper, mass_bound);
        } else {
            S = (0.05 + 0.9 * U(rng)) * mass_bound;
        }
        LevyModel out = m.with_S(S);
        if (creepdiv::validate_assumptions(out).assumptions_hold()) return out;
    }
}

}  // namespace testing_support
