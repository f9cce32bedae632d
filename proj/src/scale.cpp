#include "creepdiv/scale.hpp"

#include "creepdiv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace creepdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bisection on (lo, hi) where f > 0 near lo and f < 0 near hi. Endpoints may
// be poles; only interior points are evaluated.
template <class F>
double bisect_decreasing(F&& f, double lo, double hi) {
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return mid;
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void expect_sign(bool ok, const char* where) {
    if (!ok) throw RootIsolationFailure(std::string("root isolation failed: ") + where);
}

ExpPolySum scale_function(std::span<const double> roots, std::span<const double> residues) {
    std::vector<ExpTerm> terms;
    for (std::size_t k = 0; k < roots.size(); ++k) terms.push_back({residues[k], 0, roots[k]});
    return ExpPolySum(std::move(terms), ExpPolySum::Support::half_line);
}

double locate_a_star(const ExpPolySum& W) {
    const ExpPolySum W2 = derivative(W, 2);
    if (W2(0.0) >= 0.0) return 0.0;
    double hi = 1.0;
    while (W2(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e6) throw RootIsolationFailure("W'' has no sign change; a* not found");
    }
    double lo = 0.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (W2(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

ScalePair assemble(const LevyModel& m, std::vector<double> roots_X, std::vector<double> roots_Y) {
    ScalePair sp;
    sp.roots_X = std::move(roots_X);
    sp.roots_Y = std::move(roots_Y);
    for (double t : sp.roots_X) sp.residues_X.push_back(1.0 / psi_prime(m, Process::X, t));
    for (double t : sp.roots_Y) sp.residues_Y.push_back(1.0 / psi_prime(m, Process::Y, t));
    sp.W = scale_function(sp.roots_X, sp.residues_X);
    sp.Wbold = scale_function(sp.roots_Y, sp.residues_Y);
    sp.Phi_q = sp.roots_X.back();
    sp.phi_q = sp.roots_Y.back();
    sp.a_star = locate_a_star(sp.W);
    return sp;
}

}  // namespace

std::vector<double> exponent_roots(const LevyModel& m, Process which) {
    if (!(m.sigma() > 0.0)) throw InvalidModel("scale functions require sigma > 0");
    const double q = m.q();
    auto f = [&](double t) { return psi(m, which, t) - q; };

    // Poles -p_i in descending order (decays are stored ascending).
    std::vector<double> poles;
    for (const auto& j : m.jumps()) poles.push_back(-j.decay);

    std::vector<double> roots;

    // Below the lowest pole (or below 0 with no jumps): f -> +inf at -inf.
    {
        const double right = poles.empty() ? 0.0 : poles.back();
        double width = 1.0;
        double left = right - width;
        while (!(f(left) > 0.0)) {
            width *= 2.0;
            left = right - width;
            expect_sign(width < 1e12, "no root below the lowest pole");
        }
        if (poles.empty()) {
            expect_sign(f(0.0) < 0.0, "psi(0) - q must be negative");
            roots.push_back(bisect_decreasing(f, left, 0.0));
        } else {
            // f -> -inf as theta -> -p_max from the left
            roots.push_back(bisect_decreasing(f, left, right));
        }
    }

    // Between consecutive poles: +inf at the lower pole, -inf at the upper.
    for (std::size_t i = poles.size(); i-- > 1;) {
        roots.push_back(bisect_decreasing(f, poles[i], poles[i - 1]));
    }

    // Between the highest pole and 0: +inf at -p_min, -q at 0.
    if (!poles.empty()) {
        expect_sign(f(0.0) < 0.0, "psi(0) - q must be negative");
        roots.push_back(bisect_decreasing(f, poles.front(), 0.0));
    }

    roots.push_back(right_inverse(m, which));

    const std::size_t expected = 2 + m.jumps().size();
    if (roots.size() != expected || !std::is_sorted(roots.begin(), roots.end())) {
        throw RootIsolationFailure("root count or interlacing check failed");
    }
    for (std::size_t i = 1; i < roots.size(); ++i) {
        if (!(roots[i] > roots[i - 1])) throw RootIsolationFailure("roots are not distinct");
    }
    for (double r : roots) {
        const double residual = std::abs(f(r));
        const double slope = std::abs(psi_prime(m, which, r));
        const double step = residual / slope;
        if (!(residual < 1e-12 * std::max(1.0, q) || step <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(r)))) {
            std::ostringstream os;
            os << "root " << r << " has residual " << residual;
            throw RootIsolationFailure(os.str());
        }
    }
    return roots;
}

ScalePair build_scale_pair(const LevyModel& m) {
    return assemble(m, exponent_roots(m, Process::X), exponent_roots(m, Process::Y));
}

ScalePair scale_pair_from_roots(const LevyModel& m, std::vector<double> roots_X,
                                std::vector<double> roots_Y) {
    if (roots_X.size() != 2 + m.jumps().size() || roots_Y.size() != roots_X.size()) {
        throw InvalidModel("stored root count does not match the model");
    }
    std::sort(roots_X.begin(), roots_X.end());
    std::sort(roots_Y.begin(), roots_Y.end());
    return assemble(m, std::move(roots_X), std::move(roots_Y));
}

BoundaryValues expected_boundary_values(const LevyModel& m) {
    const double s2 = m.sigma() * m.sigma();
    const double s4 = s2 * s2;
    return {0.0, 2.0 / s2, -4.0 * m.c() / s4,
            4.0 / s4 * (m.jump_mass() + m.q() + 2.0 * m.c() * m.c() / s2)};
}

BoundaryValues boundary_values(const ScalePair& sp, const LevyModel& m) {
    double sums[4] = {0, 0, 0, 0};
    double mags[4] = {0, 0, 0, 0};
    for (std::size_t k = 0; k < sp.roots_X.size(); ++k) {
        double term = sp.residues_X[k];
        for (int n = 0; n < 4; ++n) {
            sums[n] += term;
            mags[n] += std::abs(term);
            term *= sp.roots_X[k];
        }
    }
    const BoundaryValues want = expected_boundary_values(m);
    const double expected[4] = {want.W0, want.W1, want.W2, want.W3};
    for (int n = 0; n < 4; ++n) {
        // W(0+) = 0 has no scale of its own; measure against the size of the summed terms
        const double scale = std::max(std::abs(expected[n]), mags[n]);
        if (!(std::abs(sums[n] - expected[n]) <= 1e-8 * scale)) {
            std::ostringstream os;
            os << "boundary identity for W^(" << n << ")(0+) failed: got " << sums[n] << ", expected "
               << expected[n];
            throw BoundaryMismatch(os.str());
        }
    }
    return {sums[0], sums[1], sums[2], sums[3]};
}

double apply_generator(const LevyModel& m, std::span<const Piece> pieces, double x) {
    const Piece* here = nullptr;
    for (const auto& p : pieces) {
        if (p.lo < x && x <= p.hi) {
            here = &p;
            break;
        }
    }
    if (here == nullptr) throw InvalidConfig("generator evaluated outside the function's pieces");

    const ExpPolySum d1 = derivative(here->f);
    const ExpPolySum d2 = derivative(d1);
    const double fx = here->f(x);
    double value = m.c() * d1(x) + 0.5 * m.sigma() * m.sigma() * d2(x);

    for (const auto& j : m.jumps()) {
        // int_0^x f(u) p e^{-p(x-u)} du, piece by piece
        double landed = 0.0;
        for (const auto& p : pieces) {
            const double lo = std::max(p.lo, 0.0);
            const double hi = std::min(p.hi, x);
            if (hi <= lo) continue;
            const ExpPolySum weighted = multiply_exp(p.f, j.decay);
            landed += integrate(weighted, lo, hi);
        }
        landed *= j.decay * std::exp(-j.decay * x);
        value += j.arrival_rate * (landed - fx);
    }
    return value;
}

double apply_generator(const LevyModel& m, const ExpPolySum& f, double x) {
    const Piece whole{0.0, kInf, f.with_support(ExpPolySum::Support::whole_line)};
    return apply_generator(m, std::span<const Piece>(&whole, 1), x);
}

}  // namespace creepdiv
