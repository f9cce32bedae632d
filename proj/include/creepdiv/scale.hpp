#pragma once

#include "creepdiv/expsum.hpp"
#include "creepdiv/levy_model.hpp"

#include <limits>
#include <span>
#include <vector>

namespace creepdiv {

/// q-scale functions of X and of Y = X - delta t, in closed form.
///
/// For a hyperexponential model, 1/(psi(theta) - q) is rational with
/// 2 + (number of phases) simple real poles theta_k, so
///     W(x) = sum_k exp(theta_k x) / psi'(theta_k),   x >= 0.
/// Roots are stored ascending; the last one is Phi(q) (resp. phi(q)).
struct ScalePair {
    ExpPolySum W;
    ExpPolySum Wbold;
    std::vector<double> roots_X;
    std::vector<double> roots_Y;
    std::vector<double> residues_X;
    std::vector<double> residues_Y;
    double Phi_q = 0.0;
    double phi_q = 0.0;
    double a_star = 0.0;  // largest minimiser of W'
};

/// Right limits at 0 of W and its first three derivatives.
struct BoundaryValues {
    double W0 = 0.0;
    double W1 = 0.0;
    double W2 = 0.0;
    double W3 = 0.0;
};

/// All real roots of psi = q, ascending, isolated by bisection on the
/// intervals cut out by the poles -p_i. Throws RootIsolationFailure if an
/// interval fails to bracket.
std::vector<double> exponent_roots(const LevyModel& m, Process which);

/// Requires sigma > 0 (InvalidModel otherwise).
ScalePair build_scale_pair(const LevyModel& m);

/// Rebuilds a pair from stored roots (as found in a solution dump); residues
/// are recomputed from the model.
ScalePair scale_pair_from_roots(const LevyModel& m, std::vector<double> roots_X,
                                std::vector<double> roots_Y);

/// (0, 2/sigma^2, -4c/sigma^4, 4/sigma^4 (Pi(0,inf) + q + 2c^2/sigma^2)).
BoundaryValues expected_boundary_values(const LevyModel& m);

/// Sums of residue-weighted root powers; throws BoundaryMismatch when they
/// disagree with `expected_boundary_values` beyond 1e-8 of the larger of the
/// expected value and the sum of absolute terms.
BoundaryValues boundary_values(const ScalePair& sp, const LevyModel& m);

/// A function given piecewise on [lo, hi) intervals covering part of
/// [0, inf); it is taken to vanish everywhere else, in particular on
/// (-inf, 0).
struct Piece {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    ExpPolySum f;
};

/// Generator of X applied at x > 0:
///     c f'(x) + sigma^2/2 f''(x) + sum_i lambda_i [ int_0^x f(x-y) p_i e^{-p_i y} dy - f(x) ].
/// Derivatives are taken from the piece with lo < x <= hi. Jump landings
/// below 0 contribute nothing; the value at the single point 0 is a null set
/// for the jump measure and never enters.
double apply_generator(const LevyModel& m, std::span<const Piece> pieces, double x);

/// Same, for one function vanishing on (-inf, 0).
double apply_generator(const LevyModel& m, const ExpPolySum& f, double x);

}  // namespace creepdiv
