#include "creepdiv/errors.hpp"
#include "creepdiv/expsum.hpp"
#include "creepdiv/expsum_json.hpp"
#include "creepdiv/scale.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace creepdiv;
using testing_support::quad;
using testing_support::quad_tail;
using testing_support::rel_err;

namespace {

ExpPolySum term(double c, int n, double r) { return ExpPolySum({{c, n, r}}); }

ExpPolySum random_sum(std::mt19937_64& rng, int n_terms, double rate_lo, double rate_hi, int max_pow = 2) {
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_real_distribution<double> rate(rate_lo, rate_hi);
    std::uniform_int_distribution<int> pw(0, max_pow);
    std::vector<ExpTerm> t;
    for (int i = 0; i < n_terms; ++i) t.push_back({coeff(rng), pw(rng), rate(rng)});
    return ExpPolySum(t);
}

}  // namespace

TEST(ExpPolySumEval, ConstantAndSingleTerm) {
    EXPECT_DOUBLE_EQ(term(1, 0, 0)(5.0), 1.0);
    EXPECT_NEAR(term(2, 1, -1)(1.0), 0.735758882342885, 1e-15);
}

TEST(ExpPolySumEval, HalfLineVanishesBelowZero) {
    const ExpPolySum f({{1.0, 0, 1.0}}, ExpPolySum::Support::half_line);
    EXPECT_EQ(f(-1e-9), 0.0);
    EXPECT_DOUBLE_EQ(f(0.0), 1.0);
    EXPECT_NEAR(term(1, 0, 1)(-1.0), std::exp(-1.0), 1e-15);
    EXPECT_EQ(eval(f, -3.0), 0.0);
}

TEST(ExpPolySumEval, SixDigitCoefficientsVanishAtZero) {
    const ExpPolySum W({{-0.264203, 0, -5.76694}, {-0.015547, 0, -0.4129}, {0.27975, 0, 1.67984}},
                       ExpPolySum::Support::half_line);
    EXPECT_NEAR(W(0.0), 0.0, 1e-5);
}

TEST(ExpPolySumCanonical, MergesSortsAndPrunes) {
    const ExpPolySum f({{1.0, 0, 2.0}, {2.0, 0, 2.0}, {1.0, 1, -1.0}, {1e-20, 0, 5.0}});
    ASSERT_EQ(f.size(), 2u);
    EXPECT_EQ(f.terms()[0], (ExpTerm{1.0, 1, -1.0}));
    EXPECT_EQ(f.terms()[1], (ExpTerm{3.0, 0, 2.0}));
}

TEST(ExpPolySumCanonical, CancellationResidueIsDropped) {
    const double a = 0.1 + 0.2;
    const ExpPolySum f = term(a, 0, 1.5) - term(0.3, 0, 1.5) + term(1.0, 0, 0.0);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f.terms()[0].rate, 0.0);
}

TEST(ExpPolySumCanonical, Idempotent) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const ExpPolySum f = random_sum(rng, 6, -3, 3);
        const ExpPolySum g(std::vector<ExpTerm>(f.terms().begin(), f.terms().end()));
        EXPECT_EQ(f, g);
    }
}

TEST(ExpPolySumCanonical, PowerCapThrows) {
    EXPECT_THROW(ExpPolySum({{1.0, ExpPolySum::max_power + 1, 0.0}}), PowerOverflow);
    ExpPolySum f = term(1, ExpPolySum::max_power, 0.0);
    EXPECT_THROW(antiderivative(f), PowerOverflow);
}

TEST(ExpPolySumDerivative, Examples) {
    EXPECT_EQ(derivative(term(1, 0, 0.7)), term(0.7, 0, 0.7));
    EXPECT_EQ(derivative(term(1, 1, 0)), term(1, 0, 0));
    const ExpPolySum f = term(3, 2, -1);  // 3x^2 e^{-x}
    const double x = 0.8;
    EXPECT_NEAR(derivative(f)(x), 3 * (2 * x - x * x) * std::exp(-x), 1e-14);
    EXPECT_NEAR(derivative(f, 2)(x), 3 * (2 - 4 * x + x * x) * std::exp(-x), 1e-14);
}

TEST(ExpPolySumDerivative, ScaleFunctionSlopeAtOrigin) {
    const ScalePair sp = build_scale_pair(testing_support::reference_model());
    EXPECT_NEAR(derivative(sp.W)(0.0), 2.0, 1e-12);
}

TEST(ExpPolySumAntiderivative, Examples) {
    EXPECT_EQ(antiderivative(term(1, 0, 0)), term(1, 1, 0));
    const double th = 1.3;
    const ExpPolySum F = antiderivative(term(th, 0, th));
    EXPECT_EQ(F, ExpPolySum({{-1.0, 0, 0.0}, {1.0, 0, th}}));
}

TEST(ExpPolySumAntiderivative, MatchesQuadratureOfPayingScaleFunction) {
    const ScalePair sp = build_scale_pair(testing_support::reference_model());
    const double want = quad([&](double y) { return sp.Wbold(y); }, 0.0, 1.0);
    EXPECT_LT(rel_err(antiderivative(sp.Wbold)(1.0), want), 1e-8);
}

TEST(ExpPolySumAntiderivative, RoundTripAndZeroAtOrigin) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const ExpPolySum f = random_sum(rng, 5, -4, 4, 3);
        const ExpPolySum F = antiderivative(f);
        EXPECT_EQ(F(0.0), 0.0);
        const ExpPolySum back = derivative(F);
        ASSERT_EQ(back.size(), f.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            EXPECT_EQ(back.terms()[k].power, f.terms()[k].power);
            EXPECT_EQ(back.terms()[k].rate, f.terms()[k].rate);
            EXPECT_NEAR(back.terms()[k].coeff, f.terms()[k].coeff, 1e-12 * std::max(1.0, std::abs(f.terms()[k].coeff)));
        }
    }
}

TEST(ExpPolySumIntegrate, MatchesQuadrature) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 30; ++i) {
        const ExpPolySum f = random_sum(rng, 4, -3, 2);
        const double want = quad([&](double y) { return f(y); }, 0.3, 2.1);
        EXPECT_NEAR(integrate(f, 0.3, 2.1), want, 1e-10 * std::max(1.0, std::abs(want)));
    }
}

TEST(ExpPolySumTailLaplace, Examples) {
    EXPECT_NEAR(tail_laplace(term(1, 0, 0), 1.0, 0.0), 1.0, 1e-15);
    const auto m = testing_support::reference_model();
    const ScalePair sp = build_scale_pair(m);
    EXPECT_LT(rel_err(tail_laplace(derivative(sp.W), sp.phi_q, 0.0), 1.0 / 1.8), 1e-8);
    EXPECT_LT(rel_err(tail_laplace(sp.W, sp.phi_q, 0.0), 0.1901191325062434), 1e-8);
}

TEST(ExpPolySumTailLaplace, DivergentThrows) {
    EXPECT_THROW(tail_laplace(term(1, 0, 2.0), 2.0, 0.0), DivergentIntegral);
    EXPECT_THROW(tail_laplace(term(1, 0, 2.5), 2.0, 0.0), DivergentIntegral);
}

TEST(ExpPolySumTailLaplace, HalfLineClampsLowerLimit) {
    const ExpPolySum f({{1.0, 0, 0.0}}, ExpPolySum::Support::half_line);
    EXPECT_NEAR(tail_laplace(f, 1.0, -5.0), 1.0, 1e-15);
}

TEST(ExpPolySumTailLaplace, MatchesQuadratureOnRandomSums) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const ExpPolySum f = random_sum(rng, 4, -3, 1.5);
        const double margin = 0.5 + U(rng);
        const double phi = f.max_abs_rate() + margin;
        const double b = 2.0 * U(rng);
        double top = -1e300;
        for (const auto& t : f.terms()) top = std::max(top, t.rate);
        const double hi = b + 40.0 / (phi - top);
        const double want = quad([&](double y) { return std::exp(-phi * y) * f(y); }, b, hi);
        EXPECT_NEAR(tail_laplace(f, phi, b), want, 1e-8 * std::max(std::abs(want), 1e-3)) << "case " << i;
    }
}

TEST(ExpPolySumConvolve, Examples) {
    EXPECT_EQ(convolve_on(term(1, 0, 0), term(1, 0, 0), 0.0), term(1, 1, 0));
    EXPECT_EQ(convolve_on(term(1, 0, -1), term(1, 0, -1), 0.0), term(1, 1, -1));
}

TEST(ExpPolySumConvolve, MatchesQuadratureIncludingNearConfluence) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const ExpPolySum g = random_sum(rng, 3, -3, 2, 1);
        ExpPolySum h = random_sum(rng, 3, -3, 2, 1);
        if (i % 4 == 0) {
            // perturb one rate of h to sit on top of a rate of g
            const double r = g.terms()[0].rate * (1.0 + 1e-11);
            h += term(0.7, 0, r);
        }
        const double b = U(rng);
        const ExpPolySum conv = convolve_on(g, h, b);
        for (double x : {b + 0.1, b + 0.7, b + 2.0}) {
            const double want = quad([&](double y) { return g(x - y) * h(y); }, b, x);
            EXPECT_NEAR(conv(x), want, 1e-8 * std::max(1.0, std::abs(want))) << "case " << i << " x " << x;
        }
        // near-coincident rates inflate the coefficients, and with them the cancellation floor at b
        EXPECT_NEAR(conv(b), 0.0, 1e-12 * std::max(1.0, conv.max_abs_coeff())) << "case " << i;
    }
}

TEST(ExpPolySumTranslate, ShiftsArgument) {
    const ExpPolySum f = term(1.5, 2, -0.7) + term(-0.5, 0, 1.1);
    const ExpPolySum g = translate(f, 0.4);
    for (double x : {0.0, 0.4, 1.0, 3.0}) EXPECT_NEAR(g(x), f(x - 0.4), 1e-13);
    EXPECT_EQ(g.support(), ExpPolySum::Support::whole_line);
}

TEST(ExpPolySumMultiplyExp, ShiftsRates) {
    const ExpPolySum f = term(2, 1, -0.3);
    const ExpPolySum g = multiply_exp(f, 0.5);
    EXPECT_NEAR(g(1.7), f(1.7) * std::exp(0.85), 1e-14);
}

TEST(ExpPolySumJson, RoundTripIsExact) {
    std::mt19937_64 rng(21);
    const ExpPolySum f = random_sum(rng, 6, -5, 5, 2);
    nlohmann::ordered_json j = f;
    const ExpPolySum back = nlohmann::ordered_json::parse(j.dump()).get<ExpPolySum>();
    EXPECT_EQ(back, f);
    EXPECT_TRUE(j.is_array());
    EXPECT_TRUE(j[0].contains("coeff") && j[0].contains("power") && j[0].contains("rate"));
}
