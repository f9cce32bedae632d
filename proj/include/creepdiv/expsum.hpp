#pragma once

#include <span>
#include <vector>

namespace creepdiv {

/// One term coeff * x^power * exp(rate * x).
struct ExpTerm {
    double coeff = 0.0;
    int power = 0;
    double rate = 0.0;

    friend bool operator==(const ExpTerm&, const ExpTerm&) = default;
};

/// Finite sum of polynomial-times-exponential terms, kept in canonical form:
/// terms sorted by (rate, power), no duplicate (power, rate) pairs, negligible
/// coefficients pruned.
///
/// Scale functions are stored with `Support::half_line`: they evaluate to zero
/// for x < 0 and to their right limit at x = 0.
class ExpPolySum {
public:
    enum class Support { whole_line, half_line };

    /// Prune coefficients below this fraction of the largest |coeff|.
    static constexpr double prune_tolerance = 1e-14;
    /// A merged coefficient smaller than this fraction of the summed |parts|
    /// is cancellation noise and is dropped.
    static constexpr double cancellation_tolerance = 1e-12;
    /// Rate gaps below this fraction of the largest |rate| are treated as equal
    /// when convolving.
    static constexpr double confluence_tolerance = 1e-9;
    static constexpr int max_power = 8;

    ExpPolySum() = default;
    explicit ExpPolySum(std::vector<ExpTerm> terms, Support support = Support::whole_line);

    static ExpPolySum constant(double value);
    static ExpPolySum exponential(double coeff, double rate);

    std::span<const ExpTerm> terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    Support support() const { return support_; }
    ExpPolySum with_support(Support support) const;

    double operator()(double x) const;

    double max_abs_rate() const;
    double max_abs_coeff() const;

    ExpPolySum& operator+=(const ExpPolySum& other);
    ExpPolySum& operator-=(const ExpPolySum& other);
    ExpPolySum& operator*=(double factor);

    friend ExpPolySum operator+(ExpPolySum lhs, const ExpPolySum& rhs) { return lhs += rhs; }
    friend ExpPolySum operator-(ExpPolySum lhs, const ExpPolySum& rhs) { return lhs -= rhs; }
    friend ExpPolySum operator*(double factor, ExpPolySum f) { return f *= factor; }
    friend ExpPolySum operator*(ExpPolySum f, double factor) { return f *= factor; }
    friend ExpPolySum operator-(ExpPolySum f) { return f *= -1.0; }

    friend bool operator==(const ExpPolySum&, const ExpPolySum&) = default;

private:
    void canonicalize();

    std::vector<ExpTerm> terms_;
    Support support_ = Support::whole_line;
};

double eval(const ExpPolySum& f, double x);

/// Termwise derivative; `order` times.
ExpPolySum derivative(const ExpPolySum& f, int order = 1);

/// The antiderivative F with F(0) = 0.
ExpPolySum antiderivative(const ExpPolySum& f);

/// Integral of f over [lo, hi], in closed form.
double integrate(const ExpPolySum& f, double lo, double hi);

/// Integral of exp(-phi*y) f(y) over [b, inf). Throws DivergentIntegral unless
/// phi exceeds every rate of f by at least 1e-12.
double tail_laplace(const ExpPolySum& f, double phi, double b);

/// The function x -> integral_b^x g(x-y) h(y) dy, valid for x >= b.
ExpPolySum convolve_on(const ExpPolySum& g, const ExpPolySum& h, double b);

/// The function x -> f(x - shift), expanded in absolute x. Result is whole-line.
ExpPolySum translate(const ExpPolySum& f, double shift);

/// The function x -> f(x) * exp(kappa * x).
ExpPolySum multiply_exp(const ExpPolySum& f, double kappa);

}  // namespace creepdiv
