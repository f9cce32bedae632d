#include "creepdiv/expsum.hpp"

#include "creepdiv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace creepdiv {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// n! / (n-k)!
double falling_factorial(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= n - i;
    return r;
}

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

void check_power(int power) {
    if (power > ExpPolySum::max_power) {
        throw PowerOverflow("polynomial power " + std::to_string(power) + " exceeds cap " +
                            std::to_string(ExpPolySum::max_power));
    }
}

}  // namespace

ExpPolySum::ExpPolySum(std::vector<ExpTerm> terms, Support support)
    : terms_(std::move(terms)), support_(support) {
    canonicalize();
}

ExpPolySum ExpPolySum::constant(double value) { return ExpPolySum({{value, 0, 0.0}}); }

ExpPolySum ExpPolySum::exponential(double coeff, double rate) {
    return ExpPolySum({{coeff, 0, rate}});
}

ExpPolySum ExpPolySum::with_support(Support support) const {
    ExpPolySum out = *this;
    out.support_ = support;
    return out;
}

void ExpPolySum::canonicalize() {
    for (const auto& t : terms_) check_power(t.power);
    std::sort(terms_.begin(), terms_.end(), [](const ExpTerm& a, const ExpTerm& b) {
        return a.rate < b.rate || (a.rate == b.rate && a.power < b.power);
    });

    std::vector<ExpTerm> merged;
    merged.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size();) {
        ExpTerm acc = terms_[i];
        double magnitude = std::abs(acc.coeff);
        std::size_t j = i + 1;
        for (; j < terms_.size() && terms_[j].rate == acc.rate && terms_[j].power == acc.power; ++j) {
            acc.coeff += terms_[j].coeff;
            magnitude += std::abs(terms_[j].coeff);
        }
        if (j - i > 1 && std::abs(acc.coeff) <= cancellation_tolerance * magnitude) acc.coeff = 0.0;
        if (acc.coeff != 0.0) merged.push_back(acc);
        i = j;
    }

    double largest = 0.0;
    for (const auto& t : merged) largest = std::max(largest, std::abs(t.coeff));
    std::erase_if(merged, [&](const ExpTerm& t) { return std::abs(t.coeff) < prune_tolerance * largest; });
    terms_ = std::move(merged);
}

double ExpPolySum::operator()(double x) const {
    if (support_ == Support::half_line && x < 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& t : terms_) {
        if (t.rate != 0.0) sum += t.coeff * ipow(x, t.power) * std::exp(t.rate * x);
    }
    for (const auto& t : terms_) {
        if (t.rate == 0.0) sum += t.coeff * ipow(x, t.power);
    }
    return sum;
}

double ExpPolySum::max_abs_rate() const {
    double r = 0.0;
    for (const auto& t : terms_) r = std::max(r, std::abs(t.rate));
    return r;
}

double ExpPolySum::max_abs_coeff() const {
    double r = 0.0;
    for (const auto& t : terms_) r = std::max(r, std::abs(t.coeff));
    return r;
}

ExpPolySum& ExpPolySum::operator+=(const ExpPolySum& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    if (other.support_ == Support::whole_line) support_ = Support::whole_line;
    canonicalize();
    return *this;
}

ExpPolySum& ExpPolySum::operator-=(const ExpPolySum& other) { return *this += -1.0 * other; }

ExpPolySum& ExpPolySum::operator*=(double factor) {
    for (auto& t : terms_) t.coeff *= factor;
    canonicalize();
    return *this;
}

double eval(const ExpPolySum& f, double x) { return f(x); }

ExpPolySum derivative(const ExpPolySum& f, int order) {
    ExpPolySum current = f;
    for (int k = 0; k < order; ++k) {
        std::vector<ExpTerm> out;
        out.reserve(2 * current.size());
        for (const auto& t : current.terms()) {
            if (t.rate != 0.0) out.push_back({t.coeff * t.rate, t.power, t.rate});
            if (t.power > 0) out.push_back({t.coeff * t.power, t.power - 1, t.rate});
        }
        current = ExpPolySum(std::move(out), f.support());
    }
    return current;
}

ExpPolySum antiderivative(const ExpPolySum& f) {
    std::vector<ExpTerm> out;
    for (const auto& t : f.terms()) {
        if (t.rate == 0.0) {
            check_power(t.power + 1);
            out.push_back({t.coeff / (t.power + 1), t.power + 1, 0.0});
            continue;
        }
        // int_0^x s^n e^{rs} ds = e^{rx} sum_k (-1)^k n!/(n-k)! x^{n-k} / r^{k+1} - (-1)^n n!/r^{n+1}
        const int n = t.power;
        double sign = 1.0;
        for (int k = 0; k <= n; ++k) {
            out.push_back({t.coeff * sign * falling_factorial(n, k) / ipow(t.rate, k + 1), n - k, t.rate});
            sign = -sign;
        }
        const double tail_sign = (n % 2 == 0) ? 1.0 : -1.0;
        out.push_back({-t.coeff * tail_sign * falling_factorial(n, n) / ipow(t.rate, n + 1), 0, 0.0});
    }
    ExpPolySum F(std::move(out), f.support());

    // Evaluation adds the polynomial part last, so a constant equal to minus the exponential
    // part at 0 makes F(0) exactly 0.
    std::vector<ExpTerm> terms(F.terms().begin(), F.terms().end());
    auto constant = std::find_if(terms.begin(), terms.end(), [](const ExpTerm& t) { return t.rate == 0.0 && t.power == 0; });
    if (constant == terms.end()) return F;
    double exp_part = 0.0;
    for (const auto& t : terms) {
        if (t.rate != 0.0 && t.power == 0) exp_part += t.coeff;
    }
    constant->coeff = -exp_part;
    return ExpPolySum(std::move(terms), f.support());
}

double integrate(const ExpPolySum& f, double lo, double hi) {
    const ExpPolySum F = antiderivative(f);
    return F(hi) - F(lo);
}

double tail_laplace(const ExpPolySum& f, double phi, double b) {
    if (f.support() == ExpPolySum::Support::half_line) b = std::max(b, 0.0);
    double sum = 0.0;
    for (const auto& t : f.terms()) {
        const double kappa = phi - t.rate;
        if (!(kappa >= 1e-12)) {
            throw DivergentIntegral("tail Laplace transform diverges: rate " + std::to_string(t.rate) +
                                    " is not below phi " + std::to_string(phi));
        }
        // int_b^inf y^n e^{-kappa y} dy = e^{-kappa b} sum_k n!/(n-k)! b^{n-k} / kappa^{k+1}
        double poly = 0.0;
        for (int k = 0; k <= t.power; ++k) {
            poly += falling_factorial(t.power, k) * ipow(b, t.power - k) / ipow(kappa, k + 1);
        }
        sum += t.coeff * std::exp(-kappa * b) * poly;
    }
    return sum;
}

ExpPolySum convolve_on(const ExpPolySum& g, const ExpPolySum& h, double b) {
    const double rate_scale = std::max(g.max_abs_rate(), h.max_abs_rate());
    std::vector<ExpTerm> out;
    for (const auto& gt : g.terms()) {
        for (const auto& ht : h.terms()) {
            const int m = gt.power;
            const int n = ht.power;
            check_power(m + n + 1);
            const double alpha = gt.rate;
            const double beta = ht.rate;
            const double gap = beta - alpha;
            const double ac = gt.coeff * ht.coeff;
            const bool confluent = std::abs(gap) <= ExpPolySum::confluence_tolerance * rate_scale;

            // g(x-y) h(y) = ac e^{alpha x} sum_j C(m,j) x^{m-j} (-1)^j y^{j+n} e^{gap y}
            for (int j = 0; j <= m; ++j) {
                const double outer = ac * binomial(m, j) * ((j % 2 == 0) ? 1.0 : -1.0);
                const int k = j + n;
                if (confluent) {
                    // int_b^x y^k dy = (x^{k+1} - b^{k+1}) / (k+1)
                    out.push_back({outer / (k + 1), m - j + k + 1, alpha});
                    out.push_back({-outer * ipow(b, k + 1) / (k + 1), m - j, alpha});
                    continue;
                }
                // int_b^x y^k e^{gap y} dy = P(x) e^{gap x} - P(b) e^{gap b},
                // P(t) = sum_i (-1)^i k!/(k-i)! t^{k-i} / gap^{i+1}
                double p_at_b = 0.0;
                double sign = 1.0;
                for (int i = 0; i <= k; ++i) {
                    const double c = sign * falling_factorial(k, i) / ipow(gap, i + 1);
                    out.push_back({outer * c, m - j + k - i, beta});
                    p_at_b += c * ipow(b, k - i);
                    sign = -sign;
                }
                out.push_back({-outer * p_at_b * std::exp(gap * b), m - j, alpha});
            }
        }
    }
    return ExpPolySum(std::move(out));
}

ExpPolySum translate(const ExpPolySum& f, double shift) {
    std::vector<ExpTerm> out;
    for (const auto& t : f.terms()) {
        // c (x-s)^n e^{r(x-s)} = c e^{-rs} sum_j C(n,j) (-s)^{n-j} x^j e^{rx}
        const double scale = t.coeff * std::exp(-t.rate * shift);
        for (int j = 0; j <= t.power; ++j) {
            out.push_back({scale * binomial(t.power, j) * ipow(-shift, t.power - j), j, t.rate});
        }
    }
    return ExpPolySum(std::move(out));
}

ExpPolySum multiply_exp(const ExpPolySum& f, double kappa) {
    std::vector<ExpTerm> out(f.terms().begin(), f.terms().end());
    for (auto& t : out) t.rate += kappa;
    return ExpPolySum(std::move(out), f.support());
}

}  // namespace creepdiv
