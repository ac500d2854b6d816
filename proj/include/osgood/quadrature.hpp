#ifndef OSGOOD_QUADRATURE_HPP
#define OSGOOD_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "osgood/core.hpp"

namespace osgood {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth, int max_depth, bool& converged) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= max_depth) {
        if (std::abs(delta) > 15.0 * tol) converged = false;
        return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth, converged) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth, converged);
}

}  // namespace detail

// Adaptive Simpson quadrature on [a, b]. Throws NumericError when the
// requested tolerance cannot be met within the recursion budget.
template <class F>
double adaptive_quadrature(const F& f, double a, double b, double rel_tol = 1e-8,
                           double abs_tol = 1e-14, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // First pass with the absolute tolerance scaled by a crude magnitude guess.
    const double scale = std::max(std::abs(whole), abs_tol);
    bool converged = true;
    double result = detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole,
                                                 std::max(abs_tol, rel_tol * scale), 0, max_depth,
                                                 converged);
    if (!converged) {
        throw NumericError("adaptive_quadrature: tolerance " + std::to_string(rel_tol) +
                           " not reached on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    return result;
}

// log(sum(exp(terms))) without overflow.
inline double log_sum_exp(const std::vector<double>& terms) {
    double m = -std::numeric_limits<double>::infinity();
    for (double t : terms) m = std::max(m, t);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

// Gauss-Legendre nodes/weights on [-1, 1], 16 points.
struct GaussLegendre16 {
    static const std::vector<double>& nodes() {
        static const std::vector<double> x = {
            -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
            -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
            0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
            0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
        return x;
    }
    static const std::vector<double>& weights() {
        static const std::vector<double> w = {
            0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
            0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
            0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
            0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
        return w;
    }
};

// Computes log of integral_a^b exp(log_f(s)) ds by panelled Gauss-Legendre with
// log-sum-exp accumulation. Used for large-p radial norms where the integrand
// overflows double precision.
template <class LogF>
double log_integral(const LogF& log_f, double a, double b, int panels) {
    const auto& xs = GaussLegendre16::nodes();
    const auto& ws = GaussLegendre16::weights();
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(panels) * xs.size());
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double s = lo + 0.5 * h * (xs[i] + 1.0);
            const double lf = log_f(s);
            if (std::isfinite(lf)) terms.push_back(lf + std::log(0.5 * h * ws[i]));
        }
    }
    return log_sum_exp(terms);
}

}  // namespace osgood

#endif  // OSGOOD_QUADRATURE_HPP
