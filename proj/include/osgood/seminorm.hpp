#ifndef OSGOOD_SEMINORM_HPP
#define OSGOOD_SEMINORM_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "osgood/field.hpp"
#include "osgood/modulus.hpp"
#include "osgood/quadrature.hpp"

namespace osgood {

// Integration region: full grid domain or a disk inside it.
struct Region {
    bool full = true;
    Vec2 center{0.0, 0.0};
    double radius = 0.0;

    static Region whole() { return Region{}; }
    static Region disk(Vec2 c, double r) { return Region{false, c, r}; }

    bool contains(const Grid2D& g, const Vec2& p) const {
        return full || g.distance(p, center) <= radius;
    }
};

constexpr double kInfExponent = std::numeric_limits<double>::infinity();

// Midpoint-rule L^p norm over the region; p = infinity returns the grid max.
inline double lp_norm(const ScalarField2D& f, double p, const Region& region = Region::whole()) {
    if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
    const Grid2D& g = f.grid();
    const double dA = g.cell_area();
    bool any = false;
    if (p == kInfExponent) {
        double m = 0.0;
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i)
                if (region.contains(g, g.node(i, j))) {
                    any = true;
                    m = std::max(m, std::abs(f.at(i, j)));
                }
        if (!any) throw DomainError("lp_norm: empty region");
        return m;
    }
    // Log-domain accumulation; |f|^p overflows double for large p otherwise.
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(g.n) * g.n);
    const double log_dA = std::log(dA);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            if (!region.contains(g, g.node(i, j))) continue;
            any = true;
            const double a = std::abs(f.at(i, j));
            if (a > 0.0) terms.push_back(p * std::log(a) + log_dA);
        }
    if (!any) throw DomainError("lp_norm: empty region");
    if (terms.empty()) return 0.0;
    return std::exp(log_sum_exp(terms) / p);
}

// Theta(p) choices appearing in the Yudovich-space experiments.
struct ThetaFunction {
    std::string name;
    std::function<double(double)> eval;

    static ThetaFunction constant() {
        return {"const", [](double) { return 1.0; }};
    }
    // Theta(p) = log_k(p); k = 0 gives Theta = p.
    static ThetaFunction log_k(int k) {
        if (k == 0) return {"log_0", [](double p) { return p; }};
        return {"log_" + std::to_string(k), [k](double p) { return iterated_log(k, p); }};
    }
    // Theta(p) = log p * log log p.
    static ThetaFunction log_times_loglog() {
        return {"log*loglog", [](double p) { return std::log(p) * std::log(std::log(p)); }};
    }

    static ThetaFunction by_name(const std::string& s) {
        if (s == "const" || s == "1") return constant();
        if (s == "log") return log_k(1);
        if (s == "loglog") return log_k(2);
        if (s == "log*loglog") return log_times_loglog();
        throw ConfigError("unknown Theta: " + s);
    }
};

struct NormReport {
    std::vector<double> p_grid;
    std::vector<double> lp_values;
    std::vector<double> ratios;  // lp / Theta(p)
    std::string theta_name;
    double yudovich_ratio = 0.0;
    bool ratio_still_growing = false;  // membership inconclusive at largest p
};

inline NormReport yudovich_norm(const ScalarField2D& f, const ThetaFunction& theta,
                                const std::vector<double>& p_grid,
                                const Region& region = Region::whole()) {
    NormReport rep;
    rep.p_grid = p_grid;
    rep.theta_name = theta.name;
    for (double p : p_grid) {
        const double th = theta.eval(p);
        if (!(th > 0.0)) throw DomainError("yudovich_norm: Theta(p) must be positive on the grid");
        const double lp = lp_norm(f, p, region);
        rep.lp_values.push_back(lp);
        rep.ratios.push_back(lp / th);
        rep.yudovich_ratio = std::max(rep.yudovich_ratio, lp / th);
    }
    const std::size_t m = rep.ratios.size();
    if (m >= 2) {
        const double last = rep.ratios[m - 1], prev = rep.ratios[m - 2];
        rep.ratio_still_growing =
            last >= rep.yudovich_ratio * (1.0 - 1e-12) && last > prev * 1.02;
    }
    return rep;
}

enum class SeminormTrend { Converged, Diverging, Oscillating };

struct SeminormTable {
    bool global = false;
    Vec2 center{0.0, 0.0};
    double gamma = 1.0;
    std::vector<double> radii;   // decreasing
    std::vector<double> values;  // sup over admissible pairs within each radius
    double extrapolated_limit = 0.0;
    SeminormTrend trend = SeminormTrend::Converged;
};

namespace detail {

inline void extrapolate_seminorm(SeminormTable& t) {
    const auto& v = t.values;
    const std::size_t m = v.size();
    if (m == 0) return;
    if (m < 3) {
        t.extrapolated_limit = v.back();
        t.trend = SeminormTrend::Oscillating;
        return;
    }
    const double v1 = v[m - 3], v2 = v[m - 2], v3 = v[m - 1];
    const double scale = std::max({std::abs(v1), std::abs(v2), std::abs(v3), 1e-300});
    const double spread = (std::max({v1, v2, v3}) - std::min({v1, v2, v3})) / scale;
    if (spread < 0.02) {  // limit bracketed: last three radii agree within 2%
        t.extrapolated_limit = v3;
        t.trend = SeminormTrend::Converged;
    } else if (v1 < v2 && v2 < v3) {
        t.extrapolated_limit = v3;
        t.trend = SeminormTrend::Diverging;
    } else if (v1 > v2 && v2 > v3) {
        // Monotone decay: Aitken delta-squared toward the limit.
        const double den = (v3 - v2) - (v2 - v1);
        double lim = v3;
        if (std::abs(den) > 1e-300) lim = v3 - (v3 - v2) * (v3 - v2) / den;
        t.extrapolated_limit = std::max(0.0, std::min(lim, v3));
        t.trend = SeminormTrend::Converged;
    } else {
        t.extrapolated_limit = v3;
        t.trend = SeminormTrend::Oscillating;
    }
}

inline void check_seminorm_pre(const Grid2D& g, const ModulusSpec& spec,
                               const std::vector<double>& radii) {
    if (radii.empty()) throw DomainError("seminorm: empty radius list");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] >= spec.m_L())
            throw DomainError("seminorm: radius must be below m_L");
        if (i > 0 && radii[i] >= radii[i - 1])
            throw DomainError("seminorm: radii must be strictly decreasing");
    }
    if (radii.back() < 4.0 * g.dx())
        throw ResolutionError("seminorm: smallest radius spans fewer than 4 cells");
}

}  // namespace detail

// [f]_{x,gamma,L} sampled at a decreasing radius list. The base point is
// snapped to the nearest grid node so the numerator carries no interpolation
// error near a singular point; the sup excludes pairs closer than 2 cells.
inline SeminormTable local_seminorm(const ScalarField2D& f, const ModulusSpec& spec, Vec2 x,
                                    double gamma, const std::vector<double>& radii) {
    const Grid2D& g = f.grid();
    detail::check_seminorm_pre(g, spec, radii);
    const double dx = g.dx();
    const double off = g.periodic ? 0.0 : 0.5;
    int ic = static_cast<int>(std::lround((x.x - g.origin.x) / dx - off));
    int jc = static_cast<int>(std::lround((x.y - g.origin.y) / dx - off));
    if (g.periodic) {
        ic = ((ic % g.n) + g.n) % g.n;
        jc = ((jc % g.n) + g.n) % g.n;
    } else {
        ic = std::clamp(ic, 0, g.n - 1);
        jc = std::clamp(jc, 0, g.n - 1);
    }
    const Vec2 xc = g.node(ic, jc);
    const double fx = f.at(ic, jc);

    SeminormTable t;
    t.global = false;
    t.center = xc;
    t.gamma = gamma;
    t.radii = radii;
    const double r_max = radii.front();
    const int w = static_cast<int>(std::ceil(r_max / dx)) + 1;
    std::vector<double> sup(radii.size(), 0.0);
    for (int b = -w; b <= w; ++b)
        for (int a = -w; a <= w; ++a) {
            if (a == 0 && b == 0) continue;
            int ii = ic + a, jj = jc + b;
            if (g.periodic) {
                ii = ((ii % g.n) + g.n) % g.n;
                jj = ((jj % g.n) + g.n) % g.n;
            } else if (ii < 0 || jj < 0 || ii >= g.n || jj >= g.n) {
                continue;
            }
            const Vec2 y = g.node(ii, jj);
            const double d = g.distance(xc, y);
            if (d < 2.0 * dx || d >= r_max) continue;
            const double ratio = std::abs(fx - f.at(ii, jj)) / std::pow(spec.M(d), gamma);
            for (std::size_t k = 0; k < radii.size(); ++k)
                if (d < radii[k]) sup[k] = std::max(sup[k], ratio);
        }
    t.values = std::move(sup);
    detail::extrapolate_seminorm(t);
    return t;
}

// Global seminorm [f]_{gamma,L}: sup over all grid pairs within each radius.
inline SeminormTable global_seminorm(const ScalarField2D& f, const ModulusSpec& spec, double gamma,
                                     const std::vector<double>& radii) {
    const Grid2D& g = f.grid();
    detail::check_seminorm_pre(g, spec, radii);
    const double dx = g.dx();
    const double r_max = radii.front();
    const int w = static_cast<int>(std::ceil(r_max / dx)) + 1;
    std::vector<double> sup(radii.size(), 0.0);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const Vec2 x = g.node(i, j);
            const double fx = f.at(i, j);
            // Half-window avoids visiting each unordered pair twice.
            for (int b = 0; b <= w; ++b)
                for (int a = (b == 0 ? 1 : -w); a <= w; ++a) {
                    int ii = i + a, jj = j + b;
                    if (g.periodic) {
                        ii = ((ii % g.n) + g.n) % g.n;
                        jj = ((jj % g.n) + g.n) % g.n;
                    } else if (ii < 0 || jj < 0 || ii >= g.n || jj >= g.n) {
                        continue;
                    }
                    const Vec2 y = g.node(ii, jj);
                    const double d = g.distance(x, y);
                    if (d < 2.0 * dx || d >= r_max) continue;
                    const double ratio = std::abs(fx - f.at(ii, jj)) / std::pow(spec.M(d), gamma);
                    for (std::size_t k = 0; k < radii.size(); ++k)
                        if (d < radii[k]) sup[k] = std::max(sup[k], ratio);
                }
        }
    SeminormTable t;
    t.global = true;
    t.gamma = gamma;
    t.radii = radii;
    t.values = std::move(sup);
    detail::extrapolate_seminorm(t);
    return t;
}

struct IteratedLogLpRow {
    double p;
    double norm;   // || log_n(1/|.|) ||_{L^p(B_1)}
    double ratio;  // norm / log_{n-1}(p)
};

// || max(0, log_n(1/|.|)) ||_{L^p(B_1)} by 1D radial quadrature in the
// substitution s = log(1/r), accumulated in the log domain.
inline double iterated_log_radial_lp(int n, double p) {
    if (n < 1) throw DomainError("iterated_log_radial_lp: n >= 1 required");
    if (!(p >= 1.0)) throw DomainError("iterated_log_radial_lp: p >= 1 required");
    // integrand: log_{n-1}(s)^p e^{-2s}, positive for s > e_{n-2}(1) (any s>0 when n=1)
    const double s_lo = (n == 1) ? 0.0 : iterated_exp(n - 2, 1.0);
    const double s_hi = std::max(60.0, 4.0 + 3.0 * p);
    auto log_f = [n, p](double s) -> double {
        const double v = (n == 1) ? s : iterated_log(n - 1, s);
        if (v <= 0.0) return -std::numeric_limits<double>::infinity();
        return p * std::log(v) - 2.0 * s;
    };
    const int panels = std::max(64, static_cast<int>(s_hi));
    const double logI = log_integral(log_f, s_lo + 1e-14, s_hi, std::min(panels, 4000));
    if (!std::isfinite(logI))
        throw NumericError("iterated_log_radial_lp: quadrature produced non-finite value");
    return std::exp((std::log(kTwoPi) + logI) / p);
}

inline std::vector<IteratedLogLpRow> iterated_log_lp_growth(int n, const std::vector<double>& p_grid) {
    if (n < 1) throw DomainError("iterated_log_lp_growth: n >= 1 required");
    std::vector<IteratedLogLpRow> rows;
    for (double p : p_grid) {
        const double norm = iterated_log_radial_lp(n, p);
        const double denom = (n == 1) ? p : iterated_log(n - 1, p);
        rows.push_back({p, norm, norm / denom});
    }
    return rows;
}

}  // namespace osgood

#endif  // OSGOOD_SEMINORM_HPP
