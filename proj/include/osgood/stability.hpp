#ifndef OSGOOD_STABILITY_HPP
#define OSGOOD_STABILITY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "osgood/euler2d.hpp"
#include "osgood/seminorm.hpp"
#include "osgood/spectral.hpp"

namespace osgood {

// Homogeneous Sobolev norm (2 pi sqrt(sum |k|^{2s} |w_k|^2)) of the modes.
inline double hs_norm(const SpectralState& s, double exponent) {
    double acc = 0.0;
    for (int j = 0; j < s.n; ++j)
        for (int i = 0; i < s.n; ++i) {
            const double kx = wavenumber(i, s.n), ky = wavenumber(j, s.n);
            const double k2 = kx * kx + ky * ky;
            if (k2 == 0.0) continue;
            acc += std::pow(k2, exponent) * std::norm(s.mode(i, j));
        }
    return kTwoPi * std::sqrt(acc);
}

struct InterpolationRow {
    int k = 0;
    double lhs = 0.0;   // ||f||_{H^s}
    double rhs = 0.0;   // ||f||_{H^{2^k s}}^{1/2^k} ||f||_{L2}^{1 - 1/2^k}
    double slack = 0.0; // rhs - lhs, nonnegative when the inequality holds
};

// ||f||_{H^s} <= ||f||_{H^{2^k s}}^{1/2^k} ||f||_{L2}^{1-1/2^k}, checked for
// k = 1..k_max by direct spectral sums. The field must be mean-free and
// supported in the dealias band so the highest norm is resolved.
inline std::vector<InterpolationRow> sobolev_interpolation_check(const SpectralState& s,
                                                                double exponent, int k_max) {
    if (exponent <= 0.0 || k_max < 1)
        throw DomainError("sobolev_interpolation_check: need s > 0 and k_max >= 1");
    if (std::ldexp(exponent, k_max) > 64.0)
        throw DomainError("sobolev_interpolation_check: 2^k_max * s too large for the band");
    double scale = 0.0;
    for (const auto& c : s.w) scale = std::max(scale, std::abs(c));
    if (std::abs(s.w[0]) > 1e-12 * std::max(scale, 1e-300))
        throw DomainError("sobolev_interpolation_check: field must be mean-free");
    for (int j = 0; j < s.n; ++j)
        for (int i = 0; i < s.n; ++i)
            if (!s.in_band(i, j) && std::abs(s.mode(i, j)) > 1e-12 * std::max(scale, 1e-300))
                throw DomainError("sobolev_interpolation_check: field has out-of-band modes");

    const double l2 = hs_norm(s, 0.0);
    const double lhs = hs_norm(s, exponent);
    std::vector<InterpolationRow> table;
    for (int k = 1; k <= k_max; ++k) {
        const double frac = std::ldexp(1.0, -k);  // 1 / 2^k
        const double high = hs_norm(s, std::ldexp(exponent, k));
        InterpolationRow row;
        row.k = k;
        row.lhs = lhs;
        row.rhs = std::pow(high, frac) * std::pow(l2, 1.0 - frac);
        row.slack = row.rhs - row.lhs;
        table.push_back(row);
    }
    return table;
}

// A singular datum together with a ladder of mollified versions. The sharpest
// available representation (finest eps) stands in for the limit when the true
// datum is unbounded at the core.
struct RegularizedFamily {
    Vec2 center{kPi, kPi};
    double delta = 0.0;                 // core radius: data may differ inside B_delta only
    std::vector<double> eps;            // strictly decreasing mollification scales
    std::vector<ScalarField2D> data;    // omega_0^eps, mean-free, one per eps
    double exterior_c1 = 0.0;           // uniform gradient bound outside B_1(center)
    double lp_exponent = 4.0;

    const ScalarField2D& finest() const { return data.back(); }

    // Mollifies `profile + background` at each scale. Checks that the ladder
    // is Lp-Cauchy toward the finest member and measures the exterior C1
    // bound by centered differences.
    static RegularizedFamily from_profile(const SingularProfile& profile,
                                          const std::function<double(Vec2)>& background,
                                          std::vector<double> eps_list, int n,
                                          double p = 4.0) {
        if (eps_list.size() < 2) throw DomainError("RegularizedFamily: need at least two scales");
        for (std::size_t i = 1; i < eps_list.size(); ++i)
            if (eps_list[i] >= eps_list[i - 1])
                throw DomainError("RegularizedFamily: scales must decrease");
        RegularizedFamily fam;
        fam.center = profile.center();
        fam.delta = std::max(2.0 * eps_list.front(), 4.0 * kTwoPi / n);
        fam.eps = std::move(eps_list);
        fam.lp_exponent = p;
        Grid2D g = Grid2D::torus(n);
        // mean compensation lives inside the core ball so that members with
        // different scales still agree exactly outside B_delta
        ScalarField2D bump(g);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double d = torus_distance(g.node(i, j), fam.center, kTwoPi);
                bump.at(i, j) = d >= fam.delta ? 0.0 : 1.0 - smoothstep5(d / fam.delta);
            }
        const double bump_mean = bump.mean();
        for (double e : fam.eps) {
            auto moll = profile.with_moll_scale(e);
            ScalarField2D w(g);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const Vec2 x = g.node(i, j);
                    w.at(i, j) = moll.at_distance(torus_distance(x, fam.center, kTwoPi)) +
                                 (background ? background(x) : 0.0);
                }
            const double m = w.mean();
            for (std::size_t k = 0; k < w.data().size(); ++k)
                w.data()[k] -= m * bump.data()[k] / bump_mean;
            fam.data.push_back(std::move(w));
        }

        // Lp-Cauchy toward the finest member
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < fam.data.size(); ++i) {
            ScalarField2D diff(g);
            for (std::size_t k = 0; k < diff.data().size(); ++k)
                diff.data()[k] = fam.data[i].data()[k] - fam.finest().data()[k];
            const double d = lp_norm(diff, p);
            if (d > prev * (1.0 + 1e-9))
                throw PreconditionError("RegularizedFamily: ladder is not Lp-decreasing");
            prev = d;
        }

        // uniform exterior gradient bound
        const double h = kTwoPi / n;
        for (const auto& w : fam.data) {
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    if (torus_distance(g.node(i, j), fam.center, kTwoPi) <= 1.0) continue;
                    const double gx = (w.at((i + 1) % n, j) - w.at((i + n - 1) % n, j)) / (2 * h);
                    const double gy = (w.at(i, (j + 1) % n) - w.at(i, (j + n - 1) % n)) / (2 * h);
                    fam.exterior_c1 = std::max(fam.exterior_c1, std::hypot(gx, gy));
                }
        }
        return fam;
    }
};

struct LightConeRow {
    double t = 0.0;
    double ball_radius = 0.0;    // delta + speed * c_star * t
    double exterior_sup = 0.0;   // sup |w1 - w2| outside the ball
    double interior_norm = 0.0;  // sup |w1 - w2| inside the ball
    double bound_rhs = 0.0;      // initial exterior error * e^{t C_meas}
    double front_radius = 0.0;   // smallest radius where |w1 - w2| > 1e-6
};

struct LightConeResult {
    std::vector<LightConeRow> rows;
    double c_star = 0.0;       // running max of max|u| over both runs
    double c_grad = 0.0;       // running max of exterior |grad u|
    double front_speed = 0.0;  // max growth rate of front_radius between monitors
    bool truncated = false;    // ball left the safe region before T
};

namespace detail {

inline double max_exterior_gradient(const SpectralState& s, Vec2 center, double radius) {
    auto u = biot_savart(s);
    auto ux = SpectralState::from_physical(u.x());
    auto uy = SpectralState::from_physical(u.y());
    const int n = s.n;
    std::vector<std::complex<double>> gxx(ux.w.size()), gxy(ux.w.size()), gyx(ux.w.size()),
        gyy(ux.w.size());
    const std::complex<double> I{0.0, 1.0};
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double kx = wavenumber(i, n), ky = wavenumber(j, n);
            const std::size_t idx = static_cast<std::size_t>(j) * n + i;
            gxx[idx] = I * kx * ux.w[idx];
            gxy[idx] = I * ky * ux.w[idx];
            gyx[idx] = I * kx * uy.w[idx];
            gyy[idx] = I * ky * uy.w[idx];
        }
    auto& fft = Fft2D::instance(n);
    fft.backward(gxx);
    fft.backward(gxy);
    fft.backward(gyx);
    fft.backward(gyy);
    Grid2D g = Grid2D::torus(n);
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (torus_distance(g.node(i, j), center, kTwoPi) <= radius) continue;
            const std::size_t idx = static_cast<std::size_t>(j) * n + i;
            const double fro =
                std::sqrt(gxx[idx].real() * gxx[idx].real() + gxy[idx].real() * gxy[idx].real() +
                          gyx[idx].real() * gyx[idx].real() + gyy[idx].real() * gyy[idx].real());
            worst = std::max(worst, fro);
        }
    return worst;
}

}  // namespace detail

// Evolves two members of the family under the same solver and watches the
// difference outside an expanding metric ball of radius delta + speed*C_* t.
// The ball must stay below pi/2 on the torus; when it would not, the run is
// truncated and flagged.
inline LightConeResult light_cone_experiment(const RegularizedFamily& fam, std::size_t i1,
                                             std::size_t i2, double T, double speed = 2.0,
                                             int monitor_every = 5) {
    if (i1 >= fam.data.size() || i2 >= fam.data.size())
        throw DomainError("light_cone_experiment: scale index out of range");
    auto s1 = SpectralState::from_physical(fam.data[i1]);
    auto s2 = SpectralState::from_physical(fam.data[i2]);
    const int n = s1.n;
    Grid2D g = Grid2D::torus(n);
    const double r_max = 0.98 * kPi / 2.0;

    // initial exterior discrepancy of each member vs the finest (outside B_delta)
    double e0 = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (torus_distance(g.node(i, j), fam.center, kTwoPi) <= fam.delta) continue;
            e0 = std::max(e0, std::abs(fam.data[i1].at(i, j) - fam.finest().at(i, j)));
            e0 = std::max(e0, std::abs(fam.data[i2].at(i, j) - fam.finest().at(i, j)));
        }

    LightConeResult res;
    auto monitor = [&]() {
        const double t = s1.t;
        const double r = std::min(fam.delta + speed * res.c_star * t, r_max);
        auto w1 = s1.to_physical(), w2 = s2.to_physical();
        LightConeRow row;
        row.t = t;
        row.ball_radius = r;
        row.front_radius = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double d = torus_distance(g.node(i, j), fam.center, kTwoPi);
                const double diff = std::abs(w1.at(i, j) - w2.at(i, j));
                if (d > r)
                    row.exterior_sup = std::max(row.exterior_sup, diff);
                else
                    row.interior_norm = std::max(row.interior_norm, diff);
                if (diff > 1e-6) row.front_radius = std::min(row.front_radius, d);
            }
        res.c_grad = std::max(res.c_grad, detail::max_exterior_gradient(s1, fam.center, r));
        row.bound_rhs = 2.0 * e0 * std::exp(t * res.c_grad);
        if (!res.rows.empty() && std::isfinite(row.front_radius) &&
            std::isfinite(res.rows.back().front_radius)) {
            const double dt = row.t - res.rows.back().t;
            if (dt > 0.0)
                res.front_speed = std::max(
                    res.front_speed, (row.front_radius - res.rows.back().front_radius) / dt);
        }
        res.rows.push_back(row);
    };

    {
        auto u1 = biot_savart(s1);
        auto u2 = biot_savart(s2);
        res.c_star = std::max(u1.max_norm(), u2.max_norm());
    }
    monitor();

    const double dx = kTwoPi / n;
    double dt = 0.4 * dx / std::max(res.c_star, 1e-12);
    int steps = 0;
    while (s1.t < T - 1e-12) {
        if (fam.delta + speed * res.c_star * s1.t >= r_max) {
            res.truncated = true;
            break;
        }
        const double h = std::min(dt, T - s1.t);
        try {
            euler_rk4_step(s1, h);
            euler_rk4_step(s2, h);
        } catch (const CflError& e) {
            dt = e.suggested_dt;
            continue;
        }
        ++steps;
        if (steps % monitor_every == 0 || s1.t >= T - 1e-12) {
            auto u1 = biot_savart(s1);
            auto u2 = biot_savart(s2);
            res.c_star = std::max({res.c_star, u1.max_norm(), u2.max_norm()});
            monitor();
        }
    }
    return res;
}

struct GronwallRow {
    double t = 0.0;
    double lhs = 0.0;  // ||difference||(t)
    double rhs = 0.0;  // d0^{exp(-K t)}
    bool pass = false;
};

struct GronwallResult {
    std::vector<GronwallRow> rows;
    double k_star = 0.0;
    bool all_pass = false;
    bool trivial = false;  // identically zero difference
};

// Checks d(t) <= d(0)^{exp(-K t)}. Requires d(0) < 1 so the exponent form
// contracts. When K is not supplied it is fitted on the first half of the
// series and verified on the whole of it.
inline GronwallResult gronwall_log_bound_check(const std::vector<double>& times,
                                               const std::vector<double>& diff,
                                               std::optional<double> K = std::nullopt) {
    if (times.size() != diff.size() || times.size() < 2)
        throw DomainError("gronwall_log_bound_check: need matching series of length >= 2");
    const double d0 = diff.front();
    if (d0 >= 1.0)
        throw PreconditionError("gronwall_log_bound_check: initial difference must be < 1");

    GronwallResult res;
    if (*std::max_element(diff.begin(), diff.end()) < 1e-15) {
        res.trivial = true;
        res.all_pass = true;
        for (std::size_t i = 0; i < times.size(); ++i)
            res.rows.push_back({times[i], diff[i], 0.0, true});
        return res;
    }
    if (d0 <= 0.0)
        throw PreconditionError("gronwall_log_bound_check: nonzero series needs d(0) > 0");

    const double log_d0 = std::log(d0);  // negative
    auto needed_k = [&](std::size_t i) {
        // smallest K making the bound hold at sample i; infinite when d >= 1
        if (times[i] <= 0.0) return 0.0;
        if (diff[i] >= 1.0) return std::numeric_limits<double>::infinity();
        if (diff[i] <= 0.0) return 0.0;
        const double ratio = std::log(diff[i]) / log_d0;  // in (0, inf)
        return std::max(0.0, -std::log(ratio) / times[i]);
    };

    if (K) {
        res.k_star = *K;
    } else {
        const std::size_t half = times.size() / 2;
        for (std::size_t i = 1; i <= half; ++i) res.k_star = std::max(res.k_star, needed_k(i));
    }

    res.all_pass = true;
    for (std::size_t i = 0; i < times.size(); ++i) {
        GronwallRow row;
        row.t = times[i];
        row.lhs = diff[i];
        row.rhs = std::pow(d0, std::exp(-res.k_star * times[i]));
        row.pass = row.lhs <= row.rhs * (1.0 + 1e-9);
        res.all_pass = res.all_pass && row.pass;
        res.rows.push_back(row);
    }
    return res;
}

}  // namespace osgood

#endif  // OSGOOD_STABILITY_HPP
