#ifndef OSGOOD_TRANSPORT_HPP
#define OSGOOD_TRANSPORT_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "osgood/field.hpp"
#include "osgood/flow.hpp"
#include "osgood/modulus.hpp"
#include "osgood/seminorm.hpp"

namespace osgood {

// Minimum-image distance on a square torus of the given period.
inline double torus_distance(Vec2 a, Vec2 b, double period) {
    double dx = a.x - b.x, dy = a.y - b.y;
    dx -= period * std::round(dx / period);
    dy -= period * std::round(dy / period);
    return std::hypot(dx, dy);
}

// Initial data for the transport equation: an optional singular profile that
// is always evaluated analytically, plus a pointwise-evaluable background.
struct InitialData {
    std::optional<SingularProfile> profile;
    std::function<double(Vec2)> background;  // may be empty (treated as 0)
    bool periodic = false;
    double period = kTwoPi;

    double eval(Vec2 y) const {
        double v = 0.0;
        if (profile) {
            const double d = periodic ? torus_distance(y, profile->center(), period)
                                      : (y - profile->center()).norm();
            v += profile->at_distance(d);
        }
        if (background) v += background(y);
        return v;
    }

    static InitialData from_profile(SingularProfile p) {
        InitialData d;
        d.profile = std::move(p);
        return d;
    }
    static InitialData from_function(std::function<double(Vec2)> f) {
        InitialData d;
        d.background = std::move(f);
        return d;
    }
};

struct TransportSolution {
    ScalarField2D theta;
    int failed_nodes = 0;
};

// theta(x, t) = theta0(phi^{-1}(x, t)): each grid node is back-integrated and
// the initial data evaluated there, so grid values are exact pullbacks.
inline TransportSolution solve_transport(const VelocityField& u, const InitialData& theta0,
                                         double t, const Grid2D& grid, double tol = 1e-8) {
    TransportSolution sol;
    sol.theta = ScalarField2D(grid);
    std::vector<char> ok(static_cast<std::size_t>(grid.n) * grid.n, 1);
    for (int j = 0; j < grid.n; ++j)
        for (int i = 0; i < grid.n; ++i) {
            const Vec2 x = grid.node(i, j);
            try {
                const Vec2 y = (t == 0.0) ? x : inverse_flow(u, x, t, tol);
                sol.theta.at(i, j) = theta0.eval(y);
            } catch (const NumericError&) {
                ok[static_cast<std::size_t>(j) * grid.n + i] = 0;
                ++sol.failed_nodes;
            }
        }
    if (sol.failed_nodes > 0) {
        // Fill flagged nodes from the nearest valid neighbor (expanding ring).
        for (int j = 0; j < grid.n; ++j)
            for (int i = 0; i < grid.n; ++i) {
                if (ok[static_cast<std::size_t>(j) * grid.n + i]) continue;
                bool filled = false;
                for (int ring = 1; ring < grid.n && !filled; ++ring)
                    for (int b = -ring; b <= ring && !filled; ++b)
                        for (int a = -ring; a <= ring && !filled; ++a) {
                            if (std::max(std::abs(a), std::abs(b)) != ring) continue;
                            int ii = i + a, jj = j + b;
                            if (grid.periodic) {
                                ii = ((ii % grid.n) + grid.n) % grid.n;
                                jj = ((jj % grid.n) + grid.n) % grid.n;
                            } else if (ii < 0 || jj < 0 || ii >= grid.n || jj >= grid.n) {
                                continue;
                            }
                            if (!ok[static_cast<std::size_t>(jj) * grid.n + ii]) continue;
                            sol.theta.at(i, j) = sol.theta.at(ii, jj);
                            filled = true;
                        }
            }
    }
    return sol;
}

struct RemainderRecord {
    double t = 0.0;
    double r = 0.0;
    double r_valid = 0.0;
    double excluded_radius = 0.0;  // b not evaluated within 2 cells of the center
    double sup_b = 0.0;
    double b0_sup = 0.0;
    double log_mu = 0.0;
    double bound = 0.0;  // b0_sup + |gamma| [F] log mu
    double margin = 0.0;
    bool pass = false;
    int sign_changes = 0;  // of theta along the +x ray inside the valid ball
};

// b = theta - gamma F(M(|. - center_t|)) on the valid ball
// B_{R^{-1}(mu^{-1} R(r))}(center_t), compared against the theorem bound.
inline std::pair<ScalarField2D, RemainderRecord> extract_remainder(
    const ScalarField2D& theta, const SingularProfile& profile, Vec2 center_t,
    const GrowthFactor& mu, double r, double b0_sup, double t = 0.0) {
    const Grid2D& g = theta.grid();
    const ModulusSpec& spec = profile.modulus();
    if (!(r > 0.0) || r >= spec.m_L())
        throw DomainError("extract_remainder: r must lie in (0, m_L)");
    RemainderRecord rec;
    rec.t = t;
    rec.r = r;
    rec.b0_sup = b0_sup;
    rec.log_mu = mu.lint;
    rec.r_valid = spec.R_inv(spec.R(r) / mu.mu);
    const double dx = g.dx();
    if (rec.r_valid < 8.0 * dx)
        throw ResolutionError("extract_remainder: valid ball spans fewer than 8 cells");
    rec.excluded_radius = 2.0 * dx;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    ScalarField2D b(g);
    for (auto& v : b.data()) v = nan;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const Vec2 x = g.node(i, j);
            const double d = g.distance(x, center_t);
            if (d >= rec.r_valid || d < rec.excluded_radius) continue;
            const double val = theta.at(i, j) - profile.at_distance(d);
            b.at(i, j) = val;
            rec.sup_b = std::max(rec.sup_b, std::abs(val));
        }

    const double fs = profile.shape().slope_bound;
    rec.bound = b0_sup + std::abs(profile.gamma()) * fs * rec.log_mu;
    rec.margin = rec.bound - rec.sup_b;
    rec.pass = rec.sup_b <= rec.bound;

    // Qualitative oscillation count: sign changes of theta along the +x ray.
    {
        double prev = 0.0;
        bool have_prev = false;
        const int steps = static_cast<int>(rec.r_valid / dx);
        for (int k = 2; k <= steps; ++k) {
            const Vec2 p{center_t.x + k * dx, center_t.y};
            const double v = theta.interp(p);
            if (have_prev && v * prev < 0.0) ++rec.sign_changes;
            if (v != 0.0) {
                prev = v;
                have_prev = true;
            }
        }
    }
    return {std::move(b), rec};
}

struct TransportSeminormPair {
    SeminormTable before;
    SeminormTable after_inner;  // radii mapped through R^{-1}(mu^{-1} R(r))
    SeminormTable after_outer;  // radii mapped through R^{-1}(mu R(r)), clamped
    double mu = 1.0;
    Vec2 center_t{0.0, 0.0};
    std::vector<double> inner_radii;
    std::vector<double> outer_radii;
    bool bracket_pass = false;  // before value inside [inner, outer] with slack
    double worst_defect = 0.0;  // largest relative excursion outside the bracket
};

// Local seminorm of theta0 at x versus that of theta(t) at phi(x, t). Balls of
// radius r at time t have preimages bracketed between the two mapped radii, so
// the time-t value at the inner radius bounds the initial value from below and
// the outer one from above.
inline TransportSeminormPair seminorm_transport_check(const VelocityField& u,
                                                      const ModulusSpec& spec,
                                                      const InitialData& theta0, Vec2 x,
                                                      double gamma, double t,
                                                      const std::vector<double>& radii, int n = 512,
                                                      double tol = 1e-9, double slack = 0.1) {
    if (!u.bound())
        throw PreconditionError("seminorm_transport_check: field carries no modulus bound");
    TransportSeminormPair out;
    out.mu = std::exp(u.bound()->constant * std::abs(t));
    out.center_t = integrate_flow(u, x, t, tol).end();
    const double r_lim = 0.98 * spec.m_L();
    for (double r : radii) {
        out.inner_radii.push_back(spec.R_inv(spec.R(r) / out.mu));
        const double w = out.mu * spec.R(r);
        out.outer_radii.push_back(w < spec.R(r_lim) ? spec.R_inv(w) : r_lim);
    }

    const double half0 = radii.front() * 1.3;
    Grid2D g0 = Grid2D::box(n, {x.x - half0, x.y - half0}, 2.0 * half0);
    auto f0 = ScalarField2D::sample(g0, [&theta0](Vec2 p) { return theta0.eval(p); });
    out.before = local_seminorm(f0, spec, x, gamma, radii);

    const double half1 = out.outer_radii.front() * 1.3;
    Grid2D g1 = Grid2D::box(n, {out.center_t.x - half1, out.center_t.y - half1}, 2.0 * half1);
    auto sol = solve_transport(u, theta0, t, g1, tol);
    out.after_inner = local_seminorm(sol.theta, spec, out.center_t, gamma, out.inner_radii);
    out.after_outer = local_seminorm(sol.theta, spec, out.center_t, gamma, out.outer_radii);

    out.bracket_pass = true;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double lo = out.after_inner.values[k] * (1.0 - slack);
        const double hi = out.after_outer.values[k] * (1.0 + slack);
        const double v = out.before.values[k];
        const double scale = std::max({std::abs(v), std::abs(hi), 1e-300});
        double defect = 0.0;
        if (v < lo) defect = (lo - v) / scale;
        if (v > hi) defect = std::max(defect, (v - hi) / scale);
        out.worst_defect = std::max(out.worst_defect, defect);
        if (defect > 0.0) out.bracket_pass = false;
    }
    return out;
}

enum class SharpnessKind { LipschitzSuperlinear, LogLipschitzSuperlinear };

struct DivergenceTable {
    SharpnessKind kind = SharpnessKind::LipschitzSuperlinear;
    double t = 0.0;
    std::vector<double> radii;
    std::vector<double> M_values;  // M(r) of the kind's modulus
    std::vector<double> sup_b;     // sup over the sampled annulus
    double slope = 0.0;            // least-squares slope of sup_b against M(r)
    double intercept = 0.0;
};

// Measures the remainder left by a superlinear outer shape on shrinking
// annuli around the stagnation point and fits its growth against M(r).
inline DivergenceTable sharpness_experiment(SharpnessKind kind, const FShape& F, double t,
                                            const std::vector<double>& radii, int n_angles = 64,
                                            int bc_truncation = 31, double tol = 1e-9) {
    if (n_angles < 4 || n_angles % 4 != 0)
        throw DomainError("sharpness_experiment: n_angles must be a positive multiple of 4");
    const bool lip = (kind == SharpnessKind::LipschitzSuperlinear);
    const VelocityField u =
        lip ? VelocityField::hyperbolic() : VelocityField::bahouri_chemin(bc_truncation);
    const ModulusSpec spec = lip ? ModulusSpec::lipschitz() : ModulusSpec::log_lipschitz();
    const double r_cut = 0.9 * spec.m_L();
    SingularProfile profile({0.0, 0.0}, 1.0, spec, F, r_cut);
    const double period = kTwoPi;

    DivergenceTable table;
    table.kind = kind;
    table.t = t;
    for (double r : radii) {
        if (!(r > 0.0) || r >= spec.m_L())
            throw DomainError("sharpness_experiment: radius outside (0, m_L)");
        double sup = 0.0;
        for (int a = 0; a < n_angles; ++a) {
            const double ang = kTwoPi * a / n_angles;
            const Vec2 x{r * std::cos(ang), r * std::sin(ang)};
            const Vec2 y = inverse_flow(u, x, t, tol);
            const double d = lip ? y.norm() : torus_distance(y, {0.0, 0.0}, period);
            const double b = profile.at_distance(d) - profile.at_distance(r);
            sup = std::max(sup, std::abs(b));
        }
        table.radii.push_back(r);
        table.M_values.push_back(spec.M(r));
        table.sup_b.push_back(sup);
    }

    // least squares sup_b ~ slope * M(r) + intercept
    const std::size_t m = table.radii.size();
    if (m >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < m; ++i) {
            sx += table.M_values[i];
            sy += table.sup_b[i];
            sxx += table.M_values[i] * table.M_values[i];
            sxy += table.M_values[i] * table.sup_b[i];
        }
        const double den = m * sxx - sx * sx;
        table.slope = (m * sxy - sx * sy) / den;
        table.intercept = (sy - table.slope * sx) / m;
    }
    return table;
}

}  // namespace osgood

#endif  // OSGOOD_TRANSPORT_HPP
