#ifndef OSGOOD_EULER2D_HPP
#define OSGOOD_EULER2D_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "osgood/field.hpp"
#include "osgood/flow.hpp"
#include "osgood/seminorm.hpp"
#include "osgood/spectral.hpp"
#include "osgood/transport.hpp"

namespace osgood {

// One tracked singular vortex: the profile is centered wherever `center`
// currently is; `correction` is the measured residual grid velocity of this
// vortex alone at its own center (a discretization artifact subtracted from
// u_r).
struct Vortex {
    double gamma = 1.0;
    SingularProfile profile;
    Vec2 center{0.0, 0.0};
    Vec2 correction{0.0, 0.0};

    Vortex(double g, SingularProfile p, Vec2 c) : gamma(g), profile(std::move(p)), center(c) {}

    // Profile value at x for the current center, with torus metric.
    double value(Vec2 x) const {
        return gamma * profile.at_distance(torus_distance(x, center, kTwoPi));
    }
};

struct VortexSystem {
    std::vector<Vortex> vortices;
    std::function<double(Vec2)> background;  // b0, bounded
    std::function<double(Vec2, double)> forcing;

    // Composite vorticity on the grid, mean-compensated uniformly so the total
    // is exactly mean-free (Biot-Savart requirement on the torus).
    ScalarField2D initial_vorticity(int n) const {
        Grid2D g = Grid2D::torus(n);
        ScalarField2D w(g);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec2 x = g.node(i, j);
                double v = background ? background(x) : 0.0;
                for (const auto& vx : vortices) v += vx.value(x);
                w.at(i, j) = v;
            }
        const double m = w.mean();
        for (auto& v : w.data()) v -= m;
        return w;
    }
};

// Mollify each profile at scale 2*dx for the grid representation; measure the
// per-vortex center drift artifact from the vortex-alone field.
inline VortexSystem prepare_system(VortexSystem sys, int n) {
    const double eps = 2.0 * kTwoPi / n;
    for (auto& v : sys.vortices) {
        if (v.profile.moll_scale() < eps) v.profile = v.profile.with_moll_scale(eps);
        VortexSystem alone;
        alone.vortices.push_back(v);
        auto w = alone.initial_vorticity(n);
        auto u = biot_savart(SpectralState::from_physical(w));
        v.correction = u.interp(v.center);
    }
    return sys;
}

struct RemainderField {
    ScalarField2D b;            // analytic subtraction outside the capped core,
                                // mollified subtraction inside it
    double sup = 0.0;           // excludes the capped core annuli
    double excluded_radius = 0.0;
};

// b = omega - sum_i gamma_i F(M(|x - phi_i|)). Inside radius 2*moll_scale of a
// center the analytic profile is meaningless on the grid, so the mollified
// profile is subtracted there instead and the zone is excluded from sup|b|.
inline RemainderField extract_vortex_remainder(const ScalarField2D& omega,
                                               const std::vector<Vortex>& vortices) {
    const Grid2D& g = omega.grid();
    RemainderField out;
    out.b = ScalarField2D(g);
    for (const auto& v : vortices)
        out.excluded_radius = std::max(out.excluded_radius, 2.0 * v.profile.moll_scale());
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const Vec2 x = g.node(i, j);
            double val = omega.at(i, j);
            bool core = false;
            for (const auto& v : vortices) {
                const double d = torus_distance(x, v.center, kTwoPi);
                if (d < 2.0 * v.profile.moll_scale()) {
                    core = true;
                    val -= v.value(x);  // mollified form: bounded inside the cap
                } else {
                    const double m_L = v.profile.modulus().m_L();
                    const double dd = std::min(d, 0.999999 * m_L);
                    val -= (d >= v.profile.r_cut())
                               ? 0.0
                               : v.gamma * v.profile.gamma() *
                                     v.profile.shape().f(v.profile.modulus().M(dd)) *
                                     v.profile.taper(d);
                }
            }
            out.b.at(i, j) = val;
            if (!core) out.sup = std::max(out.sup, std::abs(val));
        }
    return out;
}

struct VortexMonitorRow {
    double t = 0.0;
    std::vector<Vec2> centers;
    double sup_b = 0.0;
    double l1_b = 0.0;
    double l2_b = 0.0;
    std::vector<double> lp_b;       // on the configured p grid
    double yudovich_ratio = 0.0;
    double umax = 0.0;
};

struct VortexRunResult {
    std::vector<VortexMonitorRow> rows;
    VortexSystem system;  // centers at final time
    SpectralState state;
    int steps = 0;
    double dt = 0.0;
};

struct VortexRunConfig {
    int n = 256;
    double T = 1.0;
    double dt = 0.0;  // 0: auto from initial CFL, re-checked every step
    int monitor_every = 10;
    std::vector<double> p_grid = {2.0, 4.0, 8.0, 16.0};
    ThetaFunction theta = ThetaFunction::log_k(1);
};

// Co-evolves the spectral vorticity and the center ODEs
// dphi_i/dt = u_r(phi_i, t); monitors remainder norms on the way.
inline VortexRunResult run_singular_vortex(const VortexSystem& system_in,
                                           const VortexRunConfig& cfg) {
    VortexRunResult res;
    res.system = prepare_system(system_in, cfg.n);
    auto w0 = res.system.initial_vorticity(cfg.n);
    res.state = SpectralState::from_physical(w0);
    const double dx = kTwoPi / cfg.n;

    auto monitor = [&](const SpectralState& s, double umax) {
        auto omega = s.to_physical();
        auto rem = extract_vortex_remainder(omega, res.system.vortices);
        VortexMonitorRow row;
        row.t = s.t;
        row.umax = umax;
        for (const auto& v : res.system.vortices) row.centers.push_back(v.center);
        row.sup_b = rem.sup;
        row.l1_b = lp_norm(rem.b, 1.0);
        row.l2_b = lp_norm(rem.b, 2.0);
        for (double p : cfg.p_grid) row.lp_b.push_back(lp_norm(rem.b, p));
        auto rep = yudovich_norm(rem.b, cfg.theta, cfg.p_grid);
        row.yudovich_ratio = rep.yudovich_ratio;
        res.rows.push_back(std::move(row));
    };

    {
        auto u0 = biot_savart(res.state);
        monitor(res.state, u0.max_norm());
        res.dt = cfg.dt > 0.0 ? cfg.dt : 0.4 * dx / std::max(u0.max_norm(), 1e-12);
    }

    std::vector<Vec2> centers;
    std::vector<Vec2> corrections;
    for (const auto& v : res.system.vortices) {
        centers.push_back(v.center);
        corrections.push_back(v.correction);
    }

    double t = 0.0;
    while (t < cfg.T - 1e-12) {
        double dt = std::min(res.dt, cfg.T - t);
        // collision guard
        for (std::size_t a = 0; a < centers.size(); ++a)
            for (std::size_t b = a + 1; b < centers.size(); ++b)
                if (torus_distance(centers[a], centers[b], kTwoPi) < 4.0 * dx)
                    throw NumericError("run_singular_vortex: center collision at t=" +
                                       std::to_string(t));
        try {
            euler_rk4_step(res.state, dt, res.system.forcing,
                           centers.empty() ? nullptr : &centers, corrections);
        } catch (const CflError& e) {
            res.dt = e.suggested_dt;
            continue;
        }
        t = res.state.t;
        ++res.steps;
        for (std::size_t c = 0; c < centers.size(); ++c) res.system.vortices[c].center = centers[c];
        if (res.steps % cfg.monitor_every == 0 || t >= cfg.T - 1e-12) {
            auto u = biot_savart(res.state);
            monitor(res.state, u.max_norm());
        }
    }
    return res;
}

// g(x, t) of the remainder equation: the transport mismatch seen by the
// singular profile when its center moves with u_r(phi) while the field moves
// with u_r(x), plus any forcing.
inline double remainder_source(const std::function<Vec2(Vec2)>& u_r, Vec2 center,
                               const SingularProfile& profile, Vec2 x, double min_dist,
                               double f_val = 0.0) {
    const double d = torus_distance(x, center, kTwoPi);
    if (d < min_dist)
        throw DomainError("remainder_source: x inside the excluded zone around the center");
    Vec2 rel = x - center;
    rel.x -= kTwoPi * std::round(rel.x / kTwoPi);
    rel.y -= kTwoPi * std::round(rel.y / kTwoPi);
    const Vec2 du = u_r(center) - u_r(x);
    const double dd = std::min(d, 0.999999 * profile.modulus().m_L());
    const double mprime = profile.modulus().M_prime(dd);
    return profile.gamma() * profile.shape().fprime(profile.modulus().M(dd)) * rel.dot(du) / d *
               mprime +
           f_val;
}

// Doubly periodic point-vortex velocity on [0, 2pi)^2: one row of images is
// summed in closed form via cosh-cos, rows are summed directly, and a
// quadratic counterterm accounts for the uniform neutralizing background.
inline Vec2 point_vortex_velocity(Vec2 x, Vec2 vortex_pos, double circulation, int rows = 6) {
    double rx = x.x - vortex_pos.x, ry = x.y - vortex_pos.y;
    rx -= kTwoPi * std::round(rx / kTwoPi);
    ry -= kTwoPi * std::round(ry / kTwoPi);
    const double c = circulation / (4.0 * kPi);
    double ux = 0.0, uy = 0.0;
    const double cosx = std::cos(rx), sinx = std::sin(rx);
    for (int m = -rows; m <= rows; ++m) {
        const double ym = ry - kTwoPi * m;
        const double den = std::cosh(ym) - cosx;
        if (den < 1e-300) continue;
        ux -= c * std::sinh(ym) / den;
        uy += c * sinx / den;
    }
    ux += circulation * ry / (4.0 * kPi * kPi);
    return {ux, uy};
}

// Reduced two-body dynamics: each center moves in the periodic point-vortex
// field of the other (plus the others' analytic radial near fields when the
// separation is inside a cutoff ball, which the caller avoids).
struct ReducedTwoBody {
    double circulation1 = 0.0;
    double circulation2 = 0.0;

    Vec2 rhs(Vec2 p, const Vec2& other, double other_circ) const {
        return point_vortex_velocity(p, other, other_circ);
    }
};

struct TwoBodyOrbit {
    std::vector<double> times;
    std::vector<Vec2> c1, c2;
    double half_period = 0.0;  // time for the separation vector to reverse
};

// Integrates the reduced ODE and measures the half period as the time at
// which the separation vector's angle advances by pi.
inline TwoBodyOrbit reduced_two_body_orbit(Vec2 p1, Vec2 p2, double circ1, double circ2,
                                           double t_max, double dt) {
    TwoBodyOrbit orbit;
    Vec2 a = p1, b = p2;
    const Vec2 sep0{a.x - b.x, a.y - b.y};
    const double ang0 = std::atan2(sep0.y, sep0.x);
    double unwrapped = 0.0, prev_ang = ang0;
    auto rhs = [&](Vec2 pa, Vec2 pb) {
        return std::pair<Vec2, Vec2>{point_vortex_velocity(pa, pb, circ2),
                                     point_vortex_velocity(pb, pa, circ1)};
    };
    double t = 0.0;
    orbit.times.push_back(t);
    orbit.c1.push_back(a);
    orbit.c2.push_back(b);
    while (t < t_max) {
        // RK4 on the coupled pair
        auto [k1a, k1b] = rhs(a, b);
        auto [k2a, k2b] = rhs(a + (0.5 * dt) * k1a, b + (0.5 * dt) * k1b);
        auto [k3a, k3b] = rhs(a + (0.5 * dt) * k2a, b + (0.5 * dt) * k2b);
        auto [k4a, k4b] = rhs(a + dt * k3a, b + dt * k3b);
        a += (dt / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        b += (dt / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        t += dt;
        orbit.times.push_back(t);
        orbit.c1.push_back(a);
        orbit.c2.push_back(b);
        const Vec2 sep{a.x - b.x, a.y - b.y};
        double ang = std::atan2(sep.y, sep.x);
        double d = ang - prev_ang;
        while (d > kPi) d -= kTwoPi;
        while (d < -kPi) d += kTwoPi;
        unwrapped += d;
        prev_ang = ang;
        if (orbit.half_period == 0.0 && std::abs(unwrapped) >= kPi) {
            // linear interpolation to the crossing
            const double overshoot = std::abs(unwrapped) - kPi;
            orbit.half_period = t - dt * overshoot / std::max(std::abs(d), 1e-300);
        }
    }
    return orbit;
}

// Half period of the spectral two-vortex run, from the tracked centers.
inline double measured_half_period(const std::vector<VortexMonitorRow>& rows) {
    if (rows.size() < 3 || rows.front().centers.size() != 2)
        throw DomainError("measured_half_period: need a monitored two-vortex run");
    double unwrapped = 0.0;
    double prev_ang = 0.0;
    bool first = true;
    double prev_t = 0.0;
    for (const auto& row : rows) {
        Vec2 sep{row.centers[0].x - row.centers[1].x, row.centers[0].y - row.centers[1].y};
        sep.x -= kTwoPi * std::round(sep.x / kTwoPi);
        sep.y -= kTwoPi * std::round(sep.y / kTwoPi);
        const double ang = std::atan2(sep.y, sep.x);
        if (!first) {
            double d = ang - prev_ang;
            while (d > kPi) d -= kTwoPi;
            while (d < -kPi) d += kTwoPi;
            const double before = unwrapped;
            unwrapped += d;
            if (std::abs(before) < kPi && std::abs(unwrapped) >= kPi) {
                const double overshoot = std::abs(unwrapped) - kPi;
                return row.t - (row.t - prev_t) * overshoot / std::max(std::abs(d), 1e-300);
            }
        }
        first = false;
        prev_ang = ang;
        prev_t = row.t;
    }
    throw NumericError("measured_half_period: separation never reversed within the run");
}

// Vorticity profile of the breakdown candidate: F(z) = z log z applied to the
// log-Lipschitz M gives M_2(1/d) * M_3(1/d) near the center.
inline FShape zlogz_shape() {
    return {"z*log(z)", [](double z) { return z * std::log(z); },
            [](double z) { return std::log(z) + 1.0; },
            std::numeric_limits<double>::infinity()};
}

struct BreakdownResult {
    VortexRunResult run;
    std::vector<double> times;
    std::vector<double> sup_b;
};

inline BreakdownResult breakdown_experiment(int n, double T, double dt = 0.0,
                                            int monitor_every = 10,
                                            bool with_background = true) {
    VortexSystem sys;
    SingularProfile profile({kPi, kPi}, 1.0, ModulusSpec::log_lipschitz(), zlogz_shape(), 0.35);
    sys.vortices.emplace_back(1.0, profile, Vec2{kPi, kPi});
    if (with_background) {
        // checkerboard sign field, the cell-flow vorticity, centered on the vortex
        sys.background = [](Vec2 p) { return sgn(std::sin(p.x - kPi)) * sgn(std::sin(p.y - kPi)); };
    }
    VortexRunConfig cfg;
    cfg.n = n;
    cfg.T = T;
    cfg.dt = dt;
    cfg.monitor_every = monitor_every;
    BreakdownResult out;
    out.run = run_singular_vortex(sys, cfg);
    for (const auto& row : out.run.rows) {
        out.times.push_back(row.t);
        out.sup_b.push_back(row.sup_b);
    }
    return out;
}

}  // namespace osgood

#endif  // OSGOOD_EULER2D_HPP
