#ifndef OSGOOD_FLOW_HPP
#define OSGOOD_FLOW_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "osgood/core.hpp"
#include "osgood/field.hpp"
#include "osgood/modulus.hpp"
#include "osgood/ode.hpp"
#include "osgood/quadrature.hpp"

namespace osgood {

// Outer shape F applied to M(|x - x0|); [F] = sup_{|z|>=1} |F'(z)|.
struct FShape {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> fprime;
    double slope_bound = 1.0;
    // Finite limit of F(z) as z -> +inf, when one exists (decaying powers).
    std::optional<double> limit_at_inf;

    static FShape identity() {
        return {"identity", [](double z) { return z; }, [](double) { return 1.0; }, 1.0};
    }
    // F(z) = z^g with g <= 1 (admissible slope on |z| >= 1 is g itself).
    static FShape power(double g) {
        FShape s{"power(" + std::to_string(g) + ")",
                 [g](double z) { return std::pow(z, g); },
                 [g](double z) { return g * std::pow(z, g - 1.0); }, std::abs(g)};
        if (g < 0.0) s.limit_at_inf = 0.0;
        return s;
    }
    static FShape log_shape() {
        return {"log", [](double z) { return std::log(z); }, [](double z) { return 1.0 / z; }, 1.0};
    }
    static FShape sin_shape(double lambda) {
        return {"sin(" + std::to_string(lambda) + ")",
                [lambda](double z) { return std::sin(lambda * z); },
                [lambda](double z) { return lambda * std::cos(lambda * z); }, std::abs(lambda)};
    }
    // Superlinear F(z) = z^2; [F] is unbounded (sharpness witness).
    static FShape square() {
        return {"square", [](double z) { return z * z; }, [](double z) { return 2.0 * z; },
                std::numeric_limits<double>::infinity()};
    }
};

namespace detail {

// C2 distance mollifier: h(rho) = rho for rho >= 1, flat cap h(0) = 1/2.
// h'(rho) = (1-s)^2 (1+2s) >= 0 with s = 1-rho, so h is monotone.
inline double moll_h(double rho) {
    if (rho >= 1.0) return rho;
    const double s = rho - 1.0;
    return 1.0 + s - s * s * s - 0.5 * s * s * s * s;
}

}  // namespace detail

// Radial singular structure gamma * F(M(|x - x0|)) with smooth support taper
// and optional grid mollification (M evaluated at a capped distance below
// moll_scale).
class SingularProfile {
public:
    SingularProfile(Vec2 center, double gamma, ModulusSpec modulus, FShape shape, double r_cut,
                    double taper_start_frac = 0.6, double moll_scale = 0.0)
        : center_(center),
          gamma_(gamma),
          modulus_(std::move(modulus)),
          shape_(std::move(shape)),
          r_cut_(r_cut),
          taper_start_(taper_start_frac * r_cut),
          moll_scale_(moll_scale) {
        if (!(r_cut > 0.0) || r_cut > modulus_.m_L())
            throw DomainError("SingularProfile: r_cut must lie in (0, m_L]");
        if (!(taper_start_frac > 0.0) || !(taper_start_frac < 1.0))
            throw DomainError("SingularProfile: taper_start_frac must lie in (0,1)");
    }

    const Vec2& center() const { return center_; }
    double gamma() const { return gamma_; }
    const ModulusSpec& modulus() const { return modulus_; }
    const FShape& shape() const { return shape_; }
    double r_cut() const { return r_cut_; }
    double moll_scale() const { return moll_scale_; }

    SingularProfile with_moll_scale(double eps) const {
        SingularProfile p = *this;
        p.moll_scale_ = eps;
        return p;
    }
    // Distances below this evaluate to the exact center limit when the shape
    // has one; absorbs back-integration error at the singular point, where the
    // modulus is too steep for any numeric distance to stand in for zero.
    SingularProfile with_center_snap(double snap) const {
        SingularProfile p = *this;
        p.center_snap_ = snap;
        return p;
    }
    SingularProfile with_center(Vec2 c) const {
        SingularProfile p = *this;
        p.center_ = c;
        return p;
    }

    // Mollified M; equals M(d) exactly for d >= moll_scale.
    double moll_M(double d) const {
        if (moll_scale_ > 0.0 && d < moll_scale_)
            return modulus_.M(moll_scale_ * detail::moll_h(d / moll_scale_));
        if (d <= 0.0) throw DomainError("SingularProfile: evaluation at the singular point");
        return modulus_.M(std::min(d, modulus_.m_L()));
    }

    double taper(double d) const {
        if (d <= taper_start_) return 1.0;
        if (d >= r_cut_) return 0.0;
        return 1.0 - smoothstep5((d - taper_start_) / (r_cut_ - taper_start_));
    }

    // Radial value at distance d from the center.
    double eval_radial(double d) const {
        if (d >= r_cut_) return 0.0;
        if (d <= center_snap_ && shape_.limit_at_inf && moll_scale_ == 0.0)
            return gamma_ * *shape_.limit_at_inf;
        return gamma_ * shape_.f(moll_M(d)) * taper(d);
    }

    double operator()(Vec2 x) const { return eval_radial((x - center_).norm()); }

    // Value with a caller-supplied distance (e.g. periodic distance on torus).
    double at_distance(double d) const { return eval_radial(d); }

private:
    Vec2 center_;
    double gamma_;
    ModulusSpec modulus_;
    FShape shape_;
    double r_cut_;
    double taper_start_;
    double moll_scale_;
    double center_snap_ = 0.0;
};

// Q(r) = int_0^r omega(s) s ds for a radial vorticity profile, tabulated on a
// log-spaced grid; the induced circular velocity is u = x^perp Q(|x|)/|x|^2.
class RadialVelocityTable {
public:
    explicit RadialVelocityTable(const SingularProfile& profile, int nodes = 600)
        : r_cut_(profile.r_cut()) {
        const double r_lo = std::max(profile.moll_scale() * 1e-3, r_cut_ * 1e-8);
        log_r_.resize(nodes);
        q_.resize(nodes);
        double acc = 0.0;
        double prev = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double lr = std::log(r_lo) + (std::log(r_cut_) - std::log(r_lo)) * i / (nodes - 1);
            const double r = std::exp(lr);
            if (i == 0) {
                // Solid-body start: omega approximately constant below r_lo.
                acc = 0.5 * profile.eval_radial(0.5 * r) * r * r;
            } else {
                acc += adaptive_quadrature(
                    [&profile](double s) { return profile.eval_radial(s) * s; }, prev, r, 1e-10,
                    1e-16);
            }
            log_r_[i] = lr;
            q_[i] = acc;
            prev = r;
        }
        q_total_ = acc;
    }

    double Q(double r) const {
        if (r <= 0.0) return 0.0;
        if (r >= r_cut_) return q_total_;
        const double lr = std::log(r);
        if (lr <= log_r_.front()) {
            // below the table: solid-body scaling Q ~ r^2
            return q_[0] * std::exp(2.0 * (lr - log_r_.front()));
        }
        auto it = std::upper_bound(log_r_.begin(), log_r_.end(), lr);
        std::size_t i = static_cast<std::size_t>(it - log_r_.begin()) - 1;
        if (i + 1 >= log_r_.size()) return q_total_;
        const double t = (lr - log_r_[i]) / (log_r_[i + 1] - log_r_[i]);
        return q_[i] * (1.0 - t) + q_[i + 1] * t;
    }

    double circulation() const { return kTwoPi * q_total_; }

    Vec2 velocity(Vec2 rel) const {
        const double r2 = rel.norm2();
        if (r2 == 0.0) return {0.0, 0.0};
        return rel.perp() * (Q(std::sqrt(r2)) / r2);
    }

private:
    double r_cut_;
    double q_total_ = 0.0;
    std::vector<double> log_r_, q_;
};

// Truncated double-sine-series velocity of the Bahouri-Chemin cell flow:
// u = grad^perp psi with Delta psi = sgn(x) sgn(y) on the 2pi-torus,
// summed directly over odd modes with |m|,|n| <= K.
inline Vec2 bahouri_chemin_velocity(int K, Vec2 p) {
    if (K < 1) throw DomainError("bahouri_chemin_velocity: K >= 1 required");
    const double c = 16.0 / (kPi * kPi);
    double ux = 0.0, uy = 0.0;
    for (int m = 1; m <= K; m += 2) {
        const double sx = std::sin(m * p.x), cx = std::cos(m * p.x);
        for (int n = 1; n <= K; n += 2) {
            const double denom = static_cast<double>(m) * m + static_cast<double>(n) * n;
            // psi_mn = -c sin(mx) sin(ny) / (m n denom)
            ux += sx * std::cos(n * p.y) / (m * denom);
            uy -= cx * std::sin(n * p.y) / (n * denom);
        }
    }
    return {c * ux, c * uy};
}

// Claimed modulus bound |u(x,t) - u(y,t)| <= constant * L(|x-y|).
struct ModulusBound {
    ModulusSpec spec;
    double constant = 1.0;
};

class VelocityField {
public:
    using EvalFn = std::function<Vec2(Vec2, double)>;

    static VelocityField zero() {
        VelocityField f;
        f.name_ = "zero";
        f.eval_ = [](Vec2, double) { return Vec2{0.0, 0.0}; };
        f.bound_ = ModulusBound{ModulusSpec::lipschitz(), 0.0};
        return f;
    }

    // u(x, y) = (y, x): Lipschitz with constant exactly 1; stable line y = -x.
    static VelocityField hyperbolic() {
        VelocityField f;
        f.name_ = "hyperbolic";
        f.eval_ = [](Vec2 p, double) { return Vec2{p.y, p.x}; };
        f.bound_ = ModulusBound{ModulusSpec::lipschitz(), 1.0};
        return f;
    }

    static VelocityField rigid_rotation(double omega) {
        VelocityField f;
        f.name_ = "rigid_rotation";
        f.eval_ = [omega](Vec2 p, double) { return omega * p.perp(); };
        f.bound_ = ModulusBound{ModulusSpec::lipschitz(), std::abs(omega)};
        return f;
    }

    static VelocityField bahouri_chemin(int K) {
        VelocityField f;
        f.name_ = "bahouri_chemin(K=" + std::to_string(K) + ")";
        f.eval_ = [K](Vec2 p, double) { return bahouri_chemin_velocity(K, p); };
        f.bc_truncation_ = K;
        return f;
    }

    static VelocityField radial_vortex(const SingularProfile& profile) {
        VelocityField f;
        f.name_ = "radial_vortex";
        auto table = std::make_shared<RadialVelocityTable>(profile);
        const Vec2 c = profile.center();
        f.eval_ = [table, c](Vec2 p, double) { return table->velocity(p - c); };
        return f;
    }

    // Time-interpolated sampled snapshots (linear in time, bicubic in space).
    static VelocityField sampled(std::vector<std::pair<double, VectorField2D>> snapshots) {
        if (snapshots.empty()) throw DomainError("sampled velocity: no snapshots");
        VelocityField f;
        f.name_ = "sampled";
        auto snaps =
            std::make_shared<std::vector<std::pair<double, VectorField2D>>>(std::move(snapshots));
        f.eval_ = [snaps](Vec2 p, double t) -> Vec2 {
            const auto& s = *snaps;
            if (s.size() == 1 || t <= s.front().first) return s.front().second.interp(p);
            if (t >= s.back().first) return s.back().second.interp(p);
            std::size_t i = 0;
            while (i + 1 < s.size() && s[i + 1].first < t) ++i;
            const double a = (t - s[i].first) / (s[i + 1].first - s[i].first);
            const Vec2 v0 = s[i].second.interp(p), v1 = s[i + 1].second.interp(p);
            return v0 * (1.0 - a) + v1 * a;
        };
        return f;
    }

    static VelocityField analytic(std::string name, EvalFn fn) {
        VelocityField f;
        f.name_ = std::move(name);
        f.eval_ = std::move(fn);
        return f;
    }

    Vec2 operator()(Vec2 p, double t) const { return eval_(p, t); }

    const std::string& name() const { return name_; }
    const std::optional<ModulusBound>& bound() const { return bound_; }
    int bc_truncation() const { return bc_truncation_; }

    VelocityField with_bound(ModulusBound b) const {
        VelocityField f = *this;
        f.bound_ = std::move(b);
        return f;
    }

    // Estimate of ||u(t)||_L by pair sampling within |x-y| < m_L/2. Used where
    // the field carries no exact constant; a certified sup is not computable
    // from samples.
    double estimate_modulus_constant(const ModulusSpec& spec, Vec2 lo, Vec2 hi, double t,
                                     int n_pairs = 10000, unsigned seed = 12345u) const {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
        std::uniform_real_distribution<double> ang(0.0, kTwoPi);
        std::uniform_real_distribution<double> lsep(std::log(1e-6), std::log(spec.m_L() / 2.0));
        double c = 0.0;
        for (int i = 0; i < n_pairs; ++i) {
            const Vec2 x{ux(rng), uy(rng)};
            const double sep = std::exp(lsep(rng));
            const double a = ang(rng);
            const Vec2 y = x + sep * Vec2{std::cos(a), std::sin(a)};
            const double du = (eval_(x, t) - eval_(y, t)).norm();
            c = std::max(c, du / spec.L(sep));
        }
        return c;
    }

private:
    std::string name_;
    EvalFn eval_;
    std::optional<ModulusBound> bound_;
    int bc_truncation_ = 0;
};

// phi(x0, .) on [0, t_final] (either sign) by adaptive RK5(4).
inline Trajectory integrate_flow(const VelocityField& u, Vec2 x0, double t_final,
                                 double tol = 1e-10, double max_dt = 1e30) {
    return integrate_ode([&u](Vec2 p, double t) { return u(p, t); }, x0, 0.0, t_final, tol, max_dt);
}

// phi^{-1}(x, t): back-integration from (x, t) to time 0.
inline Vec2 inverse_flow(const VelocityField& u, Vec2 x, double t, double tol = 1e-10,
                         double max_dt = 1e30) {
    if (t == 0.0) return x;
    return integrate_ode([&u](Vec2 p, double s) { return u(p, s); }, x, t, 0.0, tol, max_dt).end();
}

// Two-point Osgood bracket certificate: measured R(sep_t)/R(sep_0) against
// [1/mu(t), mu(t)].
struct SeparationCertificate {
    double sep0 = 0.0;
    double sep_t = 0.0;
    double ratio = 0.0;  // R(sep_t)/R(sep_0)
    double mu = 1.0;
    double lower = 0.0;
    double upper = 0.0;
    bool pass = false;
    double slack = 0.0;  // min distance to a bracket endpoint, relative to mu
    double modulus_constant = 0.0;
    int bc_truncation = 0;
};

inline SeparationCertificate pair_separation_certificate(const VelocityField& u,
                                                         const ModulusSpec& spec, Vec2 x, Vec2 y,
                                                         double t, double tol = 1e-10,
                                                         std::optional<double> constant_override =
                                                             std::nullopt) {
    double C;
    if (constant_override) {
        C = *constant_override;
    } else if (u.bound()) {
        C = u.bound()->constant;
    } else {
        throw PreconditionError("pair_separation_certificate: no modulus bound attached to field");
    }
    const double sep0 = (x - y).norm();
    if (!(sep0 > 0.0) || !(sep0 < spec.m_L()))
        throw PreconditionError("pair_separation_certificate: |x-y| must lie in (0, m_L)");
    const double mu = std::exp(C * std::abs(t));
    if (!(mu * spec.R(sep0) < 1.0))
        throw PreconditionError(
            "pair_separation_certificate: smallness condition mu(t) R(|x-y|) < 1 violated");

    const Vec2 xt = integrate_flow(u, x, t, tol).end();
    const Vec2 yt = integrate_flow(u, y, t, tol).end();

    SeparationCertificate cert;
    cert.sep0 = sep0;
    cert.sep_t = (xt - yt).norm();
    cert.mu = mu;
    cert.lower = 1.0 / mu;
    cert.upper = mu;
    cert.ratio = spec.R(cert.sep_t) / spec.R(sep0);
    cert.pass = cert.ratio >= cert.lower && cert.ratio <= cert.upper;
    cert.slack = std::min(cert.ratio - cert.lower, cert.upper - cert.ratio) / mu;
    cert.modulus_constant = C;
    cert.bc_truncation = u.bc_truncation();
    return cert;
}

}  // namespace osgood

#endif  // OSGOOD_FLOW_HPP
