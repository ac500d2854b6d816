#ifndef OSGOOD_MODULUS_HPP
#define OSGOOD_MODULUS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "osgood/core.hpp"
#include "osgood/quadrature.hpp"

namespace osgood {

// n-fold iterated logarithm, log_0(z) = z by convention.
inline double iterated_log(int n, double z) {
    if (n < 0) throw DomainError("iterated_log: n must be nonnegative");
    double v = z;
    for (int i = 0; i < n; ++i) {
        if (v <= 0.0) {
            throw DomainError("iterated_log: argument left the domain at level " +
                              std::to_string(i + 1));
        }
        v = std::log(v);
    }
    return v;
}

// n-fold iterated exponential, the inverse tower of iterated_log.
inline double iterated_exp(int n, double z) {
    if (n < 0) throw DomainError("iterated_exp: n must be nonnegative");
    double v = z;
    for (int i = 0; i < n; ++i) v = std::exp(v);
    return v;
}

// e_n(1): tower of n exponentials applied to 1.
inline double exp_tower(int n) { return iterated_exp(n, 1.0); }

enum class ModulusKind { Lipschitz, LogLipschitz, IteratedLogChain, Custom };

namespace detail {

// Monotone cubic (Fritsch-Carlson) interpolant. Evaluated on strictly
// increasing abscissae; preserves monotonicity of the data.
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2) throw DomainError("Pchip: need at least 2 nodes");
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (x_[i + 1] <= x_[i]) throw DomainError("Pchip: abscissae not strictly increasing");
            d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        }
        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
    }

    double operator()(double x) const {
        const std::size_t i = locate(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * y_[i] + h * h10 * m_[i] + h01 * y_[i + 1] + h * h11 * m_[i + 1];
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::size_t locate(double x) const {
        if (x < x_.front() || x > x_.back())
            throw DomainError("Pchip: evaluation outside tabulated range");
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i > 0) --i;
        if (i + 1 >= x_.size()) i = x_.size() - 2;
        return i;
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace detail

// An Osgood modulus of continuity L on (0, m_L) together with the derived
// quantities M(z) = int_z^{m_L} dr/L(r), R(z) = exp(-M(z)) and their inverses.
// Immutable after construction and safe to share across threads.
class ModulusSpec {
public:
    static ModulusSpec lipschitz() { return ModulusSpec(ModulusKind::Lipschitz, 0, 1.0); }

    static ModulusSpec log_lipschitz() {
        return ModulusSpec(ModulusKind::IteratedLogChain, 1, 1.0 / std::exp(1.0),
                           ModulusKind::LogLipschitz);
    }

    // L(z) = z log(1/z) log_2(1/z) ... log_n(1/z), m_L = 1/e_n(1).
    static ModulusSpec iterated_log_chain(int n) {
        if (n < 1) throw DomainError("iterated_log_chain: n must be >= 1");
        return ModulusSpec(ModulusKind::IteratedLogChain, n, 1.0 / exp_tower(n));
    }

    // Tabulated modulus (z_i, L_i) with strictly increasing z. Interpolated by
    // monotone cubic in (log z, log L) so positivity and monotonicity survive.
    static ModulusSpec custom(const std::vector<double>& z, const std::vector<double>& L,
                              double osgood_threshold = 30.0) {
        if (z.size() != L.size() || z.size() < 4)
            throw DomainError("custom modulus: need >= 4 matching (z, L) samples");
        std::vector<double> lz(z.size()), ll(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (z[i] <= 0.0 || L[i] <= 0.0)
                throw DomainError("custom modulus: samples must be strictly positive");
            if (i > 0 && z[i] <= z[i - 1])
                throw DomainError("custom modulus: z must be strictly increasing");
            if (i > 0 && L[i] < L[i - 1])
                throw DomainError("custom modulus: L must be nondecreasing");
            lz[i] = std::log(z[i]);
            ll[i] = std::log(L[i]);
        }
        ModulusSpec s(ModulusKind::Custom, 0, z.back());
        s.z_min_ = z.front();
        s.interp_ = std::make_shared<detail::Pchip>(std::move(lz), std::move(ll));
        // Osgood flag: either M at the smallest node already exceeds the
        // divergence threshold, or M is still visibly growing across the last
        // two tabulated decades (the integral has not converged).
        s.m_at_zmin_ = s.quadrature_M(s.z_min_);
        const double z_probe = std::min(s.z_min_ * 100.0, 0.5 * s.m_L_);
        const double growth = s.m_at_zmin_ - s.quadrature_M(z_probe);
        s.osgood_ = s.m_at_zmin_ > osgood_threshold || growth > 0.02 * std::abs(s.m_at_zmin_);
        return s;
    }

    // Two-column numeric text file (z, L(z)); '#' starts a comment.
    static ModulusSpec custom_from_file(const std::string& path, double osgood_threshold = 30.0) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open modulus table: " + path);
        std::vector<double> z, L;
        std::string line;
        while (std::getline(in, line)) {
            const auto h = line.find('#');
            if (h != std::string::npos) line.erase(h);
            std::istringstream ls(line);
            double a, b;
            if (ls >> a >> b) {
                z.push_back(a);
                L.push_back(b);
            }
        }
        return custom(z, L, osgood_threshold);
    }

    ModulusKind kind() const { return reported_kind_; }
    int chain_depth() const { return chain_n_; }
    double m_L() const { return m_L_; }
    bool is_osgood() const { return osgood_; }

    // L(z) on (0, m_L).
    double L(double z) const {
        if (!(z > 0.0) || !(z < m_L_))
            throw DomainError("eval_L: z = " + std::to_string(z) + " outside (0, m_L)");
        switch (kind_) {
            case ModulusKind::Lipschitz:
                return z;
            case ModulusKind::IteratedLogChain: {
                double v = z;
                double arg = 1.0 / z;
                for (int j = 1; j <= chain_n_; ++j) {
                    arg = std::log(arg);  // arg = log_j(1/z)
                    v *= arg;
                }
                return v;
            }
            case ModulusKind::Custom:
                if (z < z_min_)
                    throw DomainError("eval_L: z below tabulated range of custom modulus");
                return std::exp((*interp_)(std::log(z)));
            default:
                break;
        }
        throw DomainError("eval_L: unknown modulus kind");
    }

    // M(z) = int_z^{m_L} dr/L(r), closed form for the named moduli and
    // certified quadrature for Custom. Defined on (0, m_L].
    double M(double z) const {
        if (!(z > 0.0)) throw DomainError("eval_M: z must be positive");
        if (z > m_L_ * (1.0 + 1e-12)) throw DomainError("eval_M: z exceeds m_L");
        if (z >= m_L_) return 0.0;
        switch (kind_) {
            case ModulusKind::Lipschitz:
                return std::log(1.0 / z);
            case ModulusKind::IteratedLogChain:
                return iterated_log(chain_n_ + 1, 1.0 / z);
            case ModulusKind::Custom:
                return quadrature_M(z);
            default:
                break;
        }
        throw DomainError("eval_M: unknown modulus kind");
    }

    // dM/dz = -1/L(z).
    double M_prime(double z) const { return -1.0 / L(z); }

    // R(z) = exp(-M(z)), strictly increasing with R(m_L) = 1.
    double R(double z) const { return std::exp(-M(z)); }

    // Inverse of R on (0, 1]; closed form where available, monotone bisection
    // for Custom.
    double R_inv(double w) const {
        if (!(w > 0.0) || w > 1.0 + 1e-12) throw DomainError("eval_R_inv: w outside (0, 1]");
        if (w >= 1.0) return m_L_;
        switch (kind_) {
            case ModulusKind::Lipschitz:
                return w;  // R(z) = z
            case ModulusKind::IteratedLogChain:
                // R(z) = 1/log_n(1/z)  =>  z = 1/e_n(1/w).
                return 1.0 / iterated_exp(chain_n_, 1.0 / w);
            case ModulusKind::Custom: {
                double lo = z_min_, hi = m_L_;
                if (R(lo) > w) {
                    throw DomainError("eval_R_inv: w below R at the smallest tabulated node");
                }
                while (hi - lo > 1e-12) {
                    const double mid = 0.5 * (lo + hi);
                    (R(mid) < w ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            }
            default:
                break;
        }
        throw DomainError("eval_R_inv: unknown modulus kind");
    }

    // Measured constant in z log(1/z) <= c L(z) over a log grid; the paper
    // leaves it unspecified so it is reported, not assumed.
    double measured_loglip_lower_constant(int samples = 200) const {
        double c = 0.0;
        const double lo = std::log(std::max(z_min_, 1e-12));
        const double hi = std::log(m_L_ * (1.0 - 1e-9));
        for (int i = 0; i < samples; ++i) {
            const double z = std::exp(lo + (hi - lo) * (i + 0.5) / samples);
            if (z >= 1.0) continue;
            c = std::max(c, z * std::log(1.0 / z) / L(z));
        }
        return c;
    }

private:
    ModulusSpec(ModulusKind k, int n, double mL, ModulusKind reported = ModulusKind::Custom)
        : kind_(k), chain_n_(n), m_L_(mL) {
        reported_kind_ = (reported == ModulusKind::Custom && k != ModulusKind::Custom) ? k : reported;
        if (k == ModulusKind::Custom) reported_kind_ = ModulusKind::Custom;
        osgood_ = (k != ModulusKind::Custom);
        z_min_ = 0.0;
    }

    // Quadrature of int_z^{m_L} dr/L(r) with substitution s = log(1/r), which
    // turns the singular endpoint into a polynomially varying integrand.
    double quadrature_M(double z) const {
        const double s_lo = std::log(1.0 / m_L_);
        const double s_hi = std::log(1.0 / z);
        const double l_lo = std::log(z_min_), l_hi = std::log(m_L_);
        auto integrand = [this, l_lo, l_hi](double s) {
            const double lr = std::clamp(-s, l_lo, l_hi);
            return std::exp(lr) / std::exp((*interp_)(lr));
        };
        return adaptive_quadrature(integrand, s_lo, s_hi, 1e-9);
    }

    ModulusKind kind_;
    ModulusKind reported_kind_;
    int chain_n_ = 0;
    double m_L_;
    double z_min_ = 0.0;
    double m_at_zmin_ = 0.0;
    bool osgood_ = true;
    std::shared_ptr<const detail::Pchip> interp_;
};

// mu(t) = exp(int_0^t ||u(s)||_L ds), tracked through its exponent.
struct GrowthFactor {
    double lint = 0.0;  // accumulated modulus-norm integral
    double mu = 1.0;
};

inline GrowthFactor mu_factor(double lint) {
    if (lint < 0.0) throw DomainError("mu_factor: negative integral");
    return GrowthFactor{lint, std::exp(lint)};
}

}  // namespace osgood

#endif  // OSGOOD_MODULUS_HPP
