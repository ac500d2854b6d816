#ifndef OSGOOD_SPECTRAL_HPP
#define OSGOOD_SPECTRAL_HPP

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "osgood/core.hpp"
#include "osgood/field.hpp"

namespace osgood {

namespace detail {

// Cached in-place c2c transforms for one grid size. Plans are built once with
// FFTW_ESTIMATE so repeated runs are deterministic.
class Fft2D {
public:
    explicit Fft2D(int n) : n_(n) {
        buf_ = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
        fwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft2D() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    // physical -> normalized modes (coefficients of e^{i k.x})
    void forward(std::vector<std::complex<double>>& v) {
        copy_in(v);
        fftw_execute(fwd_);
        const double s = 1.0 / (static_cast<double>(n_) * n_);
        copy_out(v, s);
    }
    // normalized modes -> physical
    void backward(std::vector<std::complex<double>>& v) {
        copy_in(v);
        fftw_execute(bwd_);
        copy_out(v, 1.0);
    }

    static Fft2D& instance(int n) {
        static std::map<int, std::unique_ptr<Fft2D>> cache;
        auto& slot = cache[n];
        if (!slot) slot = std::make_unique<Fft2D>(n);
        return *slot;
    }

private:
    void copy_in(const std::vector<std::complex<double>>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            buf_[i][0] = v[i].real();
            buf_[i][1] = v[i].imag();
        }
    }
    void copy_out(std::vector<std::complex<double>>& v, double s) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = {buf_[i][0] * s, buf_[i][1] * s};
    }

    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

}  // namespace detail

// Signed wavenumber for index i on an n-grid.
inline int wavenumber(int i, int n) { return i <= n / 2 ? i : i - n; }

// Vorticity modes on [0, 2pi)^2 with 2/3-rule dealiasing.
struct SpectralState {
    int n = 0;
    double t = 0.0;
    std::vector<std::complex<double>> w;  // normalized: omega(x) = sum w_k e^{i k.x}

    static SpectralState from_physical(const ScalarField2D& f, double t0 = 0.0) {
        if (f.grid().n < 4 || (f.grid().n & (f.grid().n - 1)) != 0)
            throw DomainError("SpectralState: grid size must be a power of two >= 4");
        if (!f.grid().periodic) throw DomainError("SpectralState: periodic grid required");
        SpectralState s;
        s.n = f.grid().n;
        s.t = t0;
        s.w.resize(static_cast<std::size_t>(s.n) * s.n);
        for (std::size_t i = 0; i < s.w.size(); ++i) s.w[i] = f.data()[i];
        detail::Fft2D::instance(s.n).forward(s.w);
        return s;
    }

    ScalarField2D to_physical() const {
        auto v = w;
        detail::Fft2D::instance(n).backward(v);
        ScalarField2D f(Grid2D::torus(n));
        for (std::size_t i = 0; i < v.size(); ++i) f.data()[i] = v[i].real();
        return f;
    }

    std::complex<double>& mode(int i, int j) { return w[static_cast<std::size_t>(j) * n + i]; }
    const std::complex<double>& mode(int i, int j) const {
        return w[static_cast<std::size_t>(j) * n + i];
    }

    double mean() const { return w[0].real(); }
    void remove_mean() { w[0] = 0.0; }

    bool in_band(int i, int j) const {
        return 3 * std::abs(wavenumber(i, n)) <= n && 3 * std::abs(wavenumber(j, n)) <= n;
    }

    void dealias() {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (!in_band(i, j)) mode(i, j) = 0.0;
    }

    // (2 pi)^2 Parseval sums of the normalized modes.
    double enstrophy() const {
        double s = 0.0;
        for (const auto& c : w) s += std::norm(c);
        return 0.5 * kTwoPi * kTwoPi * s;
    }
    double energy() const {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double kx = wavenumber(i, n), ky = wavenumber(j, n);
                const double k2 = kx * kx + ky * ky;
                if (k2 > 0.0) s += std::norm(mode(i, j)) / k2;
            }
        return 0.5 * kTwoPi * kTwoPi * s;
    }
};

// u = grad^perp Delta^{-1} omega: u_hat = -i k^perp / |k|^2 w_hat with
// k^perp = (-k_y, k_x). Requires mean-free vorticity.
inline VectorField2D biot_savart(const SpectralState& s) {
    double scale = 0.0;
    for (const auto& c : s.w) scale = std::max(scale, std::abs(c));
    if (std::abs(s.w[0]) > 1e-10 * std::max(scale, 1e-300))
        throw PreconditionError("biot_savart: vorticity must be mean-free on the torus");
    std::vector<std::complex<double>> ux(s.w.size()), uy(s.w.size());
    const std::complex<double> I{0.0, 1.0};
    for (int j = 0; j < s.n; ++j)
        for (int i = 0; i < s.n; ++i) {
            const double kx = wavenumber(i, s.n), ky = wavenumber(j, s.n);
            const double k2 = kx * kx + ky * ky;
            const std::size_t idx = static_cast<std::size_t>(j) * s.n + i;
            if (k2 == 0.0) {
                ux[idx] = uy[idx] = 0.0;
                continue;
            }
            ux[idx] = I * (ky / k2) * s.w[idx];
            uy[idx] = -I * (kx / k2) * s.w[idx];
        }
    auto& fft = detail::Fft2D::instance(s.n);
    fft.backward(ux);
    fft.backward(uy);
    VectorField2D u{ScalarField2D(Grid2D::torus(s.n)), ScalarField2D(Grid2D::torus(s.n))};
    for (std::size_t i = 0; i < ux.size(); ++i) {
        u.x().data()[i] = ux[i].real();
        u.y().data()[i] = uy[i].real();
    }
    return u;
}

class CflError : public PreconditionError {
public:
    CflError(const std::string& msg, double suggested) : PreconditionError(msg), suggested_dt(suggested) {}
    double suggested_dt;
};

namespace detail {

// Dealiased pseudo-spectral tendency -u.grad(omega) + f; also returns the
// stage velocity for co-integrated tracer centers.
inline std::vector<std::complex<double>> euler_tendency(
    const SpectralState& s, const std::function<double(Vec2, double)>& forcing,
    VectorField2D* u_out) {
    SpectralState masked = s;
    masked.dealias();
    masked.remove_mean();
    VectorField2D u = biot_savart(masked);

    auto& fft = Fft2D::instance(s.n);
    std::vector<std::complex<double>> wx(masked.w.size()), wy(masked.w.size());
    const std::complex<double> I{0.0, 1.0};
    for (int j = 0; j < s.n; ++j)
        for (int i = 0; i < s.n; ++i) {
            const double kx = wavenumber(i, s.n), ky = wavenumber(j, s.n);
            const std::size_t idx = static_cast<std::size_t>(j) * s.n + i;
            wx[idx] = I * kx * masked.w[idx];
            wy[idx] = I * ky * masked.w[idx];
        }
    fft.backward(wx);
    fft.backward(wy);
    std::vector<std::complex<double>> adv(masked.w.size());
    for (std::size_t i = 0; i < adv.size(); ++i)
        adv[i] = u.x().data()[i] * wx[i].real() + u.y().data()[i] * wy[i].real();
    fft.forward(adv);

    std::vector<std::complex<double>> rhs(adv.size());
    for (int j = 0; j < s.n; ++j)
        for (int i = 0; i < s.n; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * s.n + i;
            rhs[idx] = masked.in_band(i, j) ? -adv[idx] : 0.0;
        }
    if (forcing) {
        Grid2D g = Grid2D::torus(s.n);
        std::vector<std::complex<double>> fh(rhs.size());
        for (int j = 0; j < s.n; ++j)
            for (int i = 0; i < s.n; ++i)
                fh[static_cast<std::size_t>(j) * s.n + i] = forcing(g.node(i, j), s.t);
        fft.forward(fh);
        for (int j = 0; j < s.n; ++j)
            for (int i = 0; i < s.n; ++i) {
                const std::size_t idx = static_cast<std::size_t>(j) * s.n + i;
                if (s.in_band(i, j)) rhs[idx] += fh[idx];
            }
        rhs[0] = 0.0;  // forcing may not inject mean vorticity
    }
    if (u_out) *u_out = std::move(u);
    return rhs;
}

}  // namespace detail

// Classical RK4 step of d(omega)/dt = -u.grad(omega) + f. Tracer centers, when
// given, advance with the same stages, sampling the stage velocity minus a
// per-center constant drift correction.
inline void euler_rk4_step(SpectralState& s, double dt,
                           const std::function<double(Vec2, double)>& forcing = nullptr,
                           std::vector<Vec2>* centers = nullptr,
                           const std::vector<Vec2>& center_corrections = {}) {
    VectorField2D u1;
    auto k1 = detail::euler_tendency(s, forcing, &u1);
    const double dx = kTwoPi / s.n;
    const double umax = u1.max_norm();
    const double cfl = 0.5 * dx / std::max(umax, 1e-300);
    if (dt > cfl)
        throw CflError("euler_rk4_step: dt exceeds the CFL limit", 0.9 * cfl);

    auto advance = [&](const std::vector<std::complex<double>>& k, double a) {
        SpectralState s2 = s;
        s2.t = s.t + a * dt;
        for (std::size_t i = 0; i < s2.w.size(); ++i) s2.w[i] += (a * dt) * k[i];
        return s2;
    };
    VectorField2D u2, u3, u4;
    SpectralState s2 = advance(k1, 0.5);
    auto k2 = detail::euler_tendency(s2, forcing, &u2);
    SpectralState s3 = advance(k2, 0.5);
    auto k3 = detail::euler_tendency(s3, forcing, &u3);
    SpectralState s4 = advance(k3, 1.0);
    auto k4 = detail::euler_tendency(s4, forcing, &u4);

    if (centers) {
        if (center_corrections.size() != centers->size())
            throw DomainError("euler_rk4_step: one correction per center required");
        for (std::size_t c = 0; c < centers->size(); ++c) {
            const Vec2 p = (*centers)[c];
            const Vec2 corr = center_corrections[c];
            const Vec2 v1 = u1.interp(p) - corr;
            const Vec2 v2 = u2.interp(p + (0.5 * dt) * v1) - corr;
            const Vec2 v3 = u3.interp(p + (0.5 * dt) * v2) - corr;
            const Vec2 v4 = u4.interp(p + dt * v3) - corr;
            (*centers)[c] = p + (dt / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
        }
    }
    for (std::size_t i = 0; i < s.w.size(); ++i)
        s.w[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    s.t += dt;
    s.dealias();
    s.remove_mean();
}

}  // namespace osgood

#endif  // OSGOOD_SPECTRAL_HPP
