#ifndef OSGOOD_FIELD_HPP
#define OSGOOD_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "osgood/core.hpp"

namespace osgood {

// Uniform square grid. Periodic grids place nodes at origin + i*dx (FFT
// convention); box grids place them at cell centers, which makes midpoint
// quadrature exact bookkeeping.
struct Grid2D {
    int n = 0;
    Vec2 origin{0.0, 0.0};
    double extent = 0.0;  // side length
    bool periodic = false;

    double dx() const { return extent / n; }

    Vec2 node(int i, int j) const {
        const double off = periodic ? 0.0 : 0.5;
        return {origin.x + (i + off) * dx(), origin.y + (j + off) * dx()};
    }

    double cell_area() const { return dx() * dx(); }

    // Distance respecting periodicity when applicable.
    double distance(const Vec2& a, const Vec2& b) const {
        double dxv = a.x - b.x, dyv = a.y - b.y;
        if (periodic) {
            dxv -= extent * std::round(dxv / extent);
            dyv -= extent * std::round(dyv / extent);
        }
        return std::hypot(dxv, dyv);
    }

    Vec2 displacement(const Vec2& a, const Vec2& b) const {
        double dxv = a.x - b.x, dyv = a.y - b.y;
        if (periodic) {
            dxv -= extent * std::round(dxv / extent);
            dyv -= extent * std::round(dyv / extent);
        }
        return {dxv, dyv};
    }

    static Grid2D torus(int n) { return Grid2D{n, {0.0, 0.0}, kTwoPi, true}; }
    static Grid2D box(int n, Vec2 origin, double extent) { return Grid2D{n, origin, extent, false}; }
};

namespace detail {

// Catmull-Rom weights for bicubic interpolation.
inline void cubic_weights(double t, double w[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2 * t2 - t);
    w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
    w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
}

}  // namespace detail

class ScalarField2D {
public:
    ScalarField2D() = default;
    explicit ScalarField2D(const Grid2D& g) : grid_(g), v_(static_cast<std::size_t>(g.n) * g.n, 0.0) {}

    static ScalarField2D sample(const Grid2D& g, const std::function<double(Vec2)>& f) {
        ScalarField2D out(g);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) out.at(i, j) = f(g.node(i, j));
        return out;
    }

    const Grid2D& grid() const { return grid_; }
    int n() const { return grid_.n; }

    double& at(int i, int j) { return v_[idx(i, j)]; }
    double at(int i, int j) const { return v_[idx(i, j)]; }

    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

    double mean() const {
        double s = 0.0;
        for (double x : v_) s += x;
        return s / static_cast<double>(v_.size());
    }

    // Bicubic (Catmull-Rom) interpolation; clamped at box edges, wrapped on the
    // torus.
    double interp(Vec2 p) const {
        const double dx = grid_.dx();
        const double off = grid_.periodic ? 0.0 : 0.5;
        double gx = (p.x - grid_.origin.x) / dx - off;
        double gy = (p.y - grid_.origin.y) / dx - off;
        const int n = grid_.n;
        int i0 = static_cast<int>(std::floor(gx));
        int j0 = static_cast<int>(std::floor(gy));
        const double tx = gx - i0, ty = gy - j0;
        double wx[4], wy[4];
        detail::cubic_weights(tx, wx);
        detail::cubic_weights(ty, wy);
        double acc = 0.0;
        for (int b = -1; b <= 2; ++b) {
            int jj = j0 + b;
            if (grid_.periodic) {
                jj = ((jj % n) + n) % n;
            } else {
                jj = std::clamp(jj, 0, n - 1);
            }
            double row = 0.0;
            for (int a = -1; a <= 2; ++a) {
                int ii = i0 + a;
                if (grid_.periodic) {
                    ii = ((ii % n) + n) % n;
                } else {
                    ii = std::clamp(ii, 0, n - 1);
                }
                row += wx[a + 1] * v_[idx(ii, jj)];
            }
            acc += wy[b + 1] * row;
        }
        return acc;
    }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * grid_.n + i; }

    Grid2D grid_;
    std::vector<double> v_;
};

class VectorField2D {
public:
    VectorField2D() = default;
    explicit VectorField2D(const Grid2D& g) : ux_(g), uy_(g) {}
    VectorField2D(ScalarField2D ux, ScalarField2D uy) : ux_(std::move(ux)), uy_(std::move(uy)) {}

    const Grid2D& grid() const { return ux_.grid(); }
    ScalarField2D& x() { return ux_; }
    ScalarField2D& y() { return uy_; }
    const ScalarField2D& x() const { return ux_; }
    const ScalarField2D& y() const { return uy_; }

    Vec2 interp(Vec2 p) const { return {ux_.interp(p), uy_.interp(p)}; }

    double max_norm() const {
        double m = 0.0;
        const int n = grid().n;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                m = std::max(m, std::hypot(ux_.at(i, j), uy_.at(i, j)));
        return m;
    }

private:
    ScalarField2D ux_, uy_;
};

}  // namespace osgood

#endif  // OSGOOD_FIELD_HPP
