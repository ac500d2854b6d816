#ifndef OSGOOD_ODE_HPP
#define OSGOOD_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "osgood/core.hpp"

namespace osgood {

// Accepted-step record; dense output by cubic Hermite between steps.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec2> positions;
    std::vector<Vec2> derivatives;
    int steps = 0;
    int rejected = 0;
    double tol = 0.0;

    Vec2 start() const { return positions.front(); }
    Vec2 end() const { return positions.back(); }
    double t0() const { return times.front(); }
    double t1() const { return times.back(); }

    Vec2 eval(double t) const {
        const bool fwd = times.back() >= times.front();
        if ((fwd && t <= times.front()) || (!fwd && t >= times.front())) return positions.front();
        if ((fwd && t >= times.back()) || (!fwd && t <= times.back())) return positions.back();
        std::size_t lo = 0, hi = times.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if ((times[mid] <= t) == fwd)
                lo = mid;
            else
                hi = mid;
        }
        const double h = times[hi] - times[lo];
        const double s = (t - times[lo]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * positions[lo] + (h * h10) * derivatives[lo] + h01 * positions[hi] +
               (h * h11) * derivatives[hi];
    }
};

class IntegrationError : public NumericError {
public:
    IntegrationError(const std::string& msg, double t, Vec2 y)
        : NumericError(msg), last_time(t), last_position(y) {}
    double last_time;
    Vec2 last_position;
};

// Dormand-Prince 5(4) embedded pair with adaptive step control.
// rhs: (Vec2, double t) -> Vec2. Integrates from t0 to t1 in either direction.
template <class RHS>
Trajectory integrate_ode(const RHS& rhs, Vec2 y0, double t0, double t1, double tol,
                         double max_dt = 1e30) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Trajectory traj;
    traj.tol = tol;
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    double t = t0;
    Vec2 y = y0;
    Vec2 k1 = rhs(y, t);
    traj.times.push_back(t);
    traj.positions.push_back(y);
    traj.derivatives.push_back(k1);
    if (span == 0.0) return traj;

    double h = dir * std::min({span, max_dt, 1e-2 * (span + 1.0)});
    const double h_min = std::max(span * 1e-14, 1e-300);

    while (dir * (t1 - t) > 0.0) {
        if (std::abs(h) > max_dt) h = dir * max_dt;
        if (dir * (t + h - t1) > 0.0) h = t1 - t;

        const Vec2 k2 = rhs(y + h * (a21 * k1), t + c2 * h);
        const Vec2 k3 = rhs(y + h * (a31 * k1 + a32 * k2), t + c3 * h);
        const Vec2 k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3), t + c4 * h);
        const Vec2 k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + c5 * h);
        const Vec2 k6 = rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + h);
        const Vec2 y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec2 k7 = rhs(y_new, t + h);
        const Vec2 err_v =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double sc = tol + tol * std::max(y.norm(), y_new.norm());
        const double err = err_v.norm() / sc;

        if (err <= 1.0) {
            t += h;
            y = y_new;
            k1 = k7;  // FSAL
            traj.times.push_back(t);
            traj.positions.push_back(y);
            traj.derivatives.push_back(k1);
            ++traj.steps;
            const double grow = (err == 0.0) ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
            h *= grow;
        } else {
            ++traj.rejected;
            h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
            if (std::abs(h) < h_min)
                throw IntegrationError("integrate_ode: step size underflow at t=" +
                                           std::to_string(t),
                                       t, y);
        }
    }
    return traj;
}

}  // namespace osgood

#endif  // OSGOOD_ODE_HPP
