#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "osgood/flow.hpp"

using namespace osgood;

namespace {

Vec2 hyperbolic_exact(Vec2 x0, double t) {
    return {x0.x * std::cosh(t) + x0.y * std::sinh(t),
            x0.x * std::sinh(t) + x0.y * std::cosh(t)};
}

SingularProfile loglog_profile(Vec2 center, double gamma, double r_cut) {
    return SingularProfile(center, gamma, ModulusSpec::log_lipschitz(), FShape::identity(), r_cut);
}

}  // namespace

TEST_CASE("hyperbolic flow: stable line contracts at rate e^{-t}") {
    auto u = VelocityField::hyperbolic();
    const Vec2 end = integrate_flow(u, {1.0, -1.0}, 1.0).end();
    CHECK(end.x == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
    CHECK(end.y == doctest::Approx(-std::exp(-1.0)).epsilon(1e-8));

    // general point matches the cosh/sinh solution
    const Vec2 x0{0.3, 0.7};
    const Vec2 got = integrate_flow(u, x0, 1.5).end();
    const Vec2 want = hyperbolic_exact(x0, 1.5);
    CHECK((got - want).norm() < 1e-8);
}

TEST_CASE("rigid rotation: quarter turn") {
    auto u = VelocityField::rigid_rotation(1.0);
    auto traj = integrate_flow(u, {1.0, 0.0}, kPi / 2.0);
    const Vec2 end = traj.end();
    CHECK(end.x == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(std::abs(end.x) < 1e-8);
    CHECK(end.y == doctest::Approx(1.0).epsilon(1e-8));
    // dense output stays on the unit circle
    for (double t : {0.2, 0.5, 1.0, 1.3}) CHECK(traj.eval(t).norm() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("radial vortex: circles preserve radius; far field is a point vortex") {
    auto profile = loglog_profile({0.0, 0.0}, 1.0, 0.3);
    auto u = VelocityField::radial_vortex(profile);
    const Vec2 x0{0.05, 0.02};
    const double r0 = x0.norm();
    auto traj = integrate_flow(u, x0, 2.0);
    CHECK(traj.end().norm() == doctest::Approx(r0).epsilon(1e-7));

    RadialVelocityTable table(profile);
    // tangential direction
    const Vec2 rel{0.07, -0.01};
    CHECK(std::abs(table.velocity(rel).dot(rel)) < 1e-14);
    // outside the support the speed is circulation / (2 pi r)
    for (double r : {0.35, 0.6, 1.0}) {
        const Vec2 v = table.velocity({r, 0.0});
        CHECK(v.norm() * kTwoPi * r == doctest::Approx(table.circulation()).epsilon(1e-9));
    }
}

TEST_CASE("inverse flow round trips") {
    auto hyp = VelocityField::hyperbolic();
    auto bc = VelocityField::bahouri_chemin(15);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u01(0.2, 1.2);
    for (int i = 0; i < 5; ++i) {
        const Vec2 x0{u01(rng), u01(rng)};
        for (const auto* u : {&hyp, &bc}) {
            const Vec2 xt = integrate_flow(*u, x0, 0.8).end();
            const Vec2 back = inverse_flow(*u, xt, 0.8);
            CHECK((back - x0).norm() < 1e-6);
        }
    }
}

TEST_CASE("cell flow series: stagnation point and invariant axis") {
    CHECK(bahouri_chemin_velocity(21, {0.0, 0.0}).norm() == 0.0);
    // u_y vanishes identically on y = 0, so the axis is invariant
    for (double x : {0.1, 0.7, 2.0}) CHECK(bahouri_chemin_velocity(21, {x, 0.0}).y == 0.0);
    auto u = VelocityField::bahouri_chemin(21);
    auto traj = integrate_flow(u, {0.5, 0.0}, 2.0);
    for (double t : {0.5, 1.0, 1.5, 2.0}) CHECK(std::abs(traj.eval(t).y) < 1e-9);
}

TEST_CASE("cell flow series: divergence free") {
    const double h = 1e-5;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u01(0.1, 3.0);
    for (int i = 0; i < 10; ++i) {
        const Vec2 p{u01(rng), u01(rng)};
        const double div =
            (bahouri_chemin_velocity(15, {p.x + h, p.y}).x -
             bahouri_chemin_velocity(15, {p.x - h, p.y}).x +
             bahouri_chemin_velocity(15, {p.x, p.y + h}).y -
             bahouri_chemin_velocity(15, {p.x, p.y - h}).y) /
            (2.0 * h);
        CHECK(std::abs(div) < 1e-6);
    }
}

TEST_CASE("group property for an autonomous field") {
    auto u = VelocityField::bahouri_chemin(15);
    const Vec2 x0{0.9, 1.4};
    const Vec2 one_shot = integrate_flow(u, x0, 0.7).end();
    const Vec2 mid = integrate_flow(u, x0, 0.3).end();
    const Vec2 two_shot = integrate_flow(u, mid, 0.4).end();
    CHECK((one_shot - two_shot).norm() < 1e-7);
}

TEST_CASE("linear flow preserves area of a transported square") {
    auto u = VelocityField::hyperbolic();
    const Vec2 c{0.3, 0.2};
    const double s = 0.1, t = 1.0;
    Vec2 q[4] = {{c.x, c.y}, {c.x + s, c.y}, {c.x + s, c.y + s}, {c.x, c.y + s}};
    Vec2 m[4];
    for (int i = 0; i < 4; ++i) m[i] = integrate_flow(u, q[i], t).end();
    double area = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Vec2 &a = m[i], &b = m[(i + 1) % 4];
        area += 0.5 * (a.x * b.y - b.x * a.y);
    }
    CHECK(area == doctest::Approx(s * s).epsilon(1e-8));
}

TEST_CASE("sampled field reproduces the analytic flow") {
    Grid2D g = Grid2D::box(128, {-2.0, -2.0}, 4.0);
    VectorField2D snap(ScalarField2D::sample(g, [](Vec2 p) { return p.y; }),
                       ScalarField2D::sample(g, [](Vec2 p) { return p.x; }));
    auto u = VelocityField::sampled({{0.0, snap}, {1.0, snap}});
    const Vec2 x0{0.5, -0.3};
    const Vec2 got = integrate_flow(u, x0, 1.0).end();
    CHECK((got - hyperbolic_exact(x0, 1.0)).norm() < 1e-6);
}

TEST_CASE("measured Lipschitz constant of the hyperbolic field is exactly 1") {
    auto u = VelocityField::hyperbolic();
    const double c = u.estimate_modulus_constant(ModulusSpec::lipschitz(), {-1.0, -1.0}, {1.0, 1.0},
                                                 0.0);
    CHECK(c == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("separation certificate: stable-line pair sits on the lower bracket") {
    auto u = VelocityField::hyperbolic();
    auto spec = ModulusSpec::lipschitz();
    const Vec2 x{0.05, -0.05}, y{-0.02, 0.02};
    auto cert = pair_separation_certificate(u, spec, x, y, 1.0);
    CHECK(cert.pass);
    // R = identity for the Lipschitz modulus, so the ratio is sep_t/sep_0 = e^{-t}
    CHECK(cert.ratio == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    CHECK(cert.lower == doctest::Approx(std::exp(-1.0)));
    CHECK(cert.slack >= 0.0);
}

TEST_CASE("separation certificate: rotation keeps the ratio at 1") {
    auto u = VelocityField::rigid_rotation(0.7);
    auto spec = ModulusSpec::lipschitz();
    auto cert = pair_separation_certificate(u, spec, {0.3, 0.0}, {0.3, 0.1}, 2.0);
    CHECK(cert.pass);
    CHECK(cert.ratio == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("separation certificate: cell flow with a measured constant") {
    auto u = VelocityField::bahouri_chemin(15);
    auto spec = ModulusSpec::log_lipschitz();
    const double c =
        u.estimate_modulus_constant(spec, {0.05, 0.05}, {3.0, 3.0}, 0.0, 4000, 99u);
    CHECK(c > 0.0);
    const Vec2 x{1e-4, 0.0}, y{2e-4, 0.0};
    auto cert = pair_separation_certificate(u, spec, x, y, 0.25, 1e-10, c * 1.2);
    CHECK(cert.pass);
    CHECK(cert.bc_truncation == 15);
}

TEST_CASE("separation certificate preconditions") {
    auto u = VelocityField::hyperbolic();
    auto spec = ModulusSpec::lipschitz();
    // smallness violated: mu R(sep0) >= 1
    CHECK_THROWS_AS(pair_separation_certificate(u, spec, {0.5, 0.0}, {0.0, 0.0}, 1.0),
                    PreconditionError);
    // coincident points
    CHECK_THROWS_AS(pair_separation_certificate(u, spec, {0.1, 0.1}, {0.1, 0.1}, 1.0),
                    PreconditionError);
    // no bound attached and no override
    auto bc = VelocityField::bahouri_chemin(5);
    CHECK_THROWS_AS(pair_separation_certificate(bc, ModulusSpec::log_lipschitz(), {1e-4, 0.0},
                                                {2e-4, 0.0}, 0.1),
                    PreconditionError);
}

TEST_CASE("integration reports blow-up instead of looping") {
    auto u = VelocityField::analytic("riccati", [](Vec2 p, double) { return Vec2{p.x * p.x, 0.0}; });
    CHECK_THROWS_AS(integrate_flow(u, {2.0, 0.0}, 1.0), IntegrationError);
}
