#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "osgood/transport.hpp"

using namespace osgood;

namespace {

SingularProfile loglog_profile(Vec2 center, double r_cut, FShape shape = FShape::identity()) {
    return SingularProfile(center, 1.0, ModulusSpec::log_lipschitz(), std::move(shape), r_cut);
}

}  // namespace

TEST_CASE("torus distance") {
    CHECK(torus_distance({0.1, 0.0}, {kTwoPi - 0.1, 0.0}, kTwoPi) == doctest::Approx(0.2));
    CHECK(torus_distance({1.0, 1.0}, {1.0, 1.0}, kTwoPi) == 0.0);
}

TEST_CASE("zero field transports nothing") {
    auto data = InitialData::from_profile(loglog_profile({0.3, 0.0}, 0.3));
    data.background = [](Vec2 p) { return 0.1 * p.x; };
    Grid2D g = Grid2D::box(64, {-1.0, -1.0}, 2.0);
    auto sol = solve_transport(VelocityField::zero(), data, 0.7, g);
    CHECK(sol.failed_nodes == 0);
    auto want = ScalarField2D::sample(g, [&data](Vec2 p) { return data.eval(p); });
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) CHECK(sol.theta.at(i, j) == want.at(i, j));
}

TEST_CASE("half-turn rotation carries the profile to the antipodal center") {
    auto data = InitialData::from_profile(loglog_profile({0.3, 0.0}, 0.3));
    Grid2D g = Grid2D::box(256, {-1.0, -1.0}, 2.0);
    auto sol = solve_transport(VelocityField::rigid_rotation(1.0), data, kPi, g, 1e-10);
    CHECK(sol.failed_nodes == 0);
    auto moved = loglog_profile({-0.3, 0.0}, 0.3);
    double worst = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            worst = std::max(worst, std::abs(sol.theta.at(i, j) - moved(g.node(i, j))));
    CHECK(worst < 1e-6);
}

TEST_CASE("hyperbolic flow matches the matrix-exponential oracle") {
    auto gauss = [](Vec2 p) {
        const Vec2 c{0.2, 0.1};
        return std::exp(-3.0 * (p - c).norm2());
    };
    auto data = InitialData::from_function(gauss);
    Grid2D g = Grid2D::box(128, {-1.0, -1.0}, 2.0);
    const double t = 0.7;
    auto sol = solve_transport(VelocityField::hyperbolic(), data, t, g, 1e-9);
    const double ch = std::cosh(t), sh = std::sinh(t);
    double worst = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            const Vec2 x = g.node(i, j);
            const Vec2 y{ch * x.x - sh * x.y, -sh * x.x + ch * x.y};
            worst = std::max(worst, std::abs(sol.theta.at(i, j) - gauss(y)));
        }
    CHECK(worst < 1e-6);
}

TEST_CASE("remainder at t=0 returns the background") {
    auto profile = loglog_profile({0.0, 0.0}, 0.3);
    Grid2D g = Grid2D::box(256, {-0.5, -0.5}, 1.0);
    auto theta = ScalarField2D::sample(g, [&profile](Vec2 p) { return profile(p) + 0.5; });
    auto [b, rec] = extract_remainder(theta, profile, {0.0, 0.0}, mu_factor(0.0), 0.2, 0.5, 0.0);
    CHECK(rec.r_valid == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(rec.sup_b == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rec.bound == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(rec.margin) < 1e-9);
    // remainder values live only on the valid annulus
    CHECK(std::isnan(b.at(0, 0)));
}

TEST_CASE("rotation remainder stays at the background sup") {
    auto profile = loglog_profile({0.3, 0.0}, 0.3);
    auto data = InitialData::from_profile(profile);
    data.background = [](Vec2) { return -0.35; };
    Grid2D g = Grid2D::box(512, {-1.0, -1.0}, 2.0);
    const double t = kPi / 4.0;
    auto u = VelocityField::rigid_rotation(1.0);
    auto sol = solve_transport(u, data, t, g, 1e-10);
    const Vec2 center_t = integrate_flow(u, {0.3, 0.0}, t, 1e-12).end();
    auto [b, rec] =
        extract_remainder(sol.theta, profile.with_center(center_t), center_t, mu_factor(t), 0.25,
                          0.35, t);
    CHECK(rec.sup_b == doctest::Approx(0.35).epsilon(1e-6));
    CHECK(rec.pass);
}

TEST_CASE("oscillating shape: sign changes counted in the valid ball") {
    auto profile = loglog_profile({0.0, 0.0}, 0.3, FShape::sin_shape(7.0));
    Grid2D g = Grid2D::box(512, {-0.5, -0.5}, 1.0);
    auto theta = ScalarField2D::sample(g, [&profile](Vec2 p) { return profile(p); });
    auto [b, rec] = extract_remainder(theta, profile, {0.0, 0.0}, mu_factor(0.0), 0.1, 0.0, 0.0);
    CHECK(rec.sign_changes >= 1);
}

TEST_CASE("full pipeline: hyperbolic transport of a loglog profile obeys the bound") {
    // ||u||_{LL} = 1 for the hyperbolic field on separations below 1/e,
    // so log mu = t and the theorem bound is ||b0|| + t.
    auto profile =
        SingularProfile({0.0, 0.0}, 1.0, ModulusSpec::log_lipschitz(), FShape::identity(), 0.35);
    auto data = InitialData::from_profile(profile);
    data.background = [](Vec2 p) { return 0.2 * std::cos(5.0 * p.x) * std::cos(3.0 * p.y); };
    Grid2D g = Grid2D::box(512, {-0.25, -0.25}, 0.5);
    const double t = 1.0;
    auto sol = solve_transport(VelocityField::hyperbolic(), data, t, g, 1e-8);
    CHECK(sol.failed_nodes == 0);
    auto [b, rec] = extract_remainder(sol.theta, profile, {0.0, 0.0}, mu_factor(t), 0.2, 0.2, t);
    CHECK(rec.r_valid < 0.2);
    CHECK(rec.sup_b <= 0.2 + t * 1.05);
}

TEST_CASE("seminorm check: smooth data has vanishing limits") {
    auto u = VelocityField::hyperbolic();
    auto data = InitialData::from_function(
        [](Vec2 p) { return std::exp(-5.0 * (p - Vec2{0.1, 0.0}).norm2()); });
    auto spec = ModulusSpec::log_lipschitz();
    auto pair = seminorm_transport_check(u, spec, data, {0.1, 0.0}, 0.5, 0.3,
                                         {0.12, 0.08, 0.05, 0.03}, 255);
    CHECK(pair.before.extrapolated_limit < 0.05);
    CHECK(pair.after_inner.extrapolated_limit < 0.05);
    CHECK(pair.bracket_pass);
}

TEST_CASE("seminorm check: cusp under an isometry keeps value 1") {
    auto u = VelocityField::rigid_rotation(1.0);
    auto spec = ModulusSpec::log_lipschitz();
    auto profile = SingularProfile({0.3, 0.0}, 1.0, spec, FShape::power(-1.0), 0.35)
                       .with_center_snap(3e-7);
    auto data = InitialData::from_profile(profile);
    auto pair = seminorm_transport_check(u, spec, data, {0.3, 0.0}, -1.0, 0.3,
                                         {0.12, 0.08, 0.05, 0.03}, 511, 1e-9);
    for (double v : pair.before.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(pair.before.extrapolated_limit == doctest::Approx(1.0).epsilon(0.05));
    CHECK(pair.after_inner.extrapolated_limit == doctest::Approx(1.0).epsilon(0.05));
    CHECK(pair.after_outer.extrapolated_limit == doctest::Approx(1.0).epsilon(0.05));
    CHECK(pair.bracket_pass);
}

TEST_CASE("transport conserves Lp norms and respects the max principle") {
    auto blob = [](Vec2 p) { return std::exp(-4.0 * (p - Vec2{0.3, 0.1}).norm2()); };
    auto data = InitialData::from_function(blob);
    Grid2D g = Grid2D::box(256, {-1.0, -1.0}, 2.0);
    auto theta0 = ScalarField2D::sample(g, [&blob](Vec2 p) { return blob(p); });
    auto sol = solve_transport(VelocityField::rigid_rotation(1.0), data, 0.9, g, 1e-9);
    for (double p : {1.0, 2.0, kInfExponent})
        CHECK(lp_norm(sol.theta, p) == doctest::Approx(lp_norm(theta0, p)).epsilon(0.01));
    CHECK(sol.theta.max_abs() <= 1.0);
    for (double v : sol.theta.data()) CHECK(v >= 0.0);
}

TEST_CASE("composition consistency for smooth data") {
    auto u = VelocityField::bahouri_chemin(9);
    auto blob = [](Vec2 p) {
        return std::exp(-2.0 * (p - Vec2{kPi / 2, kPi / 2}).norm2());
    };
    const double t = 0.4, tol = 1e-10;
    Grid2D g = Grid2D::torus(64);
    auto direct = solve_transport(u, InitialData::from_function(blob), 2.0 * t, g, tol);
    // restart from an analytically evaluated intermediate state
    auto mid = [&](Vec2 p) { return blob(inverse_flow(u, p, t, tol)); };
    auto restarted = solve_transport(u, InitialData::from_function(mid), t, g, tol);
    double worst = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            worst = std::max(worst, std::abs(direct.theta.at(i, j) - restarted.theta.at(i, j)));
    CHECK(worst < 10.0 * 1e-8);
}

TEST_CASE("sharpness: superlinear shape diverges at rate 2t, identity stays bounded") {
    std::vector<double> radii;
    for (int k = 4; k <= 10; ++k) radii.push_back(std::pow(2.0, -k));
    const double t = 1.0;
    auto sq = sharpness_experiment(SharpnessKind::LipschitzSuperlinear, FShape::square(), t, radii,
                                   16);
    CHECK(sq.slope == doctest::Approx(2.0 * t).epsilon(0.1));
    auto id = sharpness_experiment(SharpnessKind::LipschitzSuperlinear, FShape::identity(), t,
                                   radii, 16);
    for (double s : id.sup_b) CHECK(s <= t + 0.05);
}

TEST_CASE("sharpness: cell flow divergence exceeds t/4 per unit modulus") {
    std::vector<double> radii = {1e-3, 3e-4, 1e-4};
    const double t = 1.0;
    auto table = sharpness_experiment(SharpnessKind::LogLipschitzSuperlinear, FShape::square(), t,
                                      radii, 8, 31, 1e-9);
    CHECK(table.sup_b.back() / table.M_values.back() >= t / 4.0);
}
