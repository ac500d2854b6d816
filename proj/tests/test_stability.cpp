#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "osgood/stability.hpp"

using namespace osgood;

namespace {

SpectralState random_band_limited(int n, int k_max, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    SpectralState s;
    s.n = n;
    s.w.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int kx = -k_max; kx <= k_max; ++kx)
        for (int ky = -k_max; ky <= k_max; ++ky) {
            if (kx == 0 && ky == 0) continue;
            const int i = (kx + n) % n, j = (ky + n) % n;
            s.mode(i, j) = {ud(rng), ud(rng)};
        }
    // make the physical field real: w_{-k} = conj(w_k)
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int i2 = (n - i) % n, j2 = (n - j) % n;
            s.mode(i2, j2) = std::conj(s.mode(i, j));
        }
    return s;
}

RegularizedFamily sample_family(int n, std::vector<double> eps) {
    SingularProfile profile({kPi, kPi}, 1.0, ModulusSpec::log_lipschitz(), FShape::identity(),
                            0.35);
    auto bg = [](Vec2 p) { return 0.3 * std::cos(p.x) * std::sin(p.y); };
    return RegularizedFamily::from_profile(profile, bg, std::move(eps), n);
}

}  // namespace

TEST_CASE("interpolation: single mode saturates the inequality") {
    Grid2D g = Grid2D::torus(64);
    auto s = SpectralState::from_physical(
        ScalarField2D::sample(g, [](Vec2 p) { return std::cos(3.0 * p.x + 2.0 * p.y); }));
    for (auto& row : sobolev_interpolation_check(s, 0.5, 3)) {
        CHECK(row.lhs == doctest::Approx(row.rhs).epsilon(1e-12));
        CHECK(row.slack >= -1e-12 * row.rhs);
    }
}

TEST_CASE("interpolation: random band-limited fields never violate it") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = random_band_limited(32, 5, rng);
        for (double exponent : {0.25, 0.5, 1.0})
            for (auto& row : sobolev_interpolation_check(s, exponent, 4))
                CHECK(row.slack >= -1e-10 * row.rhs);
    }
}

TEST_CASE("interpolation: zero field gives 0 <= 0") {
    SpectralState s;
    s.n = 16;
    s.w.assign(256, 0.0);
    for (auto& row : sobolev_interpolation_check(s, 0.5, 2)) {
        CHECK(row.lhs == 0.0);
        CHECK(row.rhs == 0.0);
    }
}

TEST_CASE("interpolation: precondition errors") {
    Grid2D g = Grid2D::torus(32);
    auto out_of_band = SpectralState::from_physical(
        ScalarField2D::sample(g, [](Vec2 p) { return std::cos(12.0 * p.x); }));
    CHECK_THROWS_AS(sobolev_interpolation_check(out_of_band, 0.5, 2), DomainError);
    auto with_mean = SpectralState::from_physical(
        ScalarField2D::sample(g, [](Vec2 p) { return 1.0 + std::cos(p.x); }));
    CHECK_THROWS_AS(sobolev_interpolation_check(with_mean, 0.5, 2), DomainError);
    auto fine = SpectralState::from_physical(
        ScalarField2D::sample(g, [](Vec2 p) { return std::cos(p.x); }));
    CHECK_THROWS_AS(sobolev_interpolation_check(fine, 1.0, 8), DomainError);
}

TEST_CASE("regularized family: ladder builds and measures its bounds") {
    auto fam = sample_family(128, {0.3, 0.15, 0.08, 0.04});
    CHECK(fam.data.size() == 4);
    CHECK(fam.exterior_c1 > 0.0);
    CHECK(fam.exterior_c1 < 10.0);
    CHECK(fam.delta == doctest::Approx(0.6));
    SingularProfile profile({kPi, kPi}, 1.0, ModulusSpec::log_lipschitz(), FShape::identity(),
                            0.35);
    CHECK_THROWS_AS(RegularizedFamily::from_profile(profile, nullptr, {0.1, 0.2}, 64),
                    DomainError);
}

TEST_CASE("light cone: identical members give exact zero") {
    auto fam = sample_family(128, {0.2, 0.1});
    auto res = light_cone_experiment(fam, 1, 1, 0.2, 2.0, 3);
    for (const auto& row : res.rows) {
        CHECK(row.exterior_sup == 0.0);
        CHECK(row.interior_norm == 0.0);
    }
}

TEST_CASE("light cone: core-only difference stays inside the cone") {
    // members differ only inside B_delta (mollification is local), so the
    // exterior error starts at zero and stays far below the interior error
    auto fam = sample_family(256, {0.3, 0.15});
    auto res = light_cone_experiment(fam, 0, 1, 0.25, 2.0, 3);
    CHECK(res.rows.front().exterior_sup < 1e-14);
    CHECK(res.rows.front().interior_norm > 0.01);
    for (const auto& row : res.rows)
        CHECK(row.exterior_sup < 1e-3 * std::max(row.interior_norm, 1e-30));
    // the measured error front never outruns twice the measured speed plus
    // a few cells per unit time
    const double cells = 3.0 * kTwoPi / 256;
    CHECK(res.front_speed <= 2.0 * res.c_star + cells);
}

TEST_CASE("gronwall: identical runs pass trivially") {
    auto res = gronwall_log_bound_check({0.0, 0.5, 1.0}, {0.0, 0.0, 0.0});
    CHECK(res.trivial);
    CHECK(res.all_pass);
}

TEST_CASE("gronwall: fitted bound holds on the held-out range") {
    // synthetic series following the double-exponential envelope with margin
    const double d0 = 0.01, k_true = 0.8;
    std::vector<double> times, diff;
    for (int i = 0; i <= 40; ++i) {
        const double t = 0.05 * i;
        times.push_back(t);
        // extra decay 0.8^t keeps the tightest constraint in the fit range
        diff.push_back(std::pow(d0, std::exp(-k_true * t)) * std::pow(0.8, t));
    }
    auto res = gronwall_log_bound_check(times, diff);
    CHECK(res.all_pass);
    CHECK(res.k_star > 0.0);
    CHECK(res.k_star < 10.0);
}

TEST_CASE("gronwall: envelope violations are reported") {
    auto res = gronwall_log_bound_check({0.0, 0.5, 1.0}, {0.01, 0.005, 1.5});
    CHECK(!res.all_pass);
    CHECK(!res.rows.back().pass);
    CHECK_THROWS_AS(gronwall_log_bound_check({0.0, 1.0}, {1.5, 0.1}), PreconditionError);
}
