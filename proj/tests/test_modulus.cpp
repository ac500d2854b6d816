#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "osgood/modulus.hpp"

using namespace osgood;

namespace {

// Log-spaced tabulation of a closed-form modulus, used as the Custom oracle.
ModulusSpec tabulate(double z_min, double z_max, int nodes, double (*Lfn)(double)) {
    std::vector<double> z(nodes), L(nodes);
    for (int i = 0; i < nodes; ++i) {
        z[i] = std::exp(std::log(z_min) + (std::log(z_max) - std::log(z_min)) * i / (nodes - 1));
        L[i] = Lfn(z[i]);
    }
    return ModulusSpec::custom(z, L);
}

double loglip_L(double z) { return z * std::log(1.0 / z); }
double holder_half_L(double z) { return std::sqrt(z); }

}  // namespace

TEST_CASE("eval_L closed forms") {
    auto lip = ModulusSpec::lipschitz();
    CHECK(lip.L(0.5) == doctest::Approx(0.5).epsilon(1e-15));

    auto ll = ModulusSpec::log_lipschitz();
    const double z = std::exp(-2.0);
    CHECK(ll.L(z) == doctest::Approx(z * 2.0).epsilon(1e-14));

    auto chain2 = ModulusSpec::iterated_log_chain(2);
    const double z2 = 1e-3;
    CHECK(chain2.L(z2) ==
          doctest::Approx(z2 * std::log(1e3) * std::log(std::log(1e3))).epsilon(1e-13));
}

TEST_CASE("eval_L custom interpolation matches closed form") {
    auto spec = tabulate(1e-8, 1.0 / std::exp(1.0), 2000, loglip_L);
    CHECK(spec.L(0.01) == doctest::Approx(0.01 * std::log(100.0)).epsilon(1e-6));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(std::log(1e-7), std::log(0.3));
    for (int i = 0; i < 1000; ++i) {
        const double z = std::exp(u(rng));
        CHECK(spec.L(z) == doctest::Approx(loglip_L(z)).epsilon(1e-6));
    }
}

TEST_CASE("eval_M closed forms") {
    auto ll = ModulusSpec::log_lipschitz();
    CHECK(ll.M(std::exp(-std::exp(1.0))) == doctest::Approx(1.0).epsilon(1e-12));

    auto lip = ModulusSpec::lipschitz();
    CHECK(lip.M(0.1) == doctest::Approx(std::log(10.0)).epsilon(1e-13));
    CHECK(lip.M(1.0) == 0.0);

    auto chain2 = ModulusSpec::iterated_log_chain(2);
    CHECK(chain2.M(1.0 / exp_tower(2)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(chain2.M(1e-4) == doctest::Approx(iterated_log(3, 1e4)).epsilon(1e-12));
}

TEST_CASE("eval_M quadrature vs closed form for custom modulus") {
    auto spec = tabulate(1e-8, 1.0 / std::exp(1.0), 2000, loglip_L);
    CHECK(spec.M(1e-4) == doctest::Approx(std::log(std::log(1e4))).epsilon(1e-6));
}

TEST_CASE("eval_R endpoints and round trip") {
    auto lip = ModulusSpec::lipschitz();
    CHECK(lip.R(lip.m_L()) == doctest::Approx(1.0));
    CHECK(lip.R(0.25) == doctest::Approx(0.25).epsilon(1e-14));

    auto ll = ModulusSpec::log_lipschitz();
    CHECK(ll.R(ll.m_L()) == doctest::Approx(1.0));

    std::mt19937_64 rng(11);
    for (auto* spec : {&lip, &ll}) {
        std::uniform_real_distribution<double> u(std::log(1e-6), std::log(spec->m_L() * 0.999));
        for (int i = 0; i < 1000; ++i) {
            const double z = std::exp(u(rng));
            CHECK(spec->R_inv(spec->R(z)) == doctest::Approx(z).epsilon(1e-9));
        }
    }
}

TEST_CASE("R_inv bisection for custom modulus") {
    auto spec = tabulate(1e-8, 1.0 / std::exp(1.0), 1200, loglip_L);
    for (double z : {1e-5, 1e-3, 0.05, 0.2}) {
        CHECK(spec.R_inv(spec.R(z)) == doctest::Approx(z).epsilon(1e-7));
    }
}

TEST_CASE("monotonicity and R = exp(-M) consistency") {
    auto ll = ModulusSpec::log_lipschitz();
    double prev_M = 1e300, prev_R = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double z = std::exp(std::log(1e-8) +
                                  (std::log(ll.m_L() * 0.999) - std::log(1e-8)) * i / 100.0);
        const double M = ll.M(z), R = ll.R(z);
        CHECK(M < prev_M);
        CHECK(R > prev_R);
        CHECK(R == doctest::Approx(std::exp(-M)).epsilon(1e-12));
        prev_M = M;
        prev_R = R;
    }
}

TEST_CASE("custom tabulation reproduces named closed forms on a log grid") {
    auto lip_tab = tabulate(1e-8, 1.0, 2000, [](double z) { return z; });
    auto ll_tab = tabulate(1e-8, 1.0 / std::exp(1.0), 2000, loglip_L);
    auto lip = ModulusSpec::lipschitz();
    auto ll = ModulusSpec::log_lipschitz();
    for (int i = 0; i < 100; ++i) {
        const double z = std::exp(std::log(1e-7) + (std::log(0.3) - std::log(1e-7)) * i / 99.0);
        CHECK(lip_tab.L(z) == doctest::Approx(lip.L(z)).epsilon(1e-6));
        CHECK(ll_tab.L(z) == doctest::Approx(ll.L(z)).epsilon(1e-6));
    }
}

TEST_CASE("Osgood detection") {
    CHECK(ModulusSpec::lipschitz().is_osgood());
    CHECK(ModulusSpec::log_lipschitz().is_osgood());
    CHECK(ModulusSpec::iterated_log_chain(3).is_osgood());
    // Holder 1/2: integral of 1/sqrt(r) converges, M bounded.
    auto holder = tabulate(1e-8, 0.99, 800, holder_half_L);
    CHECK_FALSE(holder.is_osgood());
    // A tabulated log-Lipschitz modulus is still recognized as Osgood.
    auto ll_tab = tabulate(1e-8, 1.0 / std::exp(1.0), 800, loglip_L);
    CHECK(ll_tab.is_osgood());
}

TEST_CASE("mu_factor") {
    CHECK(mu_factor(0.0).mu == doctest::Approx(1.0));
    CHECK(mu_factor(1.0).mu == doctest::Approx(std::exp(1.0)));
    // constant ||u||_Lip = 1 over t = 2
    CHECK(mu_factor(2.0).mu == doctest::Approx(std::exp(2.0)));
    CHECK_THROWS_AS(mu_factor(-0.1), DomainError);
}

TEST_CASE("iterated log and exp") {
    CHECK(iterated_log(2, std::exp(std::exp(1.0))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(iterated_log(0, 7.0) == 7.0);
    CHECK(iterated_exp(2, iterated_log(2, 100.0)) == doctest::Approx(100.0).epsilon(1e-9));
    CHECK_THROWS_AS(iterated_log(3, 2.0), DomainError);
}

TEST_CASE("domain errors") {
    auto lip = ModulusSpec::lipschitz();
    CHECK_THROWS_AS(lip.L(0.0), DomainError);
    CHECK_THROWS_AS(lip.L(1.5), DomainError);
    CHECK_THROWS_AS(lip.M(-1.0), DomainError);
    CHECK_THROWS_AS(lip.R_inv(0.0), DomainError);
    CHECK_THROWS_AS(lip.R_inv(1.5), DomainError);
}

TEST_CASE("measured constant in z log(1/z) <= c L(z)") {
    // For L = z log(1/z) the constant is exactly 1; recorded, not assumed.
    auto ll = ModulusSpec::log_lipschitz();
    CHECK(ll.measured_loglip_lower_constant() == doctest::Approx(1.0).epsilon(1e-10));
    auto chain2 = ModulusSpec::iterated_log_chain(2);
    CHECK(chain2.measured_loglip_lower_constant() <= 1.0 + 1e-12);
}
