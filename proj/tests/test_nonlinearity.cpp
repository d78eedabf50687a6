#include <doctest.h>

#include "blowup/nonlinearity.hpp"

#include <cmath>

using namespace blowup;

namespace {

// closed-form transforms of the power family
double varphi_power(double p, double t) {
    return 2.0 * std::sqrt(p + 1.0) / (p - 1.0) * std::pow(t, -0.5 * (p - 1.0));
}
double psi_power(double p, double t) {
    return std::pow(2.0 * std::sqrt(p + 1.0) / ((p - 1.0) * t), 2.0 / (p - 1.0));
}

}  // namespace

TEST_SUITE_BEGIN("nonlinearity");

TEST_CASE("power family basics") {
    auto nl = Nonlinearity::power(3.0);
    CHECK(nl.f(2.0) == doctest::Approx(8.0));
    CHECK(nl.f_prime(2.0) == doctest::Approx(12.0));
    CHECK(nl.exponent_m() == doctest::Approx(2.0));
    CHECK(nl.exponent_M() == doctest::Approx(2.0));

    auto nl25 = Nonlinearity::power(2.5);
    for (double t : {0.1, 1.0, 7.7})
        CHECK(t * nl25.f_prime(t) / nl25.f(t) == doctest::Approx(2.5).epsilon(1e-13));

    CHECK_THROWS_AS(Nonlinearity::power(1.0), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::power(0.5), std::invalid_argument);
    CHECK_THROWS_AS(nl.f(-1.0), std::domain_error);
    CHECK_THROWS_AS(nl.f_prime(-0.5), std::domain_error);
}

TEST_CASE("expression parser and custom family") {
    auto nl = Nonlinearity::custom("t^2 * log(1 + t)");
    CHECK(nl.f(1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK(nl.f(3.0) == doctest::Approx(9.0 * std::log(4.0)).epsilon(1e-13));
    CHECK(nl.f(0.0) == 0.0);

    CHECK_THROWS_AS(Nonlinearity::custom("t^2 * blah(t)"), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::custom("t * (1 + "), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::custom("log(t)"), std::invalid_argument);  // f(0) != 0
    // decreasing f rejected
    CHECK_THROWS_AS(Nonlinearity::custom("0 - t^2"), std::invalid_argument);
}

TEST_CASE("check_f1") {
    std::vector<double> grid = geometric_grid(1e-3, 1e3, 4);
    auto r3 = check_f1(Nonlinearity::power(3.0), grid);
    CHECK(r3.m_hat == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r3.M_hat == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r3.verdict);
    auto r15 = check_f1(Nonlinearity::power(1.5), grid);
    CHECK(r15.m_hat == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r15.verdict);

    // custom f = t² log(1+t): dense-grid oracle for t f'/f − 1 on (0, 10]
    auto nl = Nonlinearity::custom("t^2 * log(1+t)");
    std::vector<double> g10 = geometric_grid(1e-2, 10.0, 8);
    auto rc = check_f1(nl, g10);
    double lo = 1e300, hi = -1e300;
    for (double t : g10) {
        double fp = 2.0 * t * std::log(1.0 + t) + t * t / (1.0 + t);
        double ratio = t * fp / (t * t * std::log(1.0 + t));
        lo = std::min(lo, ratio - 1.0);
        hi = std::max(hi, ratio - 1.0);
    }
    CHECK(rc.m_hat == doctest::Approx(lo).epsilon(1e-6));
    CHECK(rc.M_hat == doctest::Approx(hi).epsilon(1e-6));
    CHECK(rc.m_hat > 1.0);
    CHECK(rc.m_hat < 2.0);
    CHECK(rc.M_hat <= 2.0 + 1e-6);
    CHECK(rc.verdict);

    CHECK_THROWS(check_f1(nl, std::vector<double>{1.0, 2.0}));  // grid too small
}

TEST_CASE("antiderivative") {
    CHECK(Nonlinearity::power(3.0).antiderivative_F(2.0) == doctest::Approx(4.0));
    CHECK(Nonlinearity::power(2.0).antiderivative_F(1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    // ∫_0^1 t² log(1+t) dt = (2/3)log 2 − 5/18
    auto nl = Nonlinearity::custom("t^2*log(1+t)");
    double exact = 2.0 / 3.0 * std::log(2.0) - 5.0 / 18.0;
    CHECK(nl.antiderivative_F(1.0) == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("varphi matches the power closed form") {
    auto nl3 = Nonlinearity::power(3.0);
    CHECK(nl3.varphi(4.0) == doctest::Approx(0.5).epsilon(1e-10));
    auto nl2 = Nonlinearity::power(2.0);
    CHECK(nl2.varphi(1.0) == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-10));
    for (double t : geometric_grid(1e-4, 1e4, 2)) {
        CHECK(nl3.varphi(t) == doctest::Approx(varphi_power(3.0, t)).epsilon(1e-10));
        CHECK(nl3.varphi(2.0 * t) < nl3.varphi(t));
    }
}

TEST_CASE("psi: root-search inverse") {
    auto nl3 = Nonlinearity::power(3.0);
    CHECK(nl3.psi(0.5) == doctest::Approx(4.0).epsilon(1e-9));
    auto nl2 = Nonlinearity::power(2.0);
    CHECK(nl2.psi(2.0 * std::sqrt(3.0)) == doctest::Approx(1.0).epsilon(1e-9));
    auto nl25 = Nonlinearity::power(2.5);
    CHECK(nl25.psi(nl25.varphi(7.0)) == doctest::Approx(7.0).epsilon(1e-8));
    // identities over 12 decades
    for (double t : geometric_grid(1e-6, 1e6, 1)) {
        CHECK(nl25.varphi(nl25.psi(t)) == doctest::Approx(t).epsilon(1e-8));
        CHECK(nl25.psi(t) == doctest::Approx(psi_power(2.5, t)).epsilon(1e-8));
    }
}

TEST_CASE("transform property report") {
    std::vector<double> grid = geometric_grid(1e-2, 1e2, 4);
    auto rep3 = check_transform_properties(Nonlinearity::power(3.0), grid);
    CHECK(rep3.verdict);
    // p = 3: ψ(t)·t^{2/m} = ψ(t)·t = 2 is constant
    auto nl3 = Nonlinearity::power(3.0);
    for (double t : grid)
        CHECK(nl3.psi(t) * t == doctest::Approx(2.0).epsilon(1e-8));

    auto rep2 = check_transform_properties(Nonlinearity::power(2.0), grid);
    CHECK(rep2.verdict);
    double expected_f2 = (2.0 - 1.0) / (2.0 * std::sqrt(3.0));
    CHECK(rep2.f2_ratio_min == doctest::Approx(expected_f2).epsilon(1e-6));
    CHECK(rep2.f2_ratio_max == doctest::Approx(expected_f2).epsilon(1e-6));
}

TEST_CASE("doubling bound f(2t) <= 2^{1+M} f(t)") {
    for (const auto& nl :
         {Nonlinearity::power(2.5), Nonlinearity::custom("t^2*log(1+t)")}) {
        double cap = std::pow(2.0, 1.0 + nl.exponent_M());
        for (double t : geometric_grid(1e-3, 1e3, 3))
            CHECK(nl.f(2.0 * t) <= cap * nl.f(t) * (1.0 + 1e-12));
    }
}

TEST_SUITE_END();
