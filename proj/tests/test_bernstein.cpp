#include <doctest.h>

#include "blowup/bernstein.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>

using namespace blowup;

namespace {

double stable_A(int d, double alpha) {
    return alpha * std::pow(2.0, alpha - 1.0) * std::pow(M_PI, -0.5 * d) *
           std::tgamma(0.5 * (d + alpha)) / std::tgamma(1.0 - 0.5 * alpha);
}

// independent route for j(r): one exp-sinh pass over the whole heat
// representation, no split, different integrator family
double j_oracle(const BernsteinSpec& spec, int d, double r) {
    boost::math::quadrature::exp_sinh<double> es;
    auto f = [&](double s) {
        double gauss = std::exp(-r * r / (4.0 * s));
        if (gauss == 0.0) return 0.0;
        return std::pow(4.0 * M_PI * s, -0.5 * d) * gauss * spec.levy_density(s);
    };
    return es.integrate(f, 1e-10);
}

}  // namespace

TEST_SUITE_BEGIN("bernstein");

TEST_CASE("phi evaluation across families") {
    CHECK(BernsteinSpec::stable(1.0).phi(4.0) == doctest::Approx(2.0));
    CHECK(BernsteinSpec::stable(1.2).phi(1.0) == doctest::Approx(1.0));
    CHECK(BernsteinSpec::relativistic_stable(1.0).phi(3.0) == doctest::Approx(1.0));
    CHECK(BernsteinSpec::sum_of_stables(0.6, 1.4).phi(1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(BernsteinSpec::stable(2.0), std::invalid_argument);
    CHECK_THROWS_AS(BernsteinSpec::stable(0.0), std::invalid_argument);
    CHECK_THROWS_AS(BernsteinSpec::stable(1.0).phi(0.0), std::invalid_argument);
    CHECK_THROWS_AS(BernsteinSpec::stable(1.0).phi(-2.0), std::invalid_argument);
}

TEST_CASE("conjugate function") {
    auto s1 = BernsteinSpec::stable(1.0);
    CHECK(s1.conjugate().phi(4.0) == doctest::Approx(2.0));
    auto s08 = BernsteinSpec::stable(0.8);
    CHECK(s08.conjugate().phi(5.0) == doctest::Approx(std::pow(5.0, 0.6)).epsilon(1e-14));
    // involution
    double alpha = 1.3;
    auto twice = BernsteinSpec::stable(alpha).conjugate().conjugate();
    CHECK(twice.phi(9.0) == doctest::Approx(std::pow(9.0, alpha / 2.0)).epsilon(1e-13));

    // conjugation identity on a sampled grid, all families
    for (const auto& spec :
         {BernsteinSpec::stable(0.7), BernsteinSpec::relativistic_stable(1.1),
          BernsteinSpec::sum_of_stables(0.5, 1.3)}) {
        auto conj = spec.conjugate();
        for (double s : geometric_grid(1e-5, 1e5, 3))
            CHECK(spec.phi(s) * conj.phi(s) == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("scaling estimates") {
    auto r1 = estimate_scaling(BernsteinSpec::stable(1.0), 1.0, 1e6, 16);
    CHECK(r1.delta1 == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r1.delta2 == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r1.verdict);

    auto r18 = estimate_scaling(BernsteinSpec::stable(1.8), 1.0, 1e6, 16);
    CHECK(r18.delta1 == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(r18.delta2 == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(r18.verdict);

    auto rel = estimate_scaling(BernsteinSpec::relativistic_stable(1.0), 1.0, 1e6, 24);
    CHECK(rel.verdict);
    CHECK(rel.delta1 > 0.0);
    CHECK(rel.delta2 < 1.0);
    // brute-force slope oracle on an independent, denser lattice
    auto spec = BernsteinSpec::relativistic_stable(1.0);
    double worst = 0.0, best = 1.0;
    for (double lam : geometric_grid(1.02, 1e6, 7)) {
        if (1e6 / lam <= 1.001) continue;
        for (double t : geometric_grid(1.0, 1e6 / lam, 7)) {
            double slope = std::log(spec.phi(lam * t) / spec.phi(t)) / std::log(lam);
            worst = std::max(worst, slope);
            best = std::min(best, slope);
        }
    }
    CHECK(rel.delta2 == doctest::Approx(worst).epsilon(0.02));
    CHECK(rel.delta1 == doctest::Approx(best).epsilon(0.02));
    // tail window: the upper exponent approaches alpha/2 at infinity
    auto far = estimate_scaling(spec, 1e4, 1e10, 24);
    CHECK(far.delta2 < rel.delta2);
    CHECK(far.delta2 == doctest::Approx(0.5).epsilon(0.2));

    CHECK_THROWS_AS(estimate_scaling(spec, 0.5, 1e3, 16), std::invalid_argument);
    CHECK_THROWS_AS(estimate_scaling(spec, 1.0, 1e3, 4), std::invalid_argument);
}

TEST_CASE("phi-prime ratio bounds") {
    auto [lo1, hi1] = check_phi_prime_ratio(BernsteinSpec::stable(1.0), 100.0);
    CHECK(lo1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(hi1 == doctest::Approx(0.5).epsilon(1e-12));
    auto [lo06, hi06] = check_phi_prime_ratio(BernsteinSpec::stable(0.6), 100.0);
    CHECK(lo06 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(hi06 == doctest::Approx(0.3).epsilon(1e-12));

    // relativistic on [1, 100]: direct evaluation gives
    // t φ'/φ = (α/2) t (t+1)^{α/2−1} / ((t+1)^{α/2} − 1); at α=1 the range is
    // [~0.5497 (t=100), ~0.8536 (t=1)] — inside the Bernstein bound (0,1]
    auto [lo, hi] = check_phi_prime_ratio(BernsteinSpec::relativistic_stable(1.0), 100.0);
    auto ratio = [](double t) {
        return 0.5 * t * std::pow(t + 1.0, -0.5) / (std::sqrt(t + 1.0) - 1.0);
    };
    CHECK(lo == doctest::Approx(ratio(100.0)).epsilon(1e-6));
    CHECK(hi == doctest::Approx(ratio(1.0)).epsilon(1e-6));
    CHECK(lo > 0.0);
    CHECK(hi <= 1.0);
}

TEST_CASE("levy kernel j against the stable closed form") {
    auto spec = BernsteinSpec::stable(1.0);
    double j1 = levy_density_j(spec, 2, 1.0);
    CHECK(j1 == doctest::Approx(stable_A(2, 1.0)).epsilon(1e-7));
    CHECK(j1 == doctest::Approx(j_oracle(spec, 2, 1.0)).epsilon(1e-6));

    // pure power law: j(r) r^{d+α} constant to 0.1%
    auto s15 = BernsteinSpec::stable(1.5);
    double ref = levy_density_j(s15, 3, 0.01) * std::pow(0.01, 4.5);
    for (double r : {0.03, 0.1, 0.5, 1.0}) {
        double v = levy_density_j(s15, 3, r) * std::pow(r, 4.5);
        CHECK(v == doctest::Approx(ref).epsilon(1e-3));
    }

    // monotonicity j(2r) < j(r) across families
    for (const auto& sp :
         {BernsteinSpec::stable(0.7), BernsteinSpec::relativistic_stable(1.2),
          BernsteinSpec::sum_of_stables(0.5, 1.5)}) {
        for (double r : {0.05, 0.2, 0.8, 2.0})
            CHECK(levy_density_j(sp, 2, 2.0 * r) < levy_density_j(sp, 2, r));
    }

    auto custom = BernsteinSpec::custom("sqrt", [](double t) { return std::sqrt(t); },
                                        [](double t) { return 0.5 / std::sqrt(t); });
    CHECK_THROWS(levy_density_j(custom, 2, 1.0));
}

TEST_CASE("j asymptotics against phi(r^-2)/r^d") {
    auto [lo1, hi1] = check_j_asymptotics(BernsteinSpec::stable(1.0), 2, 0.01, 1.0, 9);
    CHECK(lo1 == doctest::Approx(stable_A(2, 1.0)).epsilon(1e-4));
    CHECK(hi1 == doctest::Approx(stable_A(2, 1.0)).epsilon(1e-4));

    auto [lo05, hi05] = check_j_asymptotics(BernsteinSpec::stable(0.5), 2, 0.01, 1.0, 9);
    CHECK(hi05 / lo05 == doctest::Approx(1.0).epsilon(1e-3));

    auto [lor, hir] =
        check_j_asymptotics(BernsteinSpec::relativistic_stable(1.0), 2, 0.01, 1.0, 9);
    CHECK(lor > 0.0);
    CHECK(hir / lor < 10.0);
}

TEST_CASE("renewal surrogate") {
    auto sur = renewal_surrogate(BernsteinSpec::stable(1.0));
    CHECK(sur.exact_v());
    CHECK(sur.V(0.25) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sur.vstar(0.04) == doctest::Approx(0.2).epsilon(1e-14));

    auto sur12 = renewal_surrogate(BernsteinSpec::stable(1.2));
    for (double t : geometric_grid(1e-4, 1.0, 4))
        CHECK(sur12.V(t) / std::pow(t, 0.6) == doctest::Approx(1.0).epsilon(1e-13));

    // V inverse round trip
    auto rel = renewal_surrogate(BernsteinSpec::relativistic_stable(1.0));
    CHECK_FALSE(rel.exact_v());
    for (double t : {1e-3, 0.1, 2.0})
        CHECK(rel.V_inverse(rel.V(t)) == doctest::Approx(t).epsilon(1e-10));
}

TEST_CASE("discrete derivative bounds for the surrogate on (0,1]") {
    for (const auto& spec :
         {BernsteinSpec::stable(0.8), BernsteinSpec::relativistic_stable(1.2)}) {
        RenewalSurrogate sur(spec);
        double sup1 = 0.0, sup2 = 0.0;
        for (double t : geometric_grid(1e-4, 1.0, 6)) {
            double v = sur.V(t);
            double d1 = fd_derivative([&](double x) { return sur.V(x); }, t);
            double d2 = fd_derivative(
                [&](double x) { return fd_derivative([&](double y) { return sur.V(y); }, x); },
                t);
            sup1 = std::max(sup1, d1 * t / v);
            sup2 = std::max(sup2, std::abs(d2) * t / d1);
        }
        CHECK(sup1 < 2.0);   // V' ≲ V/t
        CHECK(sup2 < 4.0);   // |V''| ≲ V'/t
    }
}

TEST_SUITE_END();
