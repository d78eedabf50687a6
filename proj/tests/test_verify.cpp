#include <doctest.h>

#include "blowup/verify.hpp"

#include <cmath>
#include <random>

using namespace blowup;

namespace {

struct Rig {
    BernsteinSpec spec;
    Nonlinearity nl;
    RenewalSurrogate sur;
    BallDomain dom;
    std::shared_ptr<const RadialGrid> grid;
    DiscreteOperator op;
    MartinProfile martin;

    explicit Rig(int N, double alpha = 1.0, double p = 2.5, double gamma = 2.0)
        : spec(BernsteinSpec::stable(alpha)),
          nl(Nonlinearity::power(p)),
          sur(renewal_surrogate(spec)),
          dom{2, 1.0},
          grid(RadialGrid::build(dom, N, gamma)),
          op(DiscreteOperator::assemble(spec, dom, grid, {1e-8, 15, 3, 2, 30.0})),
          martin(discrete_martin_profile(op, sur)) {}
};

std::vector<Band> random_bands(std::mt19937_64& rng, int n, int count, int min_w) {
    std::vector<Band> out;
    std::uniform_int_distribution<int> lo_d(0, n - 2 - min_w);
    for (int b = 0; b < count; ++b) {
        int lo = lo_d(rng);
        std::uniform_int_distribution<int> hi_d(lo + min_w, std::min(n - 2, lo + 200));
        out.push_back({lo, hi_d(rng)});
    }
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("verify");

TEST_CASE("bump construction") {
    Rig rig(128);
    Field b = make_bump(rig.grid, 20, 60);
    for (int i = 0; i < 128; ++i) {
        CHECK(b[i] >= 0.0);
        if (i < 20 || i > 60) CHECK(b[i] == 0.0);
    }
    CHECK(b[40] > 0.5);
    CHECK_THROWS(make_bump(rig.grid, 120, 127));  // touches the boundary node
    CHECK_THROWS(make_bump(rig.grid, 10, 15));    // too small for the smoothing
}

TEST_CASE("discrete integration-by-parts pairing is exact") {
    Rig rig(96);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> v(96);
        for (auto& x : v) x = ud(rng);
        Field xi = make_bump(rig.grid, 15 + trial * 5, 70);
        auto Bxi = rig.op.apply_raw(xi.values());
        auto Bv = rig.op.adjoint_apply(v);
        double lhs = 0.0, rhs = 0.0, scale = 0.0;
        for (int i = 0; i < 96; ++i) {
            double w = rig.grid->volume_weight(i);
            lhs += w * v[static_cast<std::size_t>(i)] * Bxi[static_cast<std::size_t>(i)];
            rhs += w * xi[i] * Bv[static_cast<std::size_t>(i)];
            scale += std::abs(w * v[static_cast<std::size_t>(i)] *
                              Bxi[static_cast<std::size_t>(i)]);
        }
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("superharmonic mean-value check") {
    Rig rig(128);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::vector<double> g(128);
    for (auto& x : g) x = ud(rng);
    Field h = rig.op.green_apply(Field(rig.grid, g));

    auto bands = random_bands(rng, 128, 100, 12);
    auto res = check_superharmonic(rig.op, h, bands);
    CHECK(res.applicable);
    CHECK(res.verdict);

    // harmonic case: the all-ones field (exterior 1) is reproduced exactly,
    // so margins sit at the quadrature floor
    Field ones = Field::constant(rig.grid, 1.0);
    Field lifted = rig.op.harmonic_lift(30, 90, ones, 1.0);
    auto eq = check_superharmonic(rig.op, lifted, {{40, 60}}, 1e-8);
    CHECK(eq.verdict);
    CHECK(eq.worst_margin >= -1e-10);
    CHECK(eq.worst_margin < 0.05);

    // inapplicable when the precondition fails
    Field bad = Field::zeros(rig.grid);
    bad[64] = -1.0;
    Field hb = rig.op.green_apply(bad);
    auto na = check_superharmonic(rig.op, hb, bands);
    CHECK_FALSE(na.applicable);
}

TEST_CASE("margins are mesh-stable (verdicts do not flip under refinement)") {
    std::mt19937_64 rng(17);
    double margins[2];
    int idx = 0;
    for (int N : {96, 192}) {
        Rig rig(N);
        std::vector<double> g(static_cast<std::size_t>(N), 0.5);
        Field h = rig.op.green_apply(Field(rig.grid, g));
        auto res = check_superharmonic(rig.op, h, {{N / 4, N / 2}});
        CHECK(res.verdict);
        margins[idx++] = res.worst_margin;
    }
    CHECK(margins[1] >= -1e-8);
}

TEST_CASE("green identity for solver outputs and supersolution") {
    Rig rig(128);
    auto mr = solve_moderate(rig.op, rig.nl, 9.0, rig.martin);
    std::vector<Band> bands = {{10, 60}, {40, 100}, {0, 126}};
    auto res = check_green_identity(rig.op, rig.nl, mr.u, bands, 1e-8, true);
    CHECK(res.verdict);  // exact by construction away from the trace source

    Field U = build_U(rig.grid, rig.sur, rig.nl);
    double c2 = sup_band_ratio(rig.op, U, rig.nl, 3.0 * rig.grid->boundary_width(), 0.1);
    auto sb = build_supersolution(rig.op, U, rig.nl, c2, 0.1);
    auto sup = check_green_identity(rig.op, rig.nl, sb.ubar, bands, 1e-8, false);
    CHECK(sup.verdict);  // one-sided inequality for the supersolution

    // a 10% tamper at one node breaks the identity
    Field tampered = mr.u;
    tampered[50] *= 1.1;
    auto bad = check_green_identity(rig.op, rig.nl, tampered, bands, 1e-5, true);
    CHECK_FALSE(bad.verdict);
}

TEST_CASE("comparison principle") {
    Rig rig(128);
    Field U = build_U(rig.grid, rig.sur, rig.nl);
    double c2 = sup_band_ratio(rig.op, U, rig.nl, 3.0 * rig.grid->boundary_width(), 0.1);
    auto sb = build_supersolution(rig.op, U, rig.nl, c2, 0.1);
    auto m9 = solve_moderate(rig.op, rig.nl, 9.0, rig.martin);
    auto m81 = solve_moderate(rig.op, rig.nl, 81.0, rig.martin);

    Band band{0, rig.op.size() - 2};
    auto r1 = check_comparison(rig.op, rig.nl, sb.ubar, m9.u, band);
    CHECK(r1.applicable);
    CHECK(r1.verdict);
    auto r2 = check_comparison(rig.op, rig.nl, m81.u, m9.u, band);
    CHECK(r2.applicable);
    CHECK(r2.verdict);
    auto same = check_comparison(rig.op, rig.nl, m9.u, m9.u, band);
    CHECK(same.verdict);
    CHECK(same.worst_margin == doctest::Approx(0.0).epsilon(1e-12));

    // precondition violation is reported distinctly
    Field below = m9.u;
    for (int i = 0; i < rig.op.size(); ++i) below[i] *= 0.5;
    auto pre = check_comparison(rig.op, rig.nl, below, m9.u, Band{10, 20});
    CHECK_FALSE(pre.applicable);
}

TEST_CASE("kato inequality") {
    Rig rig(128);
    std::mt19937_64 rng(23);

    std::vector<Field> bumps;
    for (int b = 0; b < 50; ++b) {
        auto bands = random_bands(rng, 128, 1, 14);
        bumps.push_back(make_bump(rig.grid, bands[0].lo, bands[0].hi));
    }

    // nonnegative u: both sides agree up to the pairing floor
    std::vector<double> gpos(128, 0.0);
    for (int i = 20; i < 40; ++i) gpos[static_cast<std::size_t>(i)] = 1.0;
    Field srcp(rig.grid, gpos);
    Field upos = rig.op.green_apply(srcp);
    auto rp = check_kato(rig.op, upos, srcp, bumps, 1e-9);
    CHECK(rp.applicable);
    CHECK(rp.verdict);
    CHECK(std::abs(rp.worst_margin) < 1e-9);

    // sign-changing u = G(g₁ − g₂): strict inequality for many bumps
    std::vector<double> g(128, 0.0);
    for (int i = 0; i < 128; ++i) {
        double r = rig.grid->node(i);
        g[static_cast<std::size_t>(i)] = r < 0.4 ? 1.0 : (r > 0.6 ? -1.0 : 0.0);
    }
    Field src(rig.grid, g);
    Field u = rig.op.green_apply(src);
    bool sign_changes = false;
    for (int i = 1; i < 128; ++i) sign_changes = sign_changes || u[i] * u[i - 1] < 0.0;
    CHECK(sign_changes);
    auto rs = check_kato(rig.op, u, src, bumps);
    CHECK(rs.applicable);
    CHECK(rs.verdict);

    // synthetic single-node sign flip keeps the favorable sign
    Field flip = upos;
    flip[64] = -flip[64];
    auto Bf = rig.op.apply(flip);
    auto rf = check_kato(rig.op, flip, Bf, bumps);
    CHECK(rf.applicable);
    CHECK(rf.verdict);

    // inapplicable: a bump touching the outermost node
    std::vector<Field> bad = {Field::constant(rig.grid, 1.0)};
    auto na = check_kato(rig.op, upos, srcp, bad);
    CHECK_FALSE(na.applicable);
}

TEST_CASE("max subsolution / min supersolution") {
    Rig rig(128);
    std::mt19937_64 rng(31);
    std::vector<Field> bumps;
    for (int b = 0; b < 50; ++b) {
        auto bands = random_bands(rng, 128, 1, 14);
        bumps.push_back(make_bump(rig.grid, bands[0].lo, bands[0].hi));
    }
    auto ma = solve_moderate(rig.op, rig.nl, 16.0, rig.martin);
    auto mb = solve_moderate(rig.op, rig.nl, 27.0, rig.martin);

    auto same = check_max_subsolution(rig.op, rig.nl, ma.u, ma.u, bumps, 1e-8);
    CHECK(same.applicable);
    CHECK(same.verdict);

    auto mx = check_max_subsolution(rig.op, rig.nl, ma.u, mb.u, bumps);
    CHECK(mx.applicable);
    CHECK(mx.verdict);
    auto mn = check_min_supersolution(rig.op, rig.nl, ma.u, mb.u, bumps);
    CHECK(mn.applicable);
    CHECK(mn.verdict);
}

TEST_CASE("standard battery end to end") {
    Rig rig(128);
    Field U = build_U(rig.grid, rig.sur, rig.nl);
    double c2 = sup_band_ratio(rig.op, U, rig.nl, 3.0 * rig.grid->boundary_width(), 0.1);
    auto sb = build_supersolution(rig.op, U, rig.nl, c2, 0.1);
    auto tr = solve_large(rig.op, rig.nl, sb, rig.martin, rig.sur);
    BatteryOptions bo;
    bo.superharmonic_bands = 25;
    bo.kato_bumps = 15;
    bo.max_sub_bumps = 15;
    auto results = standard_battery(rig.op, rig.nl, sb, tr, rig.martin, bo);
    REQUIRE(results.size() >= 6);
    for (const auto& r : results) {
        CHECK_MESSAGE(r.applicable, r.name, ": ", r.note);
        CHECK_MESSAGE(r.verdict, r.name, " margin=", r.worst_margin);
    }
}

TEST_SUITE_END();
