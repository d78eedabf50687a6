#include "blowup/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace blowup {

namespace {

// ∫ between consecutive grid nodes assuming local power behavior
// g(t) = g_i (t/t_i)^σ; exact for pure powers, second order otherwise.
double power_segment_integral(double t0, double t1, double g0, double g1) {
    double sigma = std::log(g1 / g0) / std::log(t1 / t0);
    if (std::abs(sigma + 1.0) < 1e-9) return g0 * t0 * std::log(t1 / t0);
    return g0 * t0 * (std::pow(t1 / t0, sigma + 1.0) - 1.0) / (sigma + 1.0);
}

// fitted log-log slope over the top `span` fraction of a geometric grid
double top_slope(const std::vector<double>& ts, const std::vector<double>& gs,
                 double decade_fraction = 1.0) {
    double t_hi = ts.back();
    double t_lo = t_hi / std::pow(10.0, decade_fraction);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] >= t_lo) {
            xs.push_back(ts[i]);
            ys.push_back(gs[i]);
        }
    }
    if (xs.size() < 3) {
        xs.assign(ts.end() - 3, ts.end());
        ys.assign(gs.end() - 3, gs.end());
    }
    return fit_log_slope(xs, ys).slope;
}

Verdict classify_decay(double slope, double critical, double margin) {
    // integrand with fitted exponent `slope`: integral converges iff slope < critical
    if (slope <= critical - margin) return Verdict::holds;
    if (slope >= critical + margin) return Verdict::fails;
    return Verdict::indeterminate;
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::indeterminate: return "indeterminate";
    }
    return "?";
}

namespace {

double ko_integrand(const BernsteinSpec& spec, const Nonlinearity& nl, double t) {
    double w = nl.varphi(t);
    double y = 1.0 / (w * w);
    double x = monotone_inverse([&](double s) { return spec.phi(s); }, y,
                                /*increasing=*/true);
    return 1.0 / std::sqrt(x);
}

}  // namespace

KoIntegralResult check_ko_integral(const BernsteinSpec& spec,
                                   const Nonlinearity& nl,
                                   const ConditionOptions& opt) {
    KoIntegralResult res;
    auto ts = geometric_grid(1.0, opt.ko_t_max, opt.per_decade);
    std::vector<double> gs(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) gs[i] = ko_integrand(spec, nl, ts[i]);

    res.tail_exponent = top_slope(ts, gs);
    // decay must be strict across the sampled tail, not just at the top
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = ts.size() / 2; i + 1 < ts.size(); ++i) {
        double s = std::log(gs[i + 1] / gs[i]) / std::log(ts[i + 1] / ts[i]);
        worst = std::max(worst, s);
    }
    res.verdict = classify_decay(std::max(res.tail_exponent, worst), -1.0, opt.margin);

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        acc += power_segment_integral(ts[i], ts[i + 1], gs[i], gs[i + 1]);
    res.partial_integral = acc;
    return res;
}

KoRefinedResult check_ko_refined(const BernsteinSpec& spec, const Nonlinearity& nl,
                                 double R, double r_max,
                                 const ConditionOptions& opt) {
    if (!(r_max / R >= 1e3))
        throw std::invalid_argument("check_ko_refined: need r_max/R >= 1e3");
    KoRefinedResult res;
    res.r_lo = R;
    res.r_hi = r_max;

    auto rs = geometric_grid(R, r_max, opt.per_decade);
    std::vector<double> gs(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) gs[i] = ko_integrand(spec, nl, rs[i]);

    double sigma = top_slope(rs, gs);
    if (sigma >= -1.0 - opt.margin) {
        res.verdict = sigma >= -1.0 + opt.margin ? Verdict::fails : Verdict::indeterminate;
        res.note = "tail integral not decisively convergent (fitted exponent " +
                   std::to_string(sigma) + ")";
        return res;
    }
    double tail = gs.back() * rs.back() / (-sigma - 1.0);

    // cumulative ∫_r^∞ g from the top of the grid down
    std::vector<double> integral(rs.size());
    integral.back() = tail;
    for (std::size_t i = rs.size() - 1; i-- > 0;)
        integral[i] = integral[i + 1] +
                      power_segment_integral(rs[i], rs[i + 1], gs[i], gs[i + 1]);

    std::vector<double> rho(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) rho[i] = integral[i] / (rs[i] * gs[i]);

    // running sup must stabilize: < 1% growth over the top decade
    double sup_all = 0.0, sup_before_top = 0.0;
    double top_cut = rs.back() / 10.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        sup_all = std::max(sup_all, rho[i]);
        if (rs[i] <= top_cut) sup_before_top = std::max(sup_before_top, rho[i]);
    }
    res.c1 = sup_all;
    if (!(sup_all > 0.0) || !std::isfinite(sup_all)) {
        res.verdict = Verdict::fails;
        res.note = "ratio not finite";
        return res;
    }
    if (sup_all > sup_before_top * 1.01) {
        res.verdict = Verdict::fails;
        res.note = "ratio still growing at the top of the window";
        return res;
    }
    res.verdict = Verdict::holds;
    return res;
}

KatoMResult check_kato_m_sufficient(const BernsteinSpec& spec,
                                    const Nonlinearity& nl,
                                    const ConditionOptions& opt) {
    KatoMResult res;
    const double m = nl.exponent_m();
    auto w = [&](double t) { return std::pow(spec.phi(1.0 / (t * t)), 1.0 / m); };

    const double t_floor = opt.kato_eps_min * 1e-6;
    auto ts = geometric_grid(t_floor, opt.kato_eps_max, opt.per_decade);
    std::vector<double> ws(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) ws[i] = w(ts[i]);

    // head behavior at the small end decides integrability
    std::vector<double> hx(ts.begin(), ts.begin() + opt.per_decade + 1);
    std::vector<double> hy(ws.begin(), ws.begin() + opt.per_decade + 1);
    double a = fit_log_slope(hx, hy).slope;
    res.head_exponent = a;
    if (a <= -1.0 + opt.margin) {
        res.verdict = a <= -1.0 - opt.margin ? Verdict::fails : Verdict::indeterminate;
        return res;
    }

    // cumulative ∫_0^t w with power extrapolation below the grid floor
    std::vector<double> cum(ts.size());
    cum[0] = ws[0] * ts[0] / (a + 1.0);
    for (std::size_t i = 1; i < ts.size(); ++i)
        cum[i] = cum[i - 1] + power_segment_integral(ts[i - 1], ts[i], ws[i - 1], ws[i]);

    double sup = 0.0;
    std::vector<double> eps_v, ratio_v;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < opt.kato_eps_min) continue;
        double ratio = cum[i] / (ts[i] * ws[i]);
        sup = std::max(sup, ratio);
        eps_v.push_back(ts[i]);
        ratio_v.push_back(ratio);
    }
    res.sup_ratio = sup;
    // bounded iff the ratio does not grow as ε ↓ 0
    std::vector<double> ex(eps_v.begin(), eps_v.begin() + std::min<std::size_t>(
                                              eps_v.size(), opt.per_decade + 1));
    std::vector<double> ry(ratio_v.begin(), ratio_v.begin() + ex.size());
    double trend = fit_log_slope(ex, ry).slope;
    res.verdict = (std::isfinite(sup) && trend > -opt.margin) ? Verdict::holds
                                                              : Verdict::fails;
    return res;
}

GrowthResult check_growth(const BernsteinSpec& spec, const Nonlinearity& nl,
                          const ConditionOptions& opt) {
    GrowthResult res;
    RenewalSurrogate sur = renewal_surrogate(spec);
    auto ss = geometric_grid(1.0, opt.growth_s_max, 8);
    std::vector<double> Gs(ss.size());
    for (std::size_t i = 0; i < ss.size(); ++i) {
        double s = ss[i];
        double y = std::sqrt(s / nl.f(s));
        Gs[i] = sur.V_inverse(y) * std::sqrt(s * nl.f(s));
    }
    double slope = top_slope(ss, Gs);
    res.trend_exponent = slope;
    if (slope >= opt.margin) res.verdict = Verdict::holds;
    else if (slope <= -opt.margin) res.verdict = Verdict::fails;
    else res.verdict = Verdict::indeterminate;
    return res;
}

IntCriterionResult check_int_criterion(const BernsteinSpec& spec,
                                       const Nonlinearity& nl,
                                       const ConditionOptions& opt) {
    IntCriterionResult res;
    RenewalSurrogate sur = renewal_surrogate(spec);
    auto q = [&](double t) {
        double v = sur.V(t);
        return v * nl.f(v / t);
    };
    // geometric nodes from 1 toward 0 with the configured ratio
    std::vector<double> ts;
    for (double t = 1.0; t > 1e-10; t /= opt.int_node_ratio) ts.push_back(t);
    std::reverse(ts.begin(), ts.end());
    std::vector<double> qs(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) qs[i] = q(ts[i]);

    std::vector<double> hx(ts.begin(), ts.begin() + 24);
    std::vector<double> hy(qs.begin(), qs.begin() + 24);
    double e0 = fit_log_slope(hx, hy).slope;
    res.head_exponent = e0;
    if (e0 <= -1.0 + opt.margin) {
        res.verdict = e0 <= -1.0 - opt.margin ? Verdict::fails : Verdict::indeterminate;
        return res;
    }
    double acc = qs[0] * ts[0] / (e0 + 1.0);  // extrapolated head
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        acc += power_segment_integral(ts[i], ts[i + 1], qs[i], qs[i + 1]);
    res.integral = acc;
    res.verdict = Verdict::holds;
    return res;
}

ConditionReport full_report(const BernsteinSpec& spec, const Nonlinearity& nl,
                            const ConditionOptions& opt) {
    ConditionReport rep;
    auto note_failure = [&](const std::string& what, const std::exception& e) {
        if (rep.reason.empty()) rep.reason = what + ": " + e.what();
    };

    rep.scaling = estimate_scaling(spec, 1.0, 1e6, 32);
    if (!rep.scaling.verdict) {
        rep.reason = "scaling condition fails";
        return rep;
    }
    auto f1_grid = geometric_grid(1e-4, 1e4, 4);
    rep.f1 = check_f1(nl, f1_grid);

    try {
        rep.ko = check_ko_integral(spec, nl, opt);
    } catch (const std::exception& e) {
        note_failure("KO integral", e);
    }
    if (rep.ko.verdict == Verdict::holds) {
        try {
            rep.ko_refined =
                check_ko_refined(spec, nl, opt.ko_refined_R, opt.ko_refined_r_max, opt);
        } catch (const std::exception& e) {
            note_failure("refined KO", e);
        }
    } else {
        rep.ko_refined.note = "KO integral does not hold; tail diverges";
    }
    try {
        rep.kato_m = check_kato_m_sufficient(spec, nl, opt);
    } catch (const std::exception& e) {
        note_failure("kato-m", e);
    }
    try {
        rep.growth = check_growth(spec, nl, opt);
    } catch (const std::exception& e) {
        note_failure("boundary growth", e);
    }
    try {
        rep.int_criterion = check_int_criterion(spec, nl, opt);
    } catch (const std::exception& e) {
        note_failure("integral criterion", e);
    }

    rep.admissible = rep.f1.verdict && rep.ko_refined.verdict == Verdict::holds &&
                     rep.growth.verdict == Verdict::holds &&
                     rep.int_criterion.verdict == Verdict::holds;
    if (!rep.admissible && rep.reason.empty()) {
        if (!rep.f1.verdict) rep.reason = "f fails the exponent-bound condition";
        else if (rep.ko.verdict != Verdict::holds) rep.reason = "KO integral fails";
        else if (rep.ko_refined.verdict != Verdict::holds) rep.reason = "refined KO fails";
        else if (rep.growth.verdict != Verdict::holds) rep.reason = "boundary growth fails";
        else rep.reason = "integral criterion fails";
    }
    return rep;
}

}  // namespace blowup
