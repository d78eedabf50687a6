#include "blowup/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace blowup {

Field build_U(const std::shared_ptr<const RadialGrid>& grid,
              const RenewalSurrogate& sur, const Nonlinearity& nl) {
    std::vector<double> v(static_cast<std::size_t>(grid->size()));
    for (int i = 0; i < grid->size(); ++i)
        v[static_cast<std::size_t>(i)] = nl.psi(sur.V(grid->delta(i)));
    return Field(grid, std::move(v));
}

UL1Diagnostic u_l1_diagnostic(const BallDomain& dom, const RenewalSurrogate& sur,
                              const Nonlinearity& nl, int N, double gamma) {
    UL1Diagnostic d;
    auto g1 = RadialGrid::build(dom, N, gamma);
    auto g2 = RadialGrid::build(dom, 2 * N, gamma);
    d.norm = build_U(g1, sur, nl).l1_norm();
    d.norm_refined = build_U(g2, sur, nl).l1_norm();
    d.ratio = d.norm_refined / d.norm;
    return d;
}

double sup_band_ratio(const DiscreteOperator& op, const Field& U,
                      const Nonlinearity& nl, double delta_lo, double delta_hi) {
    Field BU = op.apply(U);
    const auto& g = op.grid();
    double sup = -std::numeric_limits<double>::infinity();
    int count = 0;
    for (int i = 0; i < op.size(); ++i) {
        double d = g.delta(i);
        if (d <= delta_lo || d >= delta_hi) continue;
        double fu = nl.f(U[i]);
        if (fu == 0.0) throw std::runtime_error("sup_band_ratio: f(U) vanishes in band");
        sup = std::max(sup, -BU[i] / fu);
        ++count;
    }
    if (count == 0) throw std::runtime_error("sup_band_ratio: empty band");
    return sup;
}

BandCheck verify_supersolution_band(const DiscreteOperator& op_fine,
                                    const DiscreteOperator& op_coarse,
                                    const RenewalSurrogate& sur,
                                    const Nonlinearity& nl, double eta,
                                    const SolverOptions& opt) {
    BandCheck bc;
    bc.eta = eta;
    const double stop_coarse =
        opt.delta_stop_widths * op_coarse.grid().boundary_width();
    // both meshes evaluated above the coarse mesh's resolved depth
    Field Uf = build_U(op_fine.grid_ptr(), sur, nl);
    Field Uc = build_U(op_coarse.grid_ptr(), sur, nl);
    int nodes = 0;
    for (int i = 0; i < op_coarse.size(); ++i) {
        double d = op_coarse.grid().delta(i);
        if (d > stop_coarse && d < eta) ++nodes;
    }
    bc.band_nodes = nodes;
    if (nodes < 16)
        throw std::invalid_argument("verify_supersolution_band: fewer than 16 band nodes");
    bc.c2 = sup_band_ratio(op_fine, Uf, nl, stop_coarse, eta);
    bc.c2_coarse = sup_band_ratio(op_coarse, Uc, nl, stop_coarse, eta);
    double spread = std::abs(bc.c2 - bc.c2_coarse);
    bc.verdict = spread <= 0.2 * std::max(std::abs(bc.c2), std::abs(bc.c2_coarse));
    return bc;
}

SupersolutionBundle build_supersolution(const DiscreteOperator& op, const Field& U,
                                        const Nonlinearity& nl, double c2,
                                        double eta1, const SolverOptions& opt) {
    SupersolutionBundle sb;
    sb.U = U;
    sb.c2 = c2;
    sb.eta1 = eta1;
    const auto& g = op.grid();
    Field BU = op.apply(U);

    // constants must cover every node the certificate will visit, including
    // the unresolved boundary cells
    double ratio_all = c2;
    double sup_LU_interior = 0.0;
    for (int i = 0; i < op.size(); ++i) {
        double d = g.delta(i);
        double LU = -BU[i];
        if (d < eta1) ratio_all = std::max(ratio_all, LU / nl.f(U[i]));
        else sup_LU_interior = std::max(sup_LU_interior, std::abs(LU));
    }
    double c = opt.cert_safety * std::max(1.0, ratio_all);
    sb.a = std::max(1.0, std::pow(c, 1.0 / nl.exponent_m()));
    // b needs no headroom: f(ū) ≥ 0 already gives the interior rows a
    // strictly positive certificate margin
    sb.b = sb.a * sup_LU_interior;

    sb.green1 = op.green_apply(Field::constant(op.grid_ptr(), 1.0));
    std::vector<double> ubar(static_cast<std::size_t>(op.size()));
    for (int i = 0; i < op.size(); ++i) {
        ubar[static_cast<std::size_t>(i)] = sb.a * U[i] + sb.b * sb.green1[i];
        if (!std::isfinite(ubar[static_cast<std::size_t>(i)]))
            throw std::runtime_error("build_supersolution: ubar not finite at node " +
                                     std::to_string(i));
    }
    sb.ubar = Field(op.grid_ptr(), std::move(ubar));
    sb.ubar_l1 = sb.ubar.l1_norm();

    // discrete certificate: (−L)ū + f(ū) ≥ −tol everywhere
    Field Bubar = op.apply(sb.ubar);
    double worst = std::numeric_limits<double>::infinity();
    int worst_node = -1;
    for (int i = 0; i < op.size(); ++i) {
        double resid = Bubar[i] + nl.f(sb.ubar[i]);
        double scale = std::max({1.0, std::abs(Bubar[i]), nl.f(sb.ubar[i])});
        double margin = resid / scale;
        if (margin < worst) {
            worst = margin;
            worst_node = i;
        }
    }
    sb.min_cert_margin = worst;
    if (worst < -opt.cert_tol)
        throw std::runtime_error(
            "build_supersolution: certificate fails at node " + std::to_string(worst_node) +
            " (margin " + std::to_string(worst) + ")");
    double last_resid = Bubar[op.size() - 1] + nl.f(sb.ubar[op.size() - 1]);
    sb.k_cert_max = std::max(0.0, last_resid);
    return sb;
}

namespace {

// Λ entries: (1+M) f(u)/u bounds f′ on (0,u] for the whole f1 class.
double lambda_entry(const Nonlinearity& nl, double u) {
    if (!(u > 0.0)) return 0.0;
    return (1.0 + nl.exponent_M()) * nl.f(u) / u;
}

}  // namespace

ModerateResult solve_moderate(const DiscreteOperator& op, const Nonlinearity& nl,
                              double k, const MartinProfile& martin,
                              const SolverOptions& opt, const Field* warm_start) {
    if (!(k > 0.0)) throw std::invalid_argument("solve_moderate: k must be positive");
    const int n = op.size();
    ModerateResult res{Field::zeros(op.grid_ptr())};

    std::vector<double> u(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        u[static_cast<std::size_t>(i)] = warm_start ? (*warm_start)[i] : k * martin.field[i];
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = k * martin.source[static_cast<std::size_t>(i)];

    Eigen::Map<const Eigen::MatrixXd> Bt(op.matrix().data(), n, n);
    Eigen::MatrixXd B = Bt.transpose();
    Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(u.data(), n);
    Eigen::VectorXd sv = Eigen::Map<const Eigen::VectorXd>(s.data(), n);

    auto residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r = B * x - sv;
        for (int i = 0; i < n; ++i) r(i) += nl.f(std::max(0.0, x(i)));
        return r;
    };

    // Λ frozen at the round's starting iterate stays an upper bound for f′
    // along the (monotone decreasing) iteration, so the factorization is
    // reused until progress stalls
    double lambda_scale = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    bool have_factor = false;
    double change_at_factor = 0.0;
    int factor_age = 0;
    for (int it = 0; it < opt.iter_cap; ++it) {
        Eigen::VectorXd r = residual(uv);
        if (!have_factor) {
            Eigen::MatrixXd A = B;
            for (int i = 0; i < n; ++i)
                A(i, i) += lambda_scale * lambda_entry(nl, uv(i));
            lu.compute(A);
            have_factor = true;
            factor_age = 0;
        }
        ++factor_age;
        Eigen::VectorXd d = lu.solve(r);
        Eigen::VectorXd next = uv - d;

        // monotone-from-above step: retry with a stiffer Λ on violation
        double worst_up = 0.0;
        for (int i = 0; i < n; ++i)
            worst_up = std::max(worst_up,
                                (next(i) - uv(i)) / (1.0 + std::abs(uv(i))));
        if (worst_up > opt.mono_slack && res.lambda_boosts < 8) {
            lambda_scale *= 2.0;
            ++res.lambda_boosts;
            have_factor = false;
            continue;
        }
        res.monotone_within = res.monotone_within && worst_up <= opt.mono_slack;

        for (int i = 0; i < n; ++i) {
            if (next(i) < 0.0) {
                next(i) = 0.0;
                ++res.clamp_events;
            }
        }
        double change = 0.0;
        for (int i = 0; i < n; ++i)
            change = std::max(change, std::abs(next(i) - uv(i)) / (1.0 + std::abs(uv(i))));
        uv = next;
        res.change_norms.push_back(change);
        res.iterations = it + 1;
        res.final_change = change;
        if (change < opt.tol) break;
        if (factor_age == 1) change_at_factor = change;
        // demand a decade of progress per 5 reused solves, else re-linearize
        if (factor_age >= 5 && change > 0.1 * change_at_factor) have_factor = false;
    }
    if (res.final_change >= opt.tol)
        throw std::runtime_error("solve_moderate: no convergence within iteration cap (k=" +
                                 std::to_string(k) + ")");
    for (int i = 0; i < n; ++i) {
        double cap = k * martin.field[i];
        if (uv(i) > cap * (1.0 + 1e-9) + 1e-12)
            throw std::runtime_error("solve_moderate: u exceeds k*martin at node " +
                                     std::to_string(i));
        res.u[i] = uv(i);
    }
    return res;
}

SolveTrace solve_large(const DiscreteOperator& op, const Nonlinearity& nl,
                       const SupersolutionBundle& bundle,
                       const MartinProfile& martin, const RenewalSurrogate& sur,
                       const SolverOptions& opt) {
    SolveTrace tr;
    const auto& g = op.grid();
    tr.delta_stop = opt.delta_stop_widths * g.boundary_width();
    tr.trusted_last = g.last_index_with_delta_at_least(tr.delta_stop);
    if (tr.trusted_last < 0)
        throw std::runtime_error("solve_large: no trusted nodes above delta_stop");

    // the discrete domination certificate covers k·source ≤ Bū + f(ū); the
    // outermost row is the binding one and bounds how far the schedule may run
    const double k_struct = martin.source_scale > 0.0
                                ? 0.9 * bundle.k_cert_max / martin.source_scale
                                : std::numeric_limits<double>::infinity();
    // mesh capacity: once k·martin reaches the certified supersolution at the
    // deepest resolved cell, that cell is barrier-limited and further rounds
    // only accumulate truncation leakage
    const int last = op.size() - 1;
    tr.k_mesh = bundle.ubar[last] / std::max(martin.field[last], 1e-300);

    const Field* prev = nullptr;
    double k_prev = 0.0;
    for (int round = 1; round <= opt.schedule_max; ++round) {
        double k = std::pow(opt.schedule_base, round);
        if (k > k_struct) {
            tr.note = "schedule truncated at the supersolution certificate bound "
                      "(k_struct=" + std::to_string(k_struct) + ")";
            break;
        }
        std::optional<Field> warm;
        if (prev) {
            warm = *prev;
            for (int i = 0; i < op.size(); ++i)
                (*warm)[i] += (k - k_prev) * martin.field[i];
        }
        ModerateResult mr =
            solve_moderate(op, nl, k, martin, opt, warm ? &*warm : nullptr);

        SolveRound sr;
        sr.k = k;
        sr.iterations = mr.iterations;
        sr.final_change = mr.final_change;
        sr.monotone_within = mr.monotone_within;
        sr.lambda_boosts = mr.lambda_boosts;
        sr.clamp_events = mr.clamp_events;

        double dom_margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < op.size(); ++i) {
            double m = (bundle.ubar[i] - mr.u[i]) / (1.0 + std::abs(bundle.ubar[i]));
            dom_margin = std::min(dom_margin, m);
        }
        sr.domination_margin = dom_margin;
        if (dom_margin < -opt.mono_slack) {
            tr.dominated = false;
            throw std::runtime_error("solve_large: domination u_k <= ubar failed at k=" +
                                     std::to_string(k));
        }
        if (prev) {
            double worst = 0.0;
            for (int i = 0; i < op.size(); ++i)
                worst = std::min(worst, (mr.u[i] - (*prev)[i]) / (1.0 + std::abs(mr.u[i])));
            if (worst < -opt.mono_slack) {
                tr.monotone_across = false;
                throw std::runtime_error(
                    "solve_large: schedule monotonicity u_{k+} >= u_k failed at k=" +
                    std::to_string(k));
            }
            double change = 0.0;
            for (int i = 0; i <= tr.trusted_last; ++i)
                change = std::max(change, std::abs(mr.u[i] - (*prev)[i]) /
                                              (1.0 + std::abs(mr.u[i])));
            sr.round_change = change;
        } else {
            sr.round_change = std::numeric_limits<double>::infinity();
        }
        sr.vstar_u_outer = sur.vstar(g.delta(tr.trusted_last)) * mr.u[tr.trusted_last];

        tr.fields.push_back(mr.u);
        tr.rounds.push_back(sr);
        prev = &tr.fields.back();
        k_prev = k;

        if (round >= 2 && sr.round_change < opt.schedule_tol) {
            tr.converged = true;
            break;
        }
        if (k >= tr.k_mesh) {
            tr.converged = true;
            tr.note = "schedule exhausted the mesh capacity (k_mesh=" +
                      std::to_string(tr.k_mesh) + ")";
            break;
        }
    }
    if (tr.fields.empty())
        throw std::runtime_error("solve_large: no schedule round fit under the "
                                 "certificate bound; refine the mesh");
    tr.u = tr.fields.back();
    return tr;
}

RateFit fit_blowup_rate(const Field& u, double delta_lo, double delta_hi) {
    const auto& g = *u.grid();
    std::vector<double> ds, us;
    for (int i = 0; i < u.size(); ++i) {
        double d = g.delta(i);
        if (d < delta_lo || d > delta_hi) continue;
        if (!(u[i] > 0.0))
            throw std::invalid_argument("fit_blowup_rate: u must be positive in window");
        ds.push_back(d);
        us.push_back(u[i]);
    }
    if (ds.size() < 8)
        throw std::invalid_argument("fit_blowup_rate: window must contain >= 8 nodes");
    auto fit = fit_log_slope(ds, us);
    return {-fit.slope, fit.residual_rms, static_cast<int>(ds.size())};
}

}  // namespace blowup
