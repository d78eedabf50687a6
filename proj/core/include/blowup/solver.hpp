#pragma once

#include "blowup/nonlinearity.hpp"
#include "blowup/op.hpp"

#include <optional>
#include <string>
#include <vector>

namespace blowup {

struct SolverOptions {
    double tol = 1e-10;            // per-solve interior sup-change (relative)
    int iter_cap = 200;
    double schedule_base = 3.0;    // k_n = base^n
    int schedule_max = 12;
    double schedule_tol = 1e-4;    // trusted-region change between rounds
    double delta_stop_widths = 3.0;  // δ_stop = widths × boundary mesh width
    double cert_safety = 3.0;      // headroom on the supersolution constants
    double cert_tol = 1e-9;
    double mono_slack = 1e-9;
};

/// Boundary profile U(x) = ψ(V(δ(x))).
Field build_U(const std::shared_ptr<const RadialGrid>& grid,
              const RenewalSurrogate& sur, const Nonlinearity& nl);

/// L¹ norm of U at resolution N and 2N (same grading); the ratio is the
/// numerical counterpart of the integrability dichotomy: near 1 when the
/// KO integral converges, growing without bound when it does not.
struct UL1Diagnostic {
    double norm = 0.0;
    double norm_refined = 0.0;
    double ratio = 0.0;
};
UL1Diagnostic u_l1_diagnostic(const BallDomain& dom, const RenewalSurrogate& sur,
                              const Nonlinearity& nl, int N, double gamma);

/// sup of LU/f(U) over nodes with δ ∈ (delta_lo, delta_hi); LU = −(B U).
double sup_band_ratio(const DiscreteOperator& op, const Field& U,
                      const Nonlinearity& nl, double delta_lo, double delta_hi);

struct BandCheck {
    bool verdict = false;
    double c2 = 0.0;         // fine-mesh sup ratio
    double c2_coarse = 0.0;
    int band_nodes = 0;
    double eta = 0.0;
};

/// Prop-style certificate: the band sup of LU/f(U) must agree within 20%
/// across the two resolutions (op_coarse at N/2, op_fine at N), both
/// evaluated above the coarse mesh's δ_stop.
BandCheck verify_supersolution_band(const DiscreteOperator& op_fine,
                                    const DiscreteOperator& op_coarse,
                                    const RenewalSurrogate& sur,
                                    const Nonlinearity& nl, double eta,
                                    const SolverOptions& opt = {});

struct SupersolutionBundle {
    Field U;
    Field green1;   // G_Ω 1
    Field ubar;     // a U + b G_Ω 1
    double a = 1.0;
    double b = 0.0;
    double c2 = 0.0;
    double eta1 = 0.0;
    double min_cert_margin = 0.0;  // min over nodes of (Bū + f(ū)) / scale
    double k_cert_max = 0.0;       // structural domination bound on k·source
    double ubar_l1 = 0.0;
};

/// ū = aU + bG_Ω1 with a = (safety·c)^{1/m} ≥ 1 and b = safety·a·sup|LU|
/// away from the boundary band; certifies (−L)ū + f(ū) ≥ −tol at every
/// node and throws naming the worst node otherwise.
SupersolutionBundle build_supersolution(const DiscreteOperator& op, const Field& U,
                                        const Nonlinearity& nl, double c2,
                                        double eta1, const SolverOptions& opt = {});

struct ModerateResult {
    Field u;
    int iterations = 0;
    double final_change = 0.0;
    std::vector<double> change_norms;
    bool monotone_within = true;
    int clamp_events = 0;
    int lambda_boosts = 0;
};

/// Weak-dual moderate solution u = k·martin − G_Ω f(u), computed by the
/// monotone iteration from the supersolution start (k·martin, or the
/// caller's warm start): u^{n+1} = u^n − (B+Λ)^{−1}(Bu^n + f(u^n) − k·src)
/// with Λ = diag((1+M) f(u)/u) ≥ f′.  Iterates are nonincreasing and
/// nonnegative; violations are errors.
ModerateResult solve_moderate(const DiscreteOperator& op, const Nonlinearity& nl,
                              double k, const MartinProfile& martin,
                              const SolverOptions& opt = {},
                              const Field* warm_start = nullptr);

struct SolveRound {
    double k = 0.0;
    int iterations = 0;
    double final_change = 0.0;
    bool monotone_within = true;
    double domination_margin = 0.0;  // min(ū − u_k), normalized
    double vstar_u_outer = 0.0;      // V*(δ)·u_k at the outermost trusted node
    double round_change = 0.0;       // trusted-region change vs previous round
    int lambda_boosts = 0;
    int clamp_events = 0;
};

struct SolveTrace {
    std::vector<SolveRound> rounds;
    std::vector<Field> fields;  // u_{k_n} in schedule order
    std::optional<Field> u;     // final large-solution approximation
    bool monotone_across = true;
    bool dominated = true;
    bool converged = false;
    int trusted_last = 0;
    double delta_stop = 0.0;
    double k_mesh = 0.0;  // boundary-layer capacity of the mesh
    std::string note;
};

/// Monotone large-solution limit along k_n = base^n, warm-starting each
/// round from u_{k_{n−1}} + Δk·martin (again a supersolution).  Asserts
/// u_{k_{n+1}} ≥ u_{k_n} and u_{k_n} ≤ ū at every node, every round.
///
/// The schedule stops at the first k where k·martin dominates the boundary
/// profile U at the outermost node (the mesh's boundary-layer capacity
/// k_mesh; beyond it the single deepest cell cannot absorb the prescribed
/// trace flux and k-growth is truncation leakage, not approximation), or
/// earlier when the trusted-region change drops below schedule_tol.  The
/// domination certificate bound caps k as a hard error guard.
SolveTrace solve_large(const DiscreteOperator& op, const Nonlinearity& nl,
                       const SupersolutionBundle& bundle,
                       const MartinProfile& martin, const RenewalSurrogate& sur,
                       const SolverOptions& opt = {});

struct RateFit {
    double beta = 0.0;
    double residual_rms = 0.0;
    int nodes = 0;
};

/// Least-squares slope of log u against log δ over δ ∈ [delta_lo, delta_hi];
/// β = −slope.
RateFit fit_blowup_rate(const Field& u, double delta_lo, double delta_hi);

}  // namespace blowup
