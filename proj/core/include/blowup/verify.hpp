#pragma once

#include "blowup/nonlinearity.hpp"
#include "blowup/op.hpp"
#include "blowup/solver.hpp"

#include <string>
#include <vector>

namespace blowup {

/// Verdicts are tolerance-based statements about the weighted-sum pairing
/// the discretization can express; each result records the tolerance used.
struct CheckResult {
    std::string name;
    bool verdict = false;
    bool applicable = true;
    double worst_margin = 0.0;  // signed; verdict true iff >= -tolerance
    int worst_node = -1;
    double tolerance = 0.0;
    std::string note;
};

struct Band {
    int lo = 0;
    int hi = 0;
};

/// Iterated-smoothed indicator bump supported in [lo, hi] (strictly
/// interior; hi must stay below the outermost node).
Field make_bump(const std::shared_ptr<const RadialGrid>& grid, int lo, int hi,
                int passes = 4);

/// Mean-value property of superharmonic fields: h ≥ P_A h on every band,
/// given (−L)h ≥ 0 certified on the interior.
CheckResult check_superharmonic(const DiscreteOperator& op, const Field& h,
                                const std::vector<Band>& bands,
                                double tol = 1e-8);

/// Band identity u = −G_A f(u) + P_A u for solver outputs (equality) or
/// the one-sided version for supersolutions.
CheckResult check_green_identity(const DiscreteOperator& op, const Nonlinearity& nl,
                                 const Field& u, const std::vector<Band>& bands,
                                 double rel_tol = 1e-5,
                                 bool expect_equality = true);

/// Comparison principle: supersolution ≥ subsolution everywhere once it
/// holds off the band; preconditions are certified and reported
/// separately from the conclusion.
CheckResult check_comparison(const DiscreteOperator& op, const Nonlinearity& nl,
                             const Field& u_super, const Field& u_sub, Band band,
                             double tol = 1e-8);

/// Distributional Kato inequality Σω|u|(−Lξ) ≤ Σω ξ sgn(u) F for
/// interior-supported bumps ξ, with (−L)u = F certified first.
CheckResult check_kato(const DiscreteOperator& op, const Field& u,
                       const Field& F_src, const std::vector<Field>& bumps,
                       double tol = 1e-8);

/// max(u,v) is a weak subsolution (and min(u,v) a supersolution) of
/// (−L)w = −f(w), tested against a battery of bumps.
CheckResult check_max_subsolution(const DiscreteOperator& op, const Nonlinearity& nl,
                                  const Field& u, const Field& v,
                                  const std::vector<Field>& bumps,
                                  double tol = 1e-8);
CheckResult check_min_supersolution(const DiscreteOperator& op, const Nonlinearity& nl,
                                    const Field& u, const Field& v,
                                    const std::vector<Field>& bumps,
                                    double tol = 1e-8);

struct BatteryOptions {
    int superharmonic_bands = 100;
    int kato_bumps = 50;
    int max_sub_bumps = 50;
    double green_band_delta_min = 0.05;
    double green_rel_tol = 1e-5;
    double tol = 1e-8;
    unsigned long long seed = 0x5eedULL;
};

/// The full verifier battery over a solve's artifacts; one aggregated
/// CheckResult per verifier family.
std::vector<CheckResult> standard_battery(const DiscreteOperator& op,
                                          const Nonlinearity& nl,
                                          const SupersolutionBundle& bundle,
                                          const SolveTrace& trace,
                                          const MartinProfile& martin,
                                          const BatteryOptions& opt = {});

}  // namespace blowup
