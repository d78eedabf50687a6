#pragma once

#include "blowup/bernstein.hpp"
#include "blowup/nonlinearity.hpp"

#include <string>

namespace blowup {

/// Convergence/divergence of improper integrals is decided from fitted
/// local power behavior with explicit margins; fits inside the margin of
/// the critical exponent are reported indeterminate, never guessed.
enum class Verdict { holds, fails, indeterminate };

const char* to_string(Verdict v);

struct ConditionOptions {
    double margin = 0.05;          // exponent margin around critical values
    double ko_t_max = 1e8;         // KO integrand sampled on [1, ko_t_max]
    int per_decade = 16;
    double ko_refined_R = 10.0;    // ratio window [R, r_max]
    double ko_refined_r_max = 1e5;
    double kato_eps_min = 1e-6;    // ε grid for the kato-m head ratio
    double kato_eps_max = 1.0;
    int kato_n = 25;
    double growth_s_max = 1e10;
    double int_node_ratio = 1.05;  // geometric grading of the 0-end nodes
};

struct KoIntegralResult {
    Verdict verdict = Verdict::indeterminate;
    double tail_exponent = 0.0;   // fitted log-log slope at the top decade
    double partial_integral = 0.0;
};

struct KoRefinedResult {
    Verdict verdict = Verdict::indeterminate;
    double c1 = 0.0;              // observed sup of the tail/rg ratio
    double r_lo = 0.0, r_hi = 0.0;
    std::string note;
};

struct KatoMResult {
    Verdict verdict = Verdict::indeterminate;
    double sup_ratio = 0.0;
    double head_exponent = 0.0;
};

struct GrowthResult {
    Verdict verdict = Verdict::indeterminate;
    double trend_exponent = 0.0;  // fitted slope of the boundary-growth function
};

struct IntCriterionResult {
    Verdict verdict = Verdict::indeterminate;
    double integral = 0.0;
    double head_exponent = 0.0;
};

struct ConditionReport {
    ScalingReport scaling;
    F1Report f1;
    KoIntegralResult ko;
    KoRefinedResult ko_refined;
    KatoMResult kato_m;
    GrowthResult growth;
    IntCriterionResult int_criterion;
    bool admissible = false;
    std::string reason;  // first obstruction when not admissible
};

/// KO integrand g(t) = (φ^{−1}(varphi(t)^{−2}))^{−1/2}; verdict from the
/// fitted decay exponent against the critical value −1.
KoIntegralResult check_ko_integral(const BernsteinSpec& spec,
                                   const Nonlinearity& nl,
                                   const ConditionOptions& opt = {});

/// ρ(r) = [∫_r^∞ g]/[r g(r)] on a geometric r-grid; holds when the running
/// sup stabilizes (< 1% growth over the top decade).  C₁ = observed sup.
KoRefinedResult check_ko_refined(const BernsteinSpec& spec, const Nonlinearity& nl,
                                 double R, double r_max,
                                 const ConditionOptions& opt = {});

/// Head-ratio ∫_0^ε φ(t^{−2})^{1/m} dt / [ε φ(ε^{−2})^{1/m}] bounded in ε.
KatoMResult check_kato_m_sufficient(const BernsteinSpec& spec,
                                    const Nonlinearity& nl,
                                    const ConditionOptions& opt = {});

/// G(s) = V^{−1}(√(s/f(s)))·√(s f(s)) diverges (fitted slope ≥ margin).
GrowthResult check_growth(const BernsteinSpec& spec, const Nonlinearity& nl,
                          const ConditionOptions& opt = {});

/// ∫_0^1 V(t) f(V(t)/t) dt with geometric grading toward 0 and a fitted
/// power extrapolation of the head.
IntCriterionResult check_int_criterion(const BernsteinSpec& spec,
                                       const Nonlinearity& nl,
                                       const ConditionOptions& opt = {});

/// Runs the whole suite; admissible = f1 ∧ KO_refined ∧ growth ∧
/// int-criterion (all `holds`).  Component errors mark the affected
/// verdict indeterminate and surface in `reason`.
ConditionReport full_report(const BernsteinSpec& spec, const Nonlinearity& nl,
                            const ConditionOptions& opt = {});

}  // namespace blowup
