#pragma once

#include "blowup/numerics.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace blowup {

/// Source-term class: increasing C¹ f with f(0) = 0 and
/// (1+m) f(t) ≤ t f′(t) ≤ (1+M) f(t) on (0,∞), together with the derived
/// transforms F(t) = ∫_0^t f, varphi(t) = ∫_t^∞ F^{−1/2} and its inverse ψ.
/// f is defined on [0,∞) only; negative arguments throw.  Immutable and
/// safe to share across threads.
class Nonlinearity {
public:
    /// f(t) = t^p, p > 1; m = M = p − 1.
    static Nonlinearity power(double p);

    /// f given by an expression in the single variable t built from
    /// numbers, + - * / ^ ( ), log, exp, sqrt.  Exponent bounds are
    /// estimated on a wide log grid at construction.
    static Nonlinearity custom(const std::string& expression);

    double f(double t) const;
    double f_prime(double t) const;
    double exponent_m() const { return m_; }
    double exponent_M() const { return M_; }
    const std::string& family() const { return family_; }
    const std::string& expression() const { return expression_; }
    double power_exponent() const;  // only for the power family

    /// F(t) = ∫_0^t f (closed form for the power family, adaptive
    /// quadrature otherwise).
    double antiderivative_F(double t) const;

    /// varphi(t) = ∫_t^∞ F(s)^{−1/2} ds; the improper tail is cut at an
    /// adaptively chosen T where the majorant from F(s) ≥ F(T)(s/T)^{2+m}
    /// contributes below 1e−12 relative.
    double varphi(double t) const;

    /// Inverse of varphi by bracketing root search (relative tol 1e−12).
    double psi(double t) const;

private:
    Nonlinearity() = default;
    double F_for_transform(double s) const;  // cached route used inside varphi

    std::string family_;
    std::string expression_;
    double p_ = 0.0;  // power family only
    std::function<double(double)> f_;
    std::function<double(double)> fp_;
    double m_ = 0.0, M_ = 0.0;
    std::shared_ptr<LogChebCache> f_cache_;  // custom family: cache of F
};

struct F1Report {
    double m_hat = 0.0;
    double M_hat = 0.0;
    bool verdict = false;
};

/// m̂ = min t f′/f − 1, M̂ = max − 1 over a positive grid (size ≥ 16).
F1Report check_f1(const Nonlinearity& nl, std::span<const double> grid);

struct TransformReport {
    struct Bound {
        std::string name;
        double worst_margin = 0.0;  // signed; >= 0 passes
        bool pass = false;
    };
    std::vector<Bound> checks;
    double f2_ratio_min = 0.0;  // min/max of sqrt(t/f(t))/varphi(t)
    double f2_ratio_max = 0.0;
    bool verdict = false;
};

/// Grid verification of the varphi/ψ derivative bounds and the two ψ
/// monotonicity consequences of eq-f1-type control.
TransformReport check_transform_properties(const Nonlinearity& nl,
                                           std::span<const double> grid);

}  // namespace blowup
