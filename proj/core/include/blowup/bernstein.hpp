#pragma once

#include "blowup/numerics.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace blowup {

/// A complete Bernstein function φ with zero drift, optionally carrying its
/// subordinator Lévy density ν in closed form.  Instances are immutable and
/// safe to share across threads.
///
/// Families:
///   stable               φ(λ) = λ^{α/2},             ν(s) = (β/Γ(1−β)) s^{−1−β}, β = α/2
///   relativistic-stable  φ(λ) = (λ+1)^{α/2} − 1,     ν(s) = (β/Γ(1−β)) s^{−1−β} e^{−s}
///   sum-of-stables       φ(λ) = λ^{α₁/2} + λ^{α₂/2}
///   custom               user evaluators; ν optional
class BernsteinSpec {
public:
    static BernsteinSpec stable(double alpha);
    static BernsteinSpec relativistic_stable(double alpha);
    static BernsteinSpec sum_of_stables(double alpha1, double alpha2);
    static BernsteinSpec custom(std::string name,
                                std::function<double(double)> phi,
                                std::function<double(double)> phi_prime = {},
                                std::function<double(double)> levy_density = {});

    double phi(double lambda) const;
    double phi_prime(double lambda) const;

    bool has_levy_density() const { return static_cast<bool>(nu_); }
    double levy_density(double s) const;

    /// φ*(s) = s/φ(s).  For the stable family returns stable(2−α), which
    /// again carries a closed-form ν; otherwise a derived custom spec.
    BernsteinSpec conjugate() const;

    const std::string& family() const { return family_; }
    const std::map<std::string, double>& params() const { return params_; }
    bool is_stable() const { return family_ == "stable"; }

private:
    BernsteinSpec() = default;
    void validate() const;  // grid checks of the Bernstein invariants
    void validate_monotone_concave() const;

    std::string family_;
    std::map<std::string, double> params_;
    std::function<double(double)> phi_;
    std::function<double(double)> phi_prime_;
    std::function<double(double)> nu_;
};

struct ScalingReport {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    int lattice_size = 0;
    bool verdict = false;
};

/// Log-log secant slopes of φ(λt)/φ(t) over a (λ,t) lattice with λ > 1,
/// t ≥ t_min; δ₁/δ₂ are the extreme slopes, a₁/a₂ the matching comparability
/// constants.  Verdict requires 0 < δ₁ ≤ δ₂ < 1 and the two-sided bound to
/// hold on the whole lattice.
ScalingReport estimate_scaling(const BernsteinSpec& spec, double t_min,
                               double t_max, int lattice_size);

/// (min, max) of t·φ′(t)/φ(t) over a log grid on [1, T]; both lie in (0, 1]
/// for a valid Bernstein function.
std::pair<double, double> check_phi_prime_ratio(const BernsteinSpec& spec,
                                                double T, int n = 129);

/// j(r) = ∫_0^∞ (4πs)^{−d/2} e^{−r²/(4s)} ν(s) ds by adaptive quadrature,
/// split at the Gaussian-peak scale s = r²/4 with the head mapped through
/// s = r²/(4w).
double levy_density_j(const BernsteinSpec& spec, int d, double r,
                      const QuadOptions& opt = {});

/// (min, max) of j(r)·r^d/φ(r^{−2}) over a log grid in (r_lo, r_hi] ⊂ (0,1].
std::pair<double, double> check_j_asymptotics(const BernsteinSpec& spec, int d,
                                              double r_lo, double r_hi,
                                              int n = 33,
                                              const QuadOptions& opt = {});

/// Renewal-function surrogate Φ(t) = φ(t^{−2})^{−1/2} (exact V for the
/// stable family) together with the conjugate surrogate t ↦ t/Φ(t).
class RenewalSurrogate {
public:
    explicit RenewalSurrogate(BernsteinSpec spec);

    double V(double t) const;
    double vstar(double t) const { return t / V(t); }
    double V_inverse(double y) const;
    bool exact_v() const { return exact_; }
    const BernsteinSpec& spec() const { return spec_; }

private:
    BernsteinSpec spec_;
    bool exact_ = false;
};

/// Requires a passing scaling verdict on the default window [1, 10⁶].
RenewalSurrogate renewal_surrogate(const BernsteinSpec& spec);

}  // namespace blowup
