#pragma once

#include "blowup/bernstein.hpp"
#include "blowup/domain.hpp"
#include "blowup/numerics.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace blowup {

struct AssembleOptions {
    QuadOptions quad{1e-8, 15};
    int near_window = 3;        // cells around the diagonal integrated sub-cell
    int threads = 0;            // 0 = hardware
    double far_cut_radii = 30.0;  // killing tail switches to the fitted
                                  // asymptotic beyond far_cut_radii * R
};

/// Radially reduced kernel K(r,s) = |S^{d−2}| s^{d−1} ∫_0^π j(ρ(θ)) sin^{d−2}θ dθ,
/// ρ(θ)² = (r−s)² + 4 r s sin²(θ/2), so that for radial u
///   Lu(r e₁) = P.V. ∫_0^∞ (u(s) − u(r)) K(r,s) ds.
/// Closed-form j for the stable families; cached quadrature of the heat
/// representation otherwise.
class JumpKernel {
public:
    JumpKernel(const BernsteinSpec& spec, int dim, double r_min, double r_max,
               const QuadOptions& quad = {});

    double j(double rho) const;
    double theta_integral(double r, double s) const;
    double K(double r, double s) const;
    int dim() const { return dim_; }

private:
    int dim_ = 2;
    int kind_ = 0;  // 0: single power, 1: two powers, 2: cached quadrature
    double A1_ = 0.0, q1_ = 0.0, A2_ = 0.0, q2_ = 0.0;
    std::shared_ptr<const LogChebCache> cache_;
    double sphere_dm2_ = 0.0;  // |S^{d-2}|
    double angle_const_ = 0.0;  // ∫_0^π sin^{d-2}
};

/// One-shot evaluation of the radial kernel (assembly uses a shared
/// JumpKernel instead).
double radial_kernel(const BernsteinSpec& spec, int dim, double r, double s,
                     const QuadOptions& quad = {});

/// Dense matrix B ≈ −L acting on nodal values of radial functions extended
/// by 0 outside the ball.  Construction enforces the constants identity
/// B·1 = κ exactly (P.V. diagonal by cancellation) and applies a
/// second-order Taylor compensation on the singular cell.
class DiscreteOperator {
public:
    static DiscreteOperator assemble(const BernsteinSpec& spec, const BallDomain& dom,
                                     std::shared_ptr<const RadialGrid> grid,
                                     const AssembleOptions& opt = {});
    /// Rebuild from serialized parts (cache path); no quadrature involved.
    static DiscreteOperator from_parts(std::shared_ptr<const RadialGrid> grid,
                                       std::vector<double> matrix,
                                       std::vector<double> kappa);

    int size() const { return n_; }
    const RadialGrid& grid() const { return *grid_; }
    const std::shared_ptr<const RadialGrid>& grid_ptr() const { return grid_; }
    double entry(int i, int j) const { return b_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<double>& matrix() const { return b_; }
    const std::vector<double>& kappa() const { return kappa_; }

    Field apply(const Field& u) const;  // (−L)u
    std::vector<double> apply_raw(const std::vector<double>& u) const;
    /// W^{−1} Bᵀ W v with W the shell-volume weights (the pairing adjoint).
    std::vector<double> adjoint_apply(const std::vector<double>& v) const;

    /// Solves B h = g (zero exterior).  Maximum principle: g ≥ 0 ⇒ h ≥ 0.
    Field green_apply(const Field& g) const;
    /// Band-restricted Green operator G_A on nodes [lo,hi]; zero off-band.
    Field green_band(int lo, int hi, const Field& g) const;
    /// Discrete harmonic lift P_A: B h = κ·exterior_value on [lo,hi],
    /// h = data off the band.
    Field harmonic_lift(int lo, int hi, const Field& data,
                        double exterior_value = 0.0) const;

    /// Rows violating the M-matrix sign structure (empty when clean).
    std::vector<int> sign_violations() const;

private:
    DiscreteOperator() = default;
    struct Factor;
    const Factor& factor() const;

    std::shared_ptr<const RadialGrid> grid_;
    int n_ = 0;
    std::vector<double> b_;      // row-major n×n
    std::vector<double> kappa_;
    mutable std::shared_ptr<Factor> factor_;
};

/// Field x ↦ V*(δ(x)) — the comparability-class representative of the
/// boundary decay of the conjugate renewal function.  Its reciprocal is the
/// moderate blow-up bound used for rate work.
Field martin_surrogate(const std::shared_ptr<const RadialGrid>& grid,
                       const RenewalSurrogate& sur);

/// Martin-potential representative for the solver: the discrete Green
/// potential of a unit source at the outermost node, calibrated to
/// 1/V*(δ) at a reference depth.  By construction B·field = scale·e_last,
/// so the field is discretely harmonic on every interior band.
struct MartinProfile {
    Field field;
    std::vector<double> source;    // B·field, supported at source_node
    int source_node = -1;
    double source_scale = 0.0;
};

MartinProfile discrete_martin_profile(const DiscreteOperator& op,
                                      const RenewalSurrogate& sur,
                                      double calib_delta_fraction = 0.01);

}  // namespace blowup
