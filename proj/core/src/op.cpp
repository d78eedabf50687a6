#include "blowup/op.hpp"

#include "blowup/parallel.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace blowup {

namespace {

using gauss15 = boost::math::quadrature::gauss<double, 15>;

double sphere_area(int k) {  // |S^{k-1}|, sphere in R^k
    return 2.0 * std::pow(M_PI, 0.5 * k) / std::tgamma(0.5 * k);
}

double stable_kernel_amplitude(int d, double alpha) {
    // j(r) = A(d,α) r^{−d−α} for φ(λ) = λ^{α/2}
    return alpha * std::pow(2.0, alpha - 1.0) * std::pow(M_PI, -0.5 * d) *
           std::tgamma(0.5 * (d + alpha)) / std::tgamma(1.0 - 0.5 * alpha);
}

}  // namespace

JumpKernel::JumpKernel(const BernsteinSpec& spec, int dim, double r_min,
                       double r_max, const QuadOptions& quad)
    : dim_(dim) {
    if (dim < 2) throw std::invalid_argument("JumpKernel: dimension must be >= 2");
    sphere_dm2_ = sphere_area(dim - 1);
    angle_const_ = std::sqrt(M_PI) * std::tgamma(0.5 * (dim - 1)) / std::tgamma(0.5 * dim);
    if (spec.family() == "stable") {
        kind_ = 0;
        double a = spec.params().at("alpha");
        A1_ = stable_kernel_amplitude(dim, a);
        q1_ = dim + a;
    } else if (spec.family() == "sum-of-stables") {
        kind_ = 1;
        double a1 = spec.params().at("alpha1"), a2 = spec.params().at("alpha2");
        A1_ = stable_kernel_amplitude(dim, a1);
        q1_ = dim + a1;
        A2_ = stable_kernel_amplitude(dim, a2);
        q2_ = dim + a2;
    } else {
        if (!spec.has_levy_density())
            throw std::runtime_error(
                "JumpKernel: family " + spec.family() +
                " has no closed-form Levy density; kernel operations disabled");
        kind_ = 2;
        if (!(0.0 < r_min && r_min < r_max))
            throw std::invalid_argument("JumpKernel: bad distance range for cache");
        cache_ = std::make_shared<LogChebCache>(
            [&](double rho) { return levy_density_j(spec, dim, rho, quad); }, r_min,
            r_max, 24, 2);
    }
}

double JumpKernel::j(double rho) const {
    switch (kind_) {
        case 0: return A1_ * std::pow(rho, -q1_);
        case 1: return A1_ * std::pow(rho, -q1_) + A2_ * std::pow(rho, -q2_);
        default: return (*cache_)(rho);
    }
}

double JumpKernel::theta_integral(double r, double s) const {
    if (r <= 0.0 || s <= 0.0) return j(std::max(r, s)) * angle_const_;
    const double d2 = (r - s) * (r - s);
    const double m = 4.0 * r * s;
    auto f = [&](double th) {
        double sh = std::sin(0.5 * th);
        double rho = std::sqrt(d2 + m * sh * sh);
        double w = dim_ == 2 ? 1.0 : std::pow(std::sin(th), dim_ - 2);
        return j(rho) * w;
    };
    double peak = std::abs(r - s) / std::sqrt(r * s);
    if (peak >= M_PI) return gauss15::integrate(f, 0.0, M_PI);
    peak = std::max(peak, 1e-14);
    double acc = gauss15::integrate(f, 0.0, peak);
    double a = peak;
    while (a < M_PI) {
        double b = std::min(4.0 * a, M_PI);
        acc += gauss15::integrate(f, a, b);
        a = b;
    }
    return acc;
}

double JumpKernel::K(double r, double s) const {
    if (s <= 0.0) return 0.0;
    return sphere_dm2_ * std::pow(s, dim_ - 1) * theta_integral(r, s);
}

double radial_kernel(const BernsteinSpec& spec, int dim, double r, double s,
                     const QuadOptions& quad) {
    if (r < 0.0 || s < 0.0 || (r == 0.0 && s == 0.0))
        throw std::invalid_argument("radial_kernel: need r,s >= 0 and (r,s) != (0,0)");
    double lo = std::min(std::abs(r - s), std::min(r + s, 1e-6)) * 0.5;
    if (lo <= 0.0) lo = 1e-12;
    JumpKernel k(spec, dim, lo, 4.0 * (r + s) + 1.0, quad);
    return k.K(r, s);
}

// ---------------------------------------------------------------------
// assembly
// ---------------------------------------------------------------------

namespace {

// ∫_cell (s−r)^pow K(r,s) ds by fixed Gauss on a singularity-free cell
double cell_moment(const JumpKernel& k, double r, double a, double b, int pow_) {
    return boost::math::quadrature::gauss<double, 8>::integrate(
        [&](double s) {
            double w = 1.0;
            double z = s - r;
            for (int p = 0; p < pow_; ++p) w *= z;
            return w * k.K(r, s);
        },
        a, b);
}

// paired singular-cell moments on [r−h, r+h]:
//   M1 += ∫_0^h z (K(r,r+z) − K(r,r−z)) dz   (the P.V. remainder)
//   M2 += ∫_0^h z² (K(r,r+z) + K(r,r−z)) dz
std::pair<double, double> paired_moments(const JumpKernel& k, double r, double h) {
    double m1 = 0.0, m2 = 0.0;
    double b = h;
    const double floor_ = h * 1e-6;
    while (b > floor_) {
        double a = std::max(b / 4.0, floor_);
        m1 += boost::math::quadrature::gauss<double, 8>::integrate(
            [&](double z) { return z * (k.K(r, r + z) - k.K(r, r - z)); }, a, b);
        m2 += boost::math::quadrature::gauss<double, 8>::integrate(
            [&](double z) { return z * z * (k.K(r, r + z) + k.K(r, r - z)); }, a, b);
        b = a;
    }
    return {m1, m2};
}

}  // namespace

DiscreteOperator DiscreteOperator::assemble(const BernsteinSpec& spec,
                                            const BallDomain& dom,
                                            std::shared_ptr<const RadialGrid> grid,
                                            const AssembleOptions& opt) {
    if (grid->domain().dim != dom.dim || grid->domain().radius != dom.radius)
        throw std::invalid_argument("assemble: grid/domain mismatch");
    const int n = grid->size();
    if (n < 32) throw std::invalid_argument("assemble: grid too coarse (N >= 32 required)");
    const double R = dom.radius;

    const double min_gap = grid->boundary_width();
    JumpKernel kern(spec, dom.dim, 0.25 * min_gap,
                    4.0 * opt.far_cut_radii * R, opt.quad);

    DiscreteOperator op;
    op.grid_ = grid;
    op.n_ = n;
    op.b_.assign(static_cast<std::size_t>(n) * n, 0.0);
    op.kappa_.assign(static_cast<std::size_t>(n), 0.0);

    // symmetric θ-integrals Θ_ij, computed once per unordered pair
    std::vector<double> theta(static_cast<std::size_t>(n) * n, 0.0);
    parallel_for(static_cast<std::size_t>(n), opt.threads, [&](std::size_t ii) {
        int i = static_cast<int>(ii);
        for (int jj = i; jj < n; ++jj) {
            double v = kern.theta_integral(grid->node(i), grid->node(jj));
            theta[ii * n + jj] = v;
            theta[static_cast<std::size_t>(jj) * n + i] = v;
        }
    });
    const double sdm2 = sphere_area(dom.dim - 1);
    auto K_mid = [&](int i, int j) {
        return sdm2 * std::pow(grid->node(j), dom.dim - 1) *
               theta[static_cast<std::size_t>(i) * n + j];
    };

    // far-tail constant for the killing integral, fitted at far_cut·R
    const double cutR = opt.far_cut_radii * R;
    const double c_fit = kern.j(cutR) * std::pow(cutR, dom.dim) /
                         spec.phi(1.0 / (cutR * cutR));
    const double far_tail_base = [&] {
        auto f = [&](double s) {
            double x = 1.0 / (s * s);
            if (x < 1e-300) return 0.0;
            return spec.phi(x) / s;
        };
        return c_fit * sphere_area(dom.dim) *
               integrate_to_infinity(f, cutR, opt.quad);
    }();

    parallel_for(static_cast<std::size_t>(n), opt.threads, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        const double r = grid->node(i);
        double* row = op.b_.data() + ii * n;

        // interaction weights: midpoint cells far away, Gauss cells nearby;
        // the immediate neighbors are handled by the quadratic span
        // functional below, except for their outer half-cells
        const bool has_span = i >= 1 && i <= n - 2;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double c;
            if (has_span && j == i - 1)
                c = j == 0 && grid->cell_lo(j) >= grid->node(j)
                        ? 0.0
                        : cell_moment(kern, r, grid->cell_lo(j), grid->node(j), 0);
            else if (has_span && j == i + 1)
                c = cell_moment(kern, r, grid->node(j), grid->cell_hi(j), 0);
            else if (i == 0 && j == 1)
                c = cell_moment(kern, r, grid->node(1), grid->cell_hi(1), 0);
            else if (std::abs(j - i) <= opt.near_window || j == 0)
                c = cell_moment(kern, r, grid->cell_lo(j), grid->cell_hi(j), 0);
            else
                c = grid->weight(j) * K_mid(i, j);
            row[j] = -c;
        }


        // killing: ∫_R^{cut·R} K(r_i,s) ds + fitted asymptotic tail
        double kappa = 0.0;
        {
            double width = std::max(grid->delta(i), 1e-14 * R);
            double a = R;
            while (a < cutR) {
                double b = std::min(a + width, cutR);
                kappa += boost::math::quadrature::gauss<double, 8>::integrate(
                    [&](double s) { return kern.K(r, s); }, a, b);
                width = (b - a) * 2.0;
                a = b;
            }
            kappa += far_tail_base;
        }
        op.kappa_[ii] = kappa;

        // P.V. diagonal by constants annihilation
        double offsum = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) offsum -= row[j];
        row[i] = kappa + offsum;

        // quadratic compensation on the span [r_{i−1}, r_{i+1}]: the P.V.
        // part of ∫ (P₂(s) − u_i) K ds for the interpolating parabola,
        // expressed through the three-point derivative stencils
        if (i == 0) {
            double m2 = 0.0;
            double b = grid->node(1);
            const double floor_ = b * 1e-7;
            while (b > floor_) {
                double a2 = std::max(b / 4.0, floor_);
                m2 += boost::math::quadrature::gauss<double, 8>::integrate(
                    [&](double s) { return s * s * kern.K(0.0, s); }, a2, b);
                b = a2;
            }
            double r1 = grid->node(1);
            double c = 0.5 * m2 * 2.0 / (r1 * r1);  // u''(0) ≈ 2(u₁−u₀)/r₁², u'(0) = 0
            row[0] += c;
            row[1] -= c;
        } else if (i < n - 1) {
            const double hm = r - grid->node(i - 1);
            const double hp = grid->node(i + 1) - r;
            double h = std::min(hm, hp);
            auto [m1, m2] = paired_moments(kern, r, h);
            if (hp > h) {
                m1 += cell_moment(kern, r, r + h, r + hp, 1);
                m2 += cell_moment(kern, r, r + h, r + hp, 2);
            } else if (hm > h) {
                m1 += cell_moment(kern, r, r - hm, r - h, 1);
                m2 += cell_moment(kern, r, r - hm, r - h, 2);
            }
            const double d1[3] = {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp),
                                  hm / (hp * (hm + hp))};
            const double d2[3] = {2.0 / (hm * (hm + hp)), -2.0 / (hm * hp),
                                  2.0 / (hp * (hm + hp))};
            for (int t = 0; t < 3; ++t)
                row[i - 1 + t] -= m1 * d1[t] + 0.5 * m2 * d2[t];
        }
    });

    // make the volume-weighted operator exactly symmetric (the pairing the
    // verifiers integrate by parts with), then restore the constants
    // identity B·1 = κ through the diagonal
    for (int i = 0; i < n; ++i) {
        double wi = grid->volume_weight(i);
        for (int j = i + 1; j < n; ++j) {
            double wj = grid->volume_weight(j);
            double s = 0.5 * (wi * op.b_[static_cast<std::size_t>(i) * n + j] +
                              wj * op.b_[static_cast<std::size_t>(j) * n + i]);
            op.b_[static_cast<std::size_t>(i) * n + j] = s / wi;
            op.b_[static_cast<std::size_t>(j) * n + i] = s / wj;
        }
    }
    for (int i = 0; i < n; ++i) {
        double offsum = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) offsum += op.b_[static_cast<std::size_t>(i) * n + j];
        op.b_[static_cast<std::size_t>(i) * n + i] = op.kappa_[static_cast<std::size_t>(i)] - offsum;
    }

    auto bad = op.sign_violations();
    if (!bad.empty()) {
        std::string rows;
        for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 8); ++k)
            rows += (k ? "," : "") + std::to_string(bad[k]);
        throw std::runtime_error("assemble: M-matrix sign structure violated at rows " +
                                 rows + (bad.size() > 8 ? ",..." : ""));
    }
    op.factor_ = std::make_shared<Factor>();
    return op;
}

DiscreteOperator DiscreteOperator::from_parts(std::shared_ptr<const RadialGrid> grid,
                                              std::vector<double> matrix,
                                              std::vector<double> kappa) {
    DiscreteOperator op;
    const int n = grid->size();
    if (matrix.size() != static_cast<std::size_t>(n) * n ||
        kappa.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("from_parts: size mismatch");
    op.grid_ = std::move(grid);
    op.n_ = n;
    op.b_ = std::move(matrix);
    op.kappa_ = std::move(kappa);
    op.factor_ = std::make_shared<Factor>();
    return op;
}

std::vector<double> DiscreteOperator::apply_raw(const std::vector<double>& u) const {
    if (u.size() != static_cast<std::size_t>(n_))
        throw std::invalid_argument("apply: size mismatch");
    std::vector<double> out(static_cast<std::size_t>(n_));
    Eigen::Map<const Eigen::MatrixXd> B(b_.data(), n_, n_);  // column-major view of row-major = Bᵀ
    Eigen::Map<const Eigen::VectorXd> x(u.data(), n_);
    Eigen::Map<Eigen::VectorXd> y(out.data(), n_);
    y = B.transpose() * x;
    return out;
}

Field DiscreteOperator::apply(const Field& u) const {
    return Field(grid_, apply_raw(u.values()));
}

std::vector<double> DiscreteOperator::adjoint_apply(const std::vector<double>& v) const {
    if (v.size() != static_cast<std::size_t>(n_))
        throw std::invalid_argument("adjoint_apply: size mismatch");
    std::vector<double> wv(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) wv[static_cast<std::size_t>(i)] = grid_->volume_weight(i) * v[static_cast<std::size_t>(i)];
    std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
        const double* row = b_.data() + static_cast<std::size_t>(i) * n_;
        const double wvi = wv[static_cast<std::size_t>(i)];
        for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(j)] += row[j] * wvi;
    }
    for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(j)] /= grid_->volume_weight(j);
    return out;
}

struct DiscreteOperator::Factor {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    std::once_flag built;
};

const DiscreteOperator::Factor& DiscreteOperator::factor() const {
    std::call_once(factor_->built, [&] {
        Eigen::Map<const Eigen::MatrixXd> Bt(b_.data(), n_, n_);
        factor_->lu.compute(Bt.transpose());
    });
    return *factor_;
}

Field DiscreteOperator::green_apply(const Field& g) const {
    Eigen::Map<const Eigen::VectorXd> rhs(g.values().data(), n_);
    Eigen::VectorXd h = factor().lu.solve(rhs);
    if (!h.allFinite()) throw std::runtime_error("green_apply: singular system");
    return Field(grid_, std::vector<double>(h.data(), h.data() + n_));
}

Field DiscreteOperator::green_band(int lo, int hi, const Field& g) const {
    if (lo < 0 || hi >= n_ || lo > hi)
        throw std::invalid_argument("green_band: bad band");
    const int m = hi - lo + 1;
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = entry(lo + i, lo + j);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) rhs(i) = g[lo + i];
    Eigen::VectorXd x = A.partialPivLu().solve(rhs);
    Field out = Field::zeros(grid_);
    for (int i = 0; i < m; ++i) out[lo + i] = x(i);
    return out;
}

Field DiscreteOperator::harmonic_lift(int lo, int hi, const Field& data,
                                      double exterior_value) const {
    if (lo < 0 || hi >= n_ || lo > hi)
        throw std::invalid_argument("harmonic_lift: bad band");
    for (int j = 0; j < n_; ++j)
        if ((j < lo || j > hi) && !std::isfinite(data[j]))
            throw std::invalid_argument("harmonic_lift: non-finite data off the band");
    const int m = hi - lo + 1;
    Eigen::MatrixXd A(m, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
        const int gi = lo + i;
        const double* row = b_.data() + static_cast<std::size_t>(gi) * n_;
        rhs(i) = kappa_[static_cast<std::size_t>(gi)] * exterior_value;
        for (int j = 0; j < n_; ++j) {
            if (j >= lo && j <= hi) continue;
            rhs(i) -= row[j] * data[j];
        }
        for (int j = 0; j < m; ++j) A(i, j) = row[lo + j];
    }
    Eigen::VectorXd x = A.partialPivLu().solve(rhs);
    Field out = data;
    for (int i = 0; i < m; ++i) out[lo + i] = x(i);
    return out;
}

std::vector<int> DiscreteOperator::sign_violations() const {
    std::vector<int> rows;
    for (int i = 0; i < n_; ++i) {
        const double* row = b_.data() + static_cast<std::size_t>(i) * n_;
        bool bad = !(row[i] > 0.0);
        double scale = std::abs(row[i]);
        for (int j = 0; j < n_ && !bad; ++j)
            if (j != i && row[j] > 1e-12 * scale) bad = true;
        if (bad) rows.push_back(i);
    }
    return rows;
}

Field martin_surrogate(const std::shared_ptr<const RadialGrid>& grid,
                       const RenewalSurrogate& sur) {
    std::vector<double> v(static_cast<std::size_t>(grid->size()));
    for (int i = 0; i < grid->size(); ++i)
        v[static_cast<std::size_t>(i)] = sur.vstar(grid->delta(i));
    return Field(grid, std::move(v));
}

MartinProfile discrete_martin_profile(const DiscreteOperator& op,
                                      const RenewalSurrogate& sur,
                                      double calib_delta_fraction) {
    const auto& grid = op.grid();
    const int n = op.size();
    Field e = Field::zeros(op.grid_ptr());
    e[n - 1] = 1.0;
    Field raw = op.green_apply(e);
    int ref = grid.index_near_delta(calib_delta_fraction * grid.domain().radius);
    double target = 1.0 / sur.vstar(grid.delta(ref));
    if (!(raw[ref] > 0.0))
        throw std::runtime_error("discrete_martin_profile: Green column not positive");
    double scale = target / raw[ref];
    for (int i = 0; i < n; ++i) raw[i] *= scale;
    MartinProfile mp{std::move(raw), std::vector<double>(static_cast<std::size_t>(n), 0.0),
                     n - 1, scale};
    mp.source[static_cast<std::size_t>(n - 1)] = scale;
    return mp;
}

}  // namespace blowup
