#include "blowup/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blowup {

namespace {

double stable_nu_coeff(double beta) {
    // ν(s) = c s^{−1−β} reproduces φ(λ) = λ^β when c = β/Γ(1−β).
    return beta / std::tgamma(1.0 - beta);
}

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("BernsteinSpec: alpha must lie in (0,2)");
}

}  // namespace

BernsteinSpec BernsteinSpec::stable(double alpha) {
    require_alpha(alpha);
    const double b = alpha / 2.0;
    const double c = stable_nu_coeff(b);
    BernsteinSpec s;
    s.family_ = "stable";
    s.params_ = {{"alpha", alpha}};
    s.phi_ = [b](double t) { return std::pow(t, b); };
    s.phi_prime_ = [b](double t) { return b * std::pow(t, b - 1.0); };
    s.nu_ = [c, b](double t) { return c * std::pow(t, -1.0 - b); };
    s.validate();
    return s;
}

BernsteinSpec BernsteinSpec::relativistic_stable(double alpha) {
    require_alpha(alpha);
    const double b = alpha / 2.0;
    const double c = stable_nu_coeff(b);
    BernsteinSpec s;
    s.family_ = "relativistic-stable";
    s.params_ = {{"alpha", alpha}};
    // expm1/log1p keep (1+t)^β − 1 fully accurate for small t
    s.phi_ = [b](double t) { return std::expm1(b * std::log1p(t)); };
    s.phi_prime_ = [b](double t) { return b * std::pow(t + 1.0, b - 1.0); };
    s.nu_ = [c, b](double t) { return c * std::pow(t, -1.0 - b) * std::exp(-t); };
    s.validate();
    return s;
}

BernsteinSpec BernsteinSpec::sum_of_stables(double alpha1, double alpha2) {
    require_alpha(alpha1);
    require_alpha(alpha2);
    const double b1 = alpha1 / 2.0, b2 = alpha2 / 2.0;
    const double c1 = stable_nu_coeff(b1), c2 = stable_nu_coeff(b2);
    BernsteinSpec s;
    s.family_ = "sum-of-stables";
    s.params_ = {{"alpha1", alpha1}, {"alpha2", alpha2}};
    s.phi_ = [b1, b2](double t) { return std::pow(t, b1) + std::pow(t, b2); };
    s.phi_prime_ = [b1, b2](double t) {
        return b1 * std::pow(t, b1 - 1.0) + b2 * std::pow(t, b2 - 1.0);
    };
    s.nu_ = [c1, b1, c2, b2](double t) {
        return c1 * std::pow(t, -1.0 - b1) + c2 * std::pow(t, -1.0 - b2);
    };
    s.validate();
    return s;
}

BernsteinSpec BernsteinSpec::custom(std::string name,
                                    std::function<double(double)> phi,
                                    std::function<double(double)> phi_prime,
                                    std::function<double(double)> levy_density) {
    if (!phi) throw std::invalid_argument("BernsteinSpec::custom: phi required");
    BernsteinSpec s;
    s.family_ = "custom:" + name;
    s.phi_ = std::move(phi);
    if (phi_prime) {
        s.phi_prime_ = std::move(phi_prime);
    } else {
        auto f = s.phi_;
        s.phi_prime_ = [f](double t) { return fd_derivative(f, t); };
    }
    s.nu_ = std::move(levy_density);
    s.validate();
    return s;
}

double BernsteinSpec::phi(double lambda) const {
    if (!(lambda > 0.0))
        throw std::invalid_argument("BernsteinSpec::phi: lambda must be positive");
    double v = phi_(lambda);
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::runtime_error("BernsteinSpec::phi: non-positive value at lambda=" +
                                 std::to_string(lambda));
    return v;
}

double BernsteinSpec::phi_prime(double lambda) const {
    if (!(lambda > 0.0))
        throw std::invalid_argument("BernsteinSpec::phi_prime: lambda must be positive");
    return phi_prime_(lambda);
}

double BernsteinSpec::levy_density(double s) const {
    if (!nu_)
        throw std::runtime_error("BernsteinSpec: no closed-form Levy density for family " +
                                 family_);
    if (!(s > 0.0))
        throw std::invalid_argument("BernsteinSpec::levy_density: s must be positive");
    return nu_(s);
}

BernsteinSpec BernsteinSpec::conjugate() const {
    if (is_stable()) return stable(2.0 - params_.at("alpha"));
    BernsteinSpec s;
    s.family_ = "conjugate(" + family_ + ")";
    s.params_ = params_;
    auto f = phi_;
    auto fp = phi_prime_;
    s.phi_ = [f](double t) {
        double v = f(t);
        if (!(v > 0.0)) throw std::runtime_error("conjugate: phi(s) = 0 at sampled s");
        return t / v;
    };
    s.phi_prime_ = [f, fp](double t) {
        double v = f(t);
        return (v - t * fp(t)) / (v * v);
    };
    // when φ'(0+) is finite the conjugate picks up a killing value
    // φ*(0+) = 1/φ'(0+); only the monotonicity/concavity checks apply
    s.validate_monotone_concave();
    return s;
}

void BernsteinSpec::validate() const {
    // φ(0+) = 0 (zero drift) and strict monotonicity / concavity on a grid.
    double near_zero = phi_(1e-30);
    if (!std::isfinite(near_zero) || near_zero < 0.0 ||
        !(near_zero < 0.1 * phi_(1.0)) || !(near_zero < phi_(1e-10)))
        throw std::invalid_argument("BernsteinSpec: phi(0+) != 0 for family " + family_);
    validate_monotone_concave();
}

void BernsteinSpec::validate_monotone_concave() const {
    auto grid = geometric_grid(1e-6, 1e6, 4);
    double prev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = phi_(grid[i]);
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("BernsteinSpec: phi not positive on sample grid");
        if (v <= prev)
            throw std::invalid_argument("BernsteinSpec: phi not strictly increasing");
        prev = v;
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double a = grid[i], b = grid[i + 1];
        double mid = 0.5 * (a + b);
        double lhs = phi_(mid);
        double rhs = 0.5 * (phi_(a) + phi_(b));
        if (lhs < rhs * (1.0 - 5e-9))  // slack covers evaluator rounding
            throw std::invalid_argument("BernsteinSpec: phi fails midpoint concavity");
    }
    if (nu_) {
        prev = std::numeric_limits<double>::infinity();
        for (double s : geometric_grid(1e-6, 1e3, 4)) {
            double v = nu_(s);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("BernsteinSpec: nu not nonnegative");
            if (v > prev * (1.0 + 1e-12))
                throw std::invalid_argument("BernsteinSpec: nu not nonincreasing");
            prev = v;
        }
    }
}

ScalingReport estimate_scaling(const BernsteinSpec& spec, double t_min,
                               double t_max, int lattice_size) {
    if (!(t_min >= 1.0 && t_min < t_max))
        throw std::invalid_argument("estimate_scaling: need 1 <= t_min < t_max");
    if (lattice_size < 8)
        throw std::invalid_argument("estimate_scaling: lattice size must be >= 8");

    ScalingReport rep;
    rep.t_min = t_min;
    rep.t_max = t_max;
    rep.lattice_size = lattice_size;

    const int n = lattice_size;
    const double lmax = t_max / t_min;
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = -dmin;
    struct Node {
        double lambda, ratio;
    };
    std::vector<Node> samples;
    samples.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        // λ strictly > 1, log-spaced up to t_max/t_min
        double lambda = std::exp(std::log(lmax) * (i + 1) / n);
        for (int k = 0; k < n; ++k) {
            double thi = t_max / lambda;
            if (thi <= t_min) break;
            double t = t_min * std::exp(std::log(thi / t_min) * k / std::max(1, n - 1));
            double ratio = spec.phi(lambda * t) / spec.phi(t);
            if (!std::isfinite(ratio) || !(ratio > 0.0))
                throw std::runtime_error("estimate_scaling: non-finite phi ratio");
            double slope = std::log(ratio) / std::log(lambda);
            dmin = std::min(dmin, slope);
            dmax = std::max(dmax, slope);
            samples.push_back({lambda, ratio});
        }
    }
    rep.delta1 = dmin;
    rep.delta2 = dmax;
    double a1 = std::numeric_limits<double>::infinity(), a2 = 0.0;
    for (const auto& s : samples) {
        a1 = std::min(a1, s.ratio / std::pow(s.lambda, rep.delta1));
        a2 = std::max(a2, s.ratio / std::pow(s.lambda, rep.delta2));
    }
    rep.a1 = a1;
    rep.a2 = a2;
    bool in_band = true;
    for (const auto& s : samples) {
        double lo = rep.a1 * std::pow(s.lambda, rep.delta1);
        double hi = rep.a2 * std::pow(s.lambda, rep.delta2);
        if (s.ratio < lo * (1.0 - 1e-12) || s.ratio > hi * (1.0 + 1e-12)) {
            in_band = false;
            break;
        }
    }
    rep.verdict = in_band && rep.delta1 > 0.0 && rep.delta1 <= rep.delta2 &&
                  rep.delta2 < 1.0;
    return rep;
}

std::pair<double, double> check_phi_prime_ratio(const BernsteinSpec& spec,
                                                double T, int n) {
    if (!(T > 1.0)) throw std::invalid_argument("check_phi_prime_ratio: T must exceed 1");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < n; ++i) {
        double t = std::exp(std::log(T) * i / (n - 1));
        double v = t * spec.phi_prime(t) / spec.phi(t);
        if (!std::isfinite(v))
            throw std::runtime_error("check_phi_prime_ratio: non-finite ratio");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

double levy_density_j(const BernsteinSpec& spec, int d, double r,
                      const QuadOptions& opt) {
    if (d < 2) throw std::invalid_argument("levy_density_j: dimension must be >= 2");
    if (!(r > 0.0)) throw std::invalid_argument("levy_density_j: r must be positive");
    if (!spec.has_levy_density())
        throw std::runtime_error("levy_density_j: family " + spec.family() +
                                 " has no closed-form Levy density");
    const double split = r * r / 4.0;
    auto integrand = [&](double s) {
        return std::pow(4.0 * M_PI * s, -0.5 * d) * std::exp(-r * r / (4.0 * s)) *
               spec.levy_density(s);
    };
    // head: s = r²/(4w), w ∈ [1,∞); the Gaussian factor becomes e^{−w}
    auto head = [&](double w) { return integrand(split / w) * split / (w * w); };
    double h = integrate_to_infinity(head, 1.0, opt);
    double t = integrate_to_infinity(integrand, split, opt);
    return h + t;
}

std::pair<double, double> check_j_asymptotics(const BernsteinSpec& spec, int d,
                                              double r_lo, double r_hi, int n,
                                              const QuadOptions& opt) {
    if (!(0.0 < r_lo && r_lo < r_hi && r_hi <= 1.0))
        throw std::invalid_argument("check_j_asymptotics: grid must lie in (0,1]");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = r_lo * std::exp(std::log(r_hi / r_lo) * i / (n - 1));
        double ratio = levy_density_j(spec, d, r, opt) * std::pow(r, d) /
                       spec.phi(1.0 / (r * r));
        if (!std::isfinite(ratio) || !(ratio > 0.0))
            throw std::runtime_error("check_j_asymptotics: ratio diverged on grid");
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {lo, hi};
}

RenewalSurrogate::RenewalSurrogate(BernsteinSpec spec)
    : spec_(std::move(spec)), exact_(spec_.is_stable()) {}

double RenewalSurrogate::V(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("RenewalSurrogate::V: t must be positive");
    if (exact_) return std::pow(t, 0.5 * spec_.params().at("alpha"));
    return 1.0 / std::sqrt(spec_.phi(1.0 / (t * t)));
}

double RenewalSurrogate::V_inverse(double y) const {
    if (!(y > 0.0))
        throw std::invalid_argument("RenewalSurrogate::V_inverse: y must be positive");
    if (exact_) return std::pow(y, 2.0 / spec_.params().at("alpha"));
    return monotone_inverse([this](double t) { return V(t); }, y, /*increasing=*/true);
}

RenewalSurrogate renewal_surrogate(const BernsteinSpec& spec) {
    auto rep = estimate_scaling(spec, 1.0, 1e6, 32);
    if (!rep.verdict)
        throw std::runtime_error("renewal_surrogate: scaling verdict failed for family " +
                                 spec.family());
    return RenewalSurrogate(spec);
}

}  // namespace blowup
