#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

struct QuadOptions {
    double rel_tol = 1e-8;
    int max_depth = 15;
};

// Adaptive Gauss-Kronrod on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

// ∫_a^∞ f, a > 0.  Uses the substitution s = a/v on (0,1]; suitable for
// power-law or faster decay.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadOptions& opt = {});

// ∫_0^b f where f may have an integrable endpoint singularity at 0.
double integrate_from_zero(const std::function<double(double)>& f, double b,
                           const QuadOptions& opt = {});

// Non-adaptive Gauss-Legendre (n = 8) on [a,b]; for smooth integrands on
// short cells where adaptivity is wasted.
double gauss8(const std::function<double(double)>& f, double a, double b);

// Richardson-extrapolated central difference, scale-aware step.
double fd_derivative(const std::function<double(double)>& f, double x);

// Solves f(x) = y for monotone f by geometric bracket expansion from
// x_seed inside [1e-300, 1e300] followed by TOMS 748.  Throws
// std::runtime_error when no bracket exists in that range.
double monotone_inverse(const std::function<double(double)>& f, double y,
                        bool increasing, double x_seed = 1.0,
                        double rel_tol = 1e-12);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

// Least-squares line through (x_i, y_i).
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

// Least-squares slope of log y against log x; all inputs must be positive.
LineFit fit_log_slope(std::span<const double> xs, std::span<const double> ys);

// Per-decade Chebyshev interpolant of log f(exp u) for a positive function
// on [lo, hi]; used to cache expensive kernel/antiderivative evaluations.
class LogChebCache {
public:
    LogChebCache() = default;
    LogChebCache(const std::function<double(double)>& f, double lo, double hi,
                 int degree = 24, int segments_per_decade = 1);

    bool valid() const { return !segments_.empty(); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double operator()(double x) const;

private:
    struct Segment {
        double u0, u1;
        std::vector<double> coeff;
    };
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<Segment> segments_;
};

// Geometric lattice {lo * ratio^k} up to hi inclusive-ish.
std::vector<double> geometric_grid(double lo, double hi, int per_decade);

}  // namespace blowup
