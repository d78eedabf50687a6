#include "blowup/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace blowup {

namespace {
using gk15 = boost::math::quadrature::gauss_kronrod<double, 15>;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt) {
    if (!(a < b)) {
        if (a == b) return 0.0;
        throw std::invalid_argument("integrate: empty interval");
    }
    double err = 0.0;
    double v = gk15::integrate(f, a, b, opt.max_depth, opt.rel_tol, &err);
    if (!std::isfinite(v))
        throw std::runtime_error("integrate: non-finite result");
    return v;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadOptions& opt) {
    if (!(a > 0.0))
        throw std::invalid_argument("integrate_to_infinity: requires a > 0");
    auto g = [&](double v) {
        if (v <= 0.0) return 0.0;
        double s = a / v;
        return f(s) * a / (v * v);
    };
    return integrate(g, 0.0, 1.0, opt);
}

double integrate_from_zero(const std::function<double(double)>& f, double b,
                           const QuadOptions& opt) {
    if (!(b > 0.0))
        throw std::invalid_argument("integrate_from_zero: requires b > 0");
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0, l1 = 0.0;
    double v = ts.integrate(f, 0.0, b, opt.rel_tol, &err, &l1);
    if (!std::isfinite(v))
        throw std::runtime_error("integrate_from_zero: non-finite result");
    return v;
}

double gauss8(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 8>::integrate(f, a, b);
}

double fd_derivative(const std::function<double(double)>& f, double x) {
    double scale = std::max(std::abs(x), 1e-30);
    double h = scale * 1e-4;
    auto central = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
    // one Richardson step: error h^2 -> h^4
    double d1 = central(h);
    double d2 = central(h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

double monotone_inverse(const std::function<double(double)>& f, double y,
                        bool increasing, double x_seed, double rel_tol) {
    const double lo_lim = 1e-300, hi_lim = 1e300;
    double x = std::clamp(x_seed, lo_lim, hi_lim);
    auto val = [&](double t) { return f(t); };
    double fx = val(x);
    auto above = [&](double v) { return increasing ? v >= y : v <= y; };

    double lo = x, hi = x;
    if (above(fx)) {
        // move toward smaller f-values
        while (above(val(lo))) {
            hi = lo;
            lo /= 16.0;
            if (lo < lo_lim)
                throw std::runtime_error("monotone_inverse: bracket not found (low)");
        }
    } else {
        while (!above(val(hi))) {
            lo = hi;
            hi *= 16.0;
            if (hi > hi_lim)
                throw std::runtime_error("monotone_inverse: bracket not found (high)");
        }
    }
    auto g = [&](double t) { return val(t) - y; };
    std::uintmax_t it = 200;
    auto tol = [rel_tol](double a, double b) {
        return std::abs(b - a) <= rel_tol * std::min(std::abs(a), std::abs(b));
    };
    auto r = boost::math::tools::toms748_solve(g, lo, hi, tol, it);
    return 0.5 * (r.first + r.second);
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double det = n * sxx - sx * sx;
    if (det == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit out;
    out.slope = (n * sxy - sx * sy) / det;
    out.intercept = (sy - out.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (out.slope * xs[i] + out.intercept);
        ss += r * r;
    }
    out.residual_rms = std::sqrt(ss / n);
    return out;
}

LineFit fit_log_slope(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit_log_slope: inputs must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    return fit_line(lx, ly);
}

LogChebCache::LogChebCache(const std::function<double(double)>& f, double lo,
                           double hi, int degree, int segments_per_decade) {
    if (!(0.0 < lo && lo < hi)) throw std::invalid_argument("LogChebCache: bad range");
    lo_ = lo;
    hi_ = hi;
    const double ulo = std::log(lo), uhi = std::log(hi);
    const double decade = std::log(10.0);
    int nseg = std::max(1, static_cast<int>(std::ceil((uhi - ulo) / decade *
                                                      segments_per_decade)));
    segments_.resize(nseg);
    const int n = degree + 1;
    for (int s = 0; s < nseg; ++s) {
        Segment& seg = segments_[s];
        seg.u0 = ulo + (uhi - ulo) * s / nseg;
        seg.u1 = ulo + (uhi - ulo) * (s + 1) / nseg;
        std::vector<double> fv(n);
        for (int k = 0; k < n; ++k) {
            double t = std::cos(M_PI * (k + 0.5) / n);  // Chebyshev points
            double u = 0.5 * (seg.u0 + seg.u1) + 0.5 * (seg.u1 - seg.u0) * t;
            double v = f(std::exp(u));
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::runtime_error("LogChebCache: function not positive/finite");
            fv[k] = std::log(v);
        }
        seg.coeff.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            double c = 0.0;
            for (int k = 0; k < n; ++k)
                c += fv[k] * std::cos(M_PI * j * (k + 0.5) / n);
            seg.coeff[j] = 2.0 * c / n;
        }
    }
}

double LogChebCache::operator()(double x) const {
    if (segments_.empty()) throw std::logic_error("LogChebCache: empty");
    double u = std::log(std::clamp(x, lo_, hi_));
    // locate segment (uniform in u)
    const double u0 = segments_.front().u0, u1 = segments_.back().u1;
    int idx = static_cast<int>((u - u0) / (u1 - u0) * segments_.size());
    idx = std::clamp(idx, 0, static_cast<int>(segments_.size()) - 1);
    const Segment& seg = segments_[idx];
    double t = std::clamp(2.0 * (u - seg.u0) / (seg.u1 - seg.u0) - 1.0, -1.0, 1.0);
    // Clenshaw
    double b1 = 0.0, b2 = 0.0;
    for (int j = static_cast<int>(seg.coeff.size()) - 1; j >= 1; --j) {
        double b0 = 2.0 * t * b1 - b2 + seg.coeff[j];
        b2 = b1;
        b1 = b0;
    }
    double val = t * b1 - b2 + 0.5 * seg.coeff[0];
    return std::exp(val);
}

std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
    if (!(0.0 < lo && lo < hi) || per_decade < 1)
        throw std::invalid_argument("geometric_grid: bad arguments");
    double ratio = std::pow(10.0, 1.0 / per_decade);
    std::vector<double> g;
    for (double t = lo; t < hi * (1.0 + 1e-12); t *= ratio) g.push_back(t);
    if (g.back() < hi) g.push_back(hi);
    return g;
}

}  // namespace blowup
