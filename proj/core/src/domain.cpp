#include "blowup/domain.hpp"

#include <algorithm>
#include <cmath>

namespace blowup {

std::shared_ptr<const RadialGrid> RadialGrid::build(const BallDomain& dom, int N,
                                                    double gamma) {
    if (dom.dim < 2) throw std::invalid_argument("RadialGrid: dimension must be >= 2");
    if (!(dom.radius > 0.0)) throw std::invalid_argument("RadialGrid: radius must be positive");
    if (N < 4) throw std::invalid_argument("RadialGrid: N too small");
    if (!(gamma >= 1.0)) throw std::invalid_argument("RadialGrid: grading exponent must be >= 1");

    auto g = std::make_shared<RadialGrid>();
    g->dom_ = dom;
    g->gamma_ = gamma;
    g->sphere_area_ = 2.0 * std::pow(M_PI, 0.5 * dom.dim) / std::tgamma(0.5 * dom.dim);
    g->nodes_.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        double s = 1.0 - static_cast<double>(i) / N;
        g->nodes_[static_cast<std::size_t>(i)] = dom.radius * (1.0 - std::pow(s, gamma));
    }
    g->lo_.resize(static_cast<std::size_t>(N));
    g->hi_.resize(static_cast<std::size_t>(N));
    g->vol_.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        g->lo_[static_cast<std::size_t>(i)] =
            i == 0 ? 0.0 : 0.5 * (g->nodes_[static_cast<std::size_t>(i - 1)] +
                                  g->nodes_[static_cast<std::size_t>(i)]);
        g->hi_[static_cast<std::size_t>(i)] =
            i == N - 1 ? dom.radius : 0.5 * (g->nodes_[static_cast<std::size_t>(i)] +
                                             g->nodes_[static_cast<std::size_t>(i + 1)]);
    }
    for (int i = 0; i < N; ++i) {
        double lo = g->lo_[static_cast<std::size_t>(i)];
        double hi = g->hi_[static_cast<std::size_t>(i)];
        // exact shell volume |S^{d-1}| (hi^d - lo^d)/d
        g->vol_[static_cast<std::size_t>(i)] =
            g->sphere_area_ * (std::pow(hi, dom.dim) - std::pow(lo, dom.dim)) / dom.dim;
    }
    return g;
}

int RadialGrid::index_near_delta(double target) const {
    int best = 0;
    double err = std::abs(delta(0) - target);
    for (int i = 1; i < size(); ++i) {
        double e = std::abs(delta(i) - target);
        if (e < err) {
            err = e;
            best = i;
        }
    }
    return best;
}

int RadialGrid::last_index_with_delta_at_least(double target) const {
    int last = -1;
    for (int i = 0; i < size(); ++i)
        if (delta(i) >= target) last = i;
    return last;
}

Field::Field(std::shared_ptr<const RadialGrid> grid, std::vector<double> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
    if (!grid_ || static_cast<int>(v_.size()) != grid_->size())
        throw std::invalid_argument("Field: value count must match the grid");
}

Field Field::constant(std::shared_ptr<const RadialGrid> grid, double c) {
    std::vector<double> v(static_cast<std::size_t>(grid->size()), c);
    return Field(std::move(grid), std::move(v));
}

double Field::eval(double r) const {
    const auto& g = *grid_;
    if (r < 0.0) r = -r;  // radial
    if (r >= g.domain().radius) return 0.0;
    if (r >= g.node(g.size() - 1)) return v_.back();
    // nodes are sorted; binary search for the bracketing pair
    const double* begin = nullptr;
    int n = g.size();
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (g.node(mid) <= r) lo = mid;
        else hi = mid;
    }
    (void)begin;
    double r0 = g.node(lo), r1 = g.node(hi);
    double t = (r - r0) / (r1 - r0);
    return (1.0 - t) * v_[static_cast<std::size_t>(lo)] +
           t * v_[static_cast<std::size_t>(hi)];
}

double Field::l1_norm() const {
    double acc = 0.0;
    for (int i = 0; i < size(); ++i)
        acc += grid_->volume_weight(i) * std::abs(v_[static_cast<std::size_t>(i)]);
    return acc;
}

double Field::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace blowup
