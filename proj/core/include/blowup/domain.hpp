#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

namespace blowup {

/// Ball of radius R in R^d.  δ(x) = R − |x| is exact; no boundary
/// approximation enters anywhere downstream.
struct BallDomain {
    int dim = 2;
    double radius = 1.0;

    double delta(double r) const { return radius - r; }
};

/// Graded radial mesh on [0, R): nodes r_i = R(1 − (1 − i/N)^γ),
/// i = 0..N−1, clustering at the boundary for γ > 1.  Node i owns the cell
/// [m_{i−1/2}, m_{i+1/2}] with m_{−1/2} = 0 and m_{N−1/2} = R.
class RadialGrid {
public:
    static std::shared_ptr<const RadialGrid> build(const BallDomain& dom, int N,
                                                   double gamma);

    int size() const { return static_cast<int>(nodes_.size()); }
    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    double delta(int i) const { return dom_.radius - node(i); }
    double cell_lo(int i) const { return lo_[static_cast<std::size_t>(i)]; }
    double cell_hi(int i) const { return hi_[static_cast<std::size_t>(i)]; }
    double weight(int i) const { return cell_hi(i) - cell_lo(i); }  // 1-D cell width
    double volume_weight(int i) const { return vol_[static_cast<std::size_t>(i)]; }
    double boundary_width() const { return dom_.radius - nodes_.back(); }
    double gamma() const { return gamma_; }
    const BallDomain& domain() const { return dom_; }
    double sphere_area() const { return sphere_area_; }  // |S^{d-1}|

    /// Node whose δ is closest to the target.
    int index_near_delta(double target) const;
    /// Smallest index with δ(i) >= target (nodes are ordered by decreasing δ).
    int last_index_with_delta_at_least(double target) const;

private:
    BallDomain dom_;
    double gamma_ = 1.0;
    double sphere_area_ = 0.0;
    std::vector<double> nodes_, lo_, hi_, vol_;
};

/// Grid-sampled radial function, identically 0 outside the ball.
/// Evaluation between nodes is piecewise linear (monotone-preserving);
/// beyond the last node the nodal value is held constant up to R.
class Field {
public:
    Field() = default;  // empty (grid-less) state, as after a move
    Field(std::shared_ptr<const RadialGrid> grid, std::vector<double> values);
    static Field constant(std::shared_ptr<const RadialGrid> grid, double c);
    static Field zeros(std::shared_ptr<const RadialGrid> grid) { return constant(grid, 0.0); }

    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double eval(double r) const;
    const std::shared_ptr<const RadialGrid>& grid() const { return grid_; }

    /// ∫_B |u| dx with the grid's shell volume weights.
    double l1_norm() const;
    double max_abs() const;

private:
    std::shared_ptr<const RadialGrid> grid_;
    std::vector<double> v_;
};

}  // namespace blowup
