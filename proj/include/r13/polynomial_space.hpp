#pragma once

// Tensor-product C0 polynomial spaces on the unit box [0,1]^d, d in {2, 3},
// partitioned into k^d equal cells.
//
// The 1D space on k cells consists of the k+1 vertex hat functions followed
// by N-1 Lobatto bubbles per cell (integrated Legendre polynomials), which
// spans the continuous piecewise polynomials of degree <= N. With
// `zero_trace` the two end-point hats are dropped, which gives the H^1_0
// subspace exactly.

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace r13 {

struct GaussRule {
    std::vector<double> points;   // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

// n-point Gauss-Legendre rule on [0,1], exact for degree 2n-1.
GaussRule gauss_legendre(int n);

// Legendre polynomial P_n and its first two derivatives at t in [-1, 1].
struct LegendreValue {
    double p = 0, dp = 0, d2p = 0;
};
LegendreValue legendre(int n, double t);

class IntervalSpace {
public:
    IntervalSpace() = default;
    IntervalSpace(int degree, int cells, bool zero_trace = false);

    int degree() const { return degree_; }
    int cells() const { return cells_; }
    bool zero_trace() const { return zero_trace_; }
    int size() const { return size_; }

    // Values and derivatives of every basis function at x, with x taken in
    // the closed cell `cell` (so one-sided at cell interfaces).
    void eval(double x, int cell, Eigen::Ref<Eigen::VectorXd> val, Eigen::Ref<Eigen::VectorXd> d1,
              Eigen::Ref<Eigen::VectorXd> d2) const;

    int cell_of(double x) const;

private:
    int degree_ = 0;
    int cells_ = 0;
    bool zero_trace_ = false;
    int size_ = 0;
};

using Point = std::array<double, 3>;

// Values, gradients and (optionally) Hessians of all scalar basis functions
// at one point. grad is d x n, hess is (d*d) x n with row-major (i, j).
struct PointBasis {
    Point x{};
    Eigen::VectorXd val;
    Eigen::MatrixXd grad;
    Eigen::MatrixXd hess;
};

class BoxSpace {
public:
    BoxSpace() = default;
    BoxSpace(int dim, int degree, int cells, bool zero_trace = false);

    int dim() const { return dim_; }
    int degree() const { return line_.degree(); }
    int cells() const { return line_.cells(); }
    int size() const { return size_; }
    const IntervalSpace& line() const { return line_; }

    // Number of Gauss points per direction per cell; exact for degree 2(N+2)-1.
    int quadrature_order() const { return quad_.points.size(); }

    PointBasis eval(const Point& x, const std::array<int, 3>& cell, bool hessian = false) const;
    PointBasis eval(const Point& x, bool hessian = false) const;

    // Visits every volume quadrature point: f(basis, weight).
    void for_each_volume_point(const std::function<void(const PointBasis&, double)>& f, bool hessian = false) const;

    // Visits every boundary quadrature point: f(basis, weight, axis, sign),
    // where the outward normal is sign * e_axis. Only defined for d = 3 and d = 2.
    void for_each_boundary_point(const std::function<void(const PointBasis&, double, int, int)>& f) const;

    // Scalar Gram matrices.
    Eigen::MatrixXd mass() const;
    Eigen::MatrixXd stiffness() const;
    Eigen::VectorXd integrals() const;  // int phi_j

    // Coefficients of the tensor-product function f1(x1) f2(x2) ... given 1D coefficients.
    Eigen::VectorXd tensor_coefficients(const Eigen::VectorXd& line_coeffs) const;

    // L2 projection of a scalar function onto the space.
    Eigen::VectorXd project(const std::function<double(const Point&)>& f) const;

private:
    int dim_ = 0;
    IntervalSpace line_;
    int size_ = 0;
    GaussRule quad_;
};

// 1D function in the C0 degree-N space on k cells that is L2-orthogonal to
// all discontinuous piecewise polynomials of degree N-1. Unit mass norm.
Eigen::VectorXd top_mode_line(const IntervalSpace& line);

}  // namespace r13
