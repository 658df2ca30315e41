#include "r13/polynomial_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace r13 {

LegendreValue legendre(int n, double t)
{
    if (n < 0)
        throw std::invalid_argument("legendre: negative order");
    // p, dp, d2p for P_{m-1} and P_m, advanced by the three-term recurrence and
    // its derivatives: (m+1)P_{m+1} = (2m+1) t P_m - m P_{m-1}.
    double p0 = 1.0, dp0 = 0.0, d2p0 = 0.0;
    if (n == 0)
        return {p0, dp0, d2p0};
    double p1 = t, dp1 = 1.0, d2p1 = 0.0;
    for (int m = 1; m < n; ++m) {
        const double a = (2.0 * m + 1.0) / (m + 1.0);
        const double b = static_cast<double>(m) / (m + 1.0);
        const double p2 = a * t * p1 - b * p0;
        const double dp2 = a * (p1 + t * dp1) - b * dp0;
        const double d2p2 = a * (2.0 * dp1 + t * d2p1) - b * d2p0;
        p0 = p1, dp0 = dp1, d2p0 = d2p1;
        p1 = p2, dp1 = dp2, d2p1 = d2p2;
    }
    return {p1, dp1, d2p1};
}

GaussRule gauss_legendre(int n)
{
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: need at least one point");
    GaussRule rule;
    rule.points.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto lv = legendre(n, t);
            const double step = lv.p / lv.dp;
            t -= step;
            if (std::abs(step) < 1e-16)
                break;
        }
        const auto lv = legendre(n, t);
        const double w = 2.0 / ((1.0 - t * t) * lv.dp * lv.dp);
        // map [-1,1] -> [0,1]; ascending order
        rule.points[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (t + 1.0);
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
    }
    return rule;
}

IntervalSpace::IntervalSpace(int degree, int cells, bool zero_trace)
    : degree_(degree), cells_(cells), zero_trace_(zero_trace)
{
    if (degree < 1)
        throw std::invalid_argument("polynomial degree must be >= 1");
    if (cells < 1)
        throw std::invalid_argument("number of subdivisions must be >= 1");
    size_ = (cells + 1) + cells * (degree - 1) - (zero_trace ? 2 : 0);
    if (size_ < 1)
        throw std::invalid_argument("zero-trace space is empty for this degree");
}

int IntervalSpace::cell_of(double x) const
{
    const int c = static_cast<int>(std::floor(x * cells_));
    return std::clamp(c, 0, cells_ - 1);
}

void IntervalSpace::eval(double x, int cell, Eigen::Ref<Eigen::VectorXd> val, Eigen::Ref<Eigen::VectorXd> d1,
                         Eigen::Ref<Eigen::VectorXd> d2) const
{
    val.setZero();
    d1.setZero();
    d2.setZero();
    const double h = 1.0 / cells_;
    const double t = 2.0 * (x - cell * h) / h - 1.0;
    const double jac = 2.0 / h;

    // vertex hats: left vertex `cell`, right vertex `cell + 1`
    const int first_vertex = zero_trace_ ? 1 : 0;
    auto vertex_index = [&](int v) { return v - first_vertex; };
    const int nvert = zero_trace_ ? cells_ - 1 : cells_ + 1;
    auto in_range = [&](int v) { return v >= first_vertex && v - first_vertex < nvert; };
    if (in_range(cell)) {
        val[vertex_index(cell)] = 0.5 * (1.0 - t);
        d1[vertex_index(cell)] = -0.5 * jac;
    }
    if (in_range(cell + 1)) {
        val[vertex_index(cell + 1)] = 0.5 * (1.0 + t);
        d1[vertex_index(cell + 1)] = 0.5 * jac;
    }

    // bubbles l_m = sqrt((2m-1)/2) int_{-1}^t P_{m-1} = (P_m - P_{m-2}) / sqrt(2(2m-1))
    const int base = nvert + cell * (degree_ - 1);
    for (int m = 2; m <= degree_; ++m) {
        const auto pm = legendre(m, t);
        const auto pm2 = legendre(m - 2, t);
        const auto pm1 = legendre(m - 1, t);
        const double scale = std::sqrt((2.0 * m - 1.0) / 2.0);
        const int idx = base + (m - 2);
        val[idx] = (pm.p - pm2.p) / std::sqrt(2.0 * (2.0 * m - 1.0));
        d1[idx] = scale * pm1.p * jac;
        d2[idx] = scale * pm1.dp * jac * jac;
    }
}

BoxSpace::BoxSpace(int dim, int degree, int cells, bool zero_trace)
    : dim_(dim), line_(degree, cells, zero_trace), quad_(gauss_legendre(degree + 2))
{
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("box space dimension must be 2 or 3");
    size_ = 1;
    for (int a = 0; a < dim; ++a)
        size_ *= line_.size();
}

PointBasis BoxSpace::eval(const Point& x, const std::array<int, 3>& cell, bool hessian) const
{
    const int n1 = line_.size();
    Eigen::MatrixXd v(n1, 3), g(n1, 3), h(n1, 3);
    for (int a = 0; a < dim_; ++a)
        line_.eval(x[static_cast<std::size_t>(a)], cell[static_cast<std::size_t>(a)], v.col(a), g.col(a), h.col(a));

    PointBasis pb;
    pb.x = x;
    pb.val.resize(size_);
    pb.grad.resize(dim_, size_);
    if (hessian)
        pb.hess.resize(dim_ * dim_, size_);

    // index j = (i0 * n1 + i1) * n1 + i2, first direction slowest
    auto fill = [&](int j, const std::array<int, 3>& ii) {
        std::array<double, 3> f0{}, f1{}, f2{};
        for (int a = 0; a < dim_; ++a) {
            f0[static_cast<std::size_t>(a)] = v(ii[static_cast<std::size_t>(a)], a);
            f1[static_cast<std::size_t>(a)] = g(ii[static_cast<std::size_t>(a)], a);
            f2[static_cast<std::size_t>(a)] = h(ii[static_cast<std::size_t>(a)], a);
        }
        double prod = 1.0;
        for (int a = 0; a < dim_; ++a)
            prod *= f0[static_cast<std::size_t>(a)];
        pb.val[j] = prod;
        for (int a = 0; a < dim_; ++a) {
            double gp = f1[static_cast<std::size_t>(a)];
            for (int b = 0; b < dim_; ++b)
                if (b != a)
                    gp *= f0[static_cast<std::size_t>(b)];
            pb.grad(a, j) = gp;
        }
        if (hessian) {
            for (int a = 0; a < dim_; ++a)
                for (int b = 0; b < dim_; ++b) {
                    double hp = 1.0;
                    for (int c = 0; c < dim_; ++c) {
                        const auto cc = static_cast<std::size_t>(c);
                        const int order = (c == a) + (c == b);
                        hp *= order == 0 ? f0[cc] : order == 1 ? f1[cc] : f2[cc];
                    }
                    pb.hess(a * dim_ + b, j) = hp;
                }
        }
    };

    if (dim_ == 2) {
        for (int i0 = 0; i0 < n1; ++i0)
            for (int i1 = 0; i1 < n1; ++i1)
                fill(i0 * n1 + i1, {i0, i1, 0});
    } else {
        for (int i0 = 0; i0 < n1; ++i0)
            for (int i1 = 0; i1 < n1; ++i1)
                for (int i2 = 0; i2 < n1; ++i2)
                    fill((i0 * n1 + i1) * n1 + i2, {i0, i1, i2});
    }
    return pb;
}

PointBasis BoxSpace::eval(const Point& x, bool hessian) const
{
    std::array<int, 3> cell{};
    for (int a = 0; a < dim_; ++a)
        cell[static_cast<std::size_t>(a)] = line_.cell_of(x[static_cast<std::size_t>(a)]);
    return eval(x, cell, hessian);
}

void BoxSpace::for_each_volume_point(const std::function<void(const PointBasis&, double)>& f, bool hessian) const
{
    const int k = cells();
    const double h = 1.0 / k;
    const int nq = quadrature_order();
    const int c2max = dim_ == 3 ? k : 1;
    const int q2max = dim_ == 3 ? nq : 1;
    for (int c0 = 0; c0 < k; ++c0)
        for (int c1 = 0; c1 < k; ++c1)
            for (int c2 = 0; c2 < c2max; ++c2)
                for (int q0 = 0; q0 < nq; ++q0)
                    for (int q1 = 0; q1 < nq; ++q1)
                        for (int q2 = 0; q2 < q2max; ++q2) {
                            const auto u0 = static_cast<std::size_t>(q0);
                            const auto u1 = static_cast<std::size_t>(q1);
                            const auto u2 = static_cast<std::size_t>(q2);
                            Point x{(c0 + quad_.points[u0]) * h, (c1 + quad_.points[u1]) * h, 0.0};
                            double w = quad_.weights[u0] * quad_.weights[u1] * h * h;
                            if (dim_ == 3) {
                                x[2] = (c2 + quad_.points[u2]) * h;
                                w *= quad_.weights[u2] * h;
                            }
                            f(eval(x, {c0, c1, c2}, hessian), w);
                        }
}

void BoxSpace::for_each_boundary_point(const std::function<void(const PointBasis&, double, int, int)>& f) const
{
    const int k = cells();
    const double h = 1.0 / k;
    const int nq = quadrature_order();
    for (int axis = 0; axis < dim_; ++axis)
        for (int sign : {-1, 1}) {
            const double xa = sign > 0 ? 1.0 : 0.0;
            const int ca = sign > 0 ? k - 1 : 0;
            // the remaining dim-1 directions
            std::array<int, 2> other{};
            int no = 0;
            for (int b = 0; b < dim_; ++b)
                if (b != axis)
                    other[static_cast<std::size_t>(no++)] = b;
            const int c1max = no == 2 ? k : 1;
            const int q1max = no == 2 ? nq : 1;
            for (int c0 = 0; c0 < k; ++c0)
                for (int c1 = 0; c1 < c1max; ++c1)
                    for (int q0 = 0; q0 < nq; ++q0)
                        for (int q1 = 0; q1 < q1max; ++q1) {
                            Point x{};
                            std::array<int, 3> cell{};
                            x[static_cast<std::size_t>(axis)] = xa;
                            cell[static_cast<std::size_t>(axis)] = ca;
                            const auto o0 = static_cast<std::size_t>(other[0]);
                            x[o0] = (c0 + quad_.points[static_cast<std::size_t>(q0)]) * h;
                            cell[o0] = c0;
                            double w = quad_.weights[static_cast<std::size_t>(q0)] * h;
                            if (no == 2) {
                                const auto o1 = static_cast<std::size_t>(other[1]);
                                x[o1] = (c1 + quad_.points[static_cast<std::size_t>(q1)]) * h;
                                cell[o1] = c1;
                                w *= quad_.weights[static_cast<std::size_t>(q1)] * h;
                            }
                            f(eval(x, cell), w, axis, sign);
                        }
        }
}

Eigen::MatrixXd BoxSpace::mass() const
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size_, size_);
    for_each_volume_point([&](const PointBasis& pb, double w) { m.noalias() += w * pb.val * pb.val.transpose(); });
    return m;
}

Eigen::MatrixXd BoxSpace::stiffness() const
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size_, size_);
    for_each_volume_point([&](const PointBasis& pb, double w) { m.noalias() += w * pb.grad.transpose() * pb.grad; });
    return m;
}

Eigen::VectorXd BoxSpace::integrals() const
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(size_);
    for_each_volume_point([&](const PointBasis& pb, double w) { v += w * pb.val; });
    return v;
}

Eigen::VectorXd BoxSpace::tensor_coefficients(const Eigen::VectorXd& line_coeffs) const
{
    const int n1 = line_.size();
    if (line_coeffs.size() != n1)
        throw std::invalid_argument("tensor_coefficients: size mismatch");
    Eigen::VectorXd out(size_);
    if (dim_ == 2) {
        for (int i0 = 0; i0 < n1; ++i0)
            for (int i1 = 0; i1 < n1; ++i1)
                out[i0 * n1 + i1] = line_coeffs[i0] * line_coeffs[i1];
    } else {
        for (int i0 = 0; i0 < n1; ++i0)
            for (int i1 = 0; i1 < n1; ++i1)
                for (int i2 = 0; i2 < n1; ++i2)
                    out[(i0 * n1 + i1) * n1 + i2] = line_coeffs[i0] * line_coeffs[i1] * line_coeffs[i2];
    }
    return out;
}

Eigen::VectorXd BoxSpace::project(const std::function<double(const Point&)>& f) const
{
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size_);
    for_each_volume_point([&](const PointBasis& pb, double w) { rhs += w * f(pb.x) * pb.val; });
    return mass().ldlt().solve(rhs);
}

Eigen::VectorXd top_mode_line(const IntervalSpace& line)
{
    const int n = line.size();
    const int k = line.cells();
    const int deg = line.degree();
    const GaussRule q = gauss_legendre(deg + 2);
    const double h = 1.0 / k;

    // C((cell, m), j) = int_cell P_m(t(x)) phi_j(x) dx,  m < deg
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k * deg, n);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd v(n), d1(n), d2(n);
    for (int cell = 0; cell < k; ++cell)
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
            const double x = (cell + q.points[iq]) * h;
            const double w = q.weights[iq] * h;
            line.eval(x, cell, v, d1, d2);
            mass.noalias() += w * v * v.transpose();
            const double t = 2.0 * q.points[iq] - 1.0;
            for (int m = 0; m < deg; ++m)
                c.row(cell * deg + m) += w * legendre(m, t).p * v.transpose();
        }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
    Eigen::VectorXd z = svd.matrixV().col(n - 1);
    z /= std::sqrt(z.dot(mass * z));
    // deterministic sign: positive value at x = 1
    line.eval(1.0, k - 1, v, d1, d2);
    if (v.dot(z) < 0)
        z = -z;
    return z;
}

}  // namespace r13
