#include "r13/tensor.hpp"

#include <algorithm>

namespace r13 {

template <typename T>
Tensor2<T> project2(const Tensor2<T>& m, Proj2 kind)
{
    const int d = m.dim();
    switch (kind) {
    case Proj2::identity:
        return m;
    case Proj2::sym: {
        Tensor2<T> out(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out(i, j) = T{0.5} * (m(i, j) + m(j, i));
        return out;
    }
    case Proj2::dev: {
        Tensor2<T> out = m;
        const T shift = m.trace() / static_cast<double>(d);
        for (int i = 0; i < d; ++i)
            out(i, i) -= shift;
        return out;
    }
    case Proj2::stf:
        return project2(project2(m, Proj2::sym), Proj2::dev);
    }
    throw std::invalid_argument("project2: unknown kind");
}

namespace {

template <typename T>
Tensor3<T> symmetrize(const Tensor3<T>& t)
{
    const int d = t.dim();
    Tensor3<T> out(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                out(i, j, k) = (t(i, j, k) + t(j, k, i) + t(k, i, j) + t(j, i, k) + t(i, k, j) + t(k, j, i)) / 6.0;
    return out;
}

// Removes a_i d_jk + b_j d_ik + c_k d_ij so that all three traces vanish.
// The coefficients solve [[d,1,1],[1,d,1],[1,1,d]] (a,b,c) = (t1,t2,t3) per index.
template <typename T>
Tensor3<T> deviator(const Tensor3<T>& t)
{
    const int d = t.dim();
    const double dd = d;
    // inverse of [[d,1,1],[1,d,1],[1,1,d]]: (1/(d-1)) I - 1/((d-1)(d+2)) 11^T
    const double diag = 1.0 / (dd - 1.0) - 1.0 / ((dd - 1.0) * (dd + 2.0));
    const double off = -1.0 / ((dd - 1.0) * (dd + 2.0));

    std::vector<T> a(d), b(d), c(d);
    for (int i = 0; i < d; ++i) {
        T t1{}, t2{}, t3{};
        for (int l = 0; l < d; ++l) {
            t1 += t(i, l, l);
            t2 += t(l, i, l);
            t3 += t(l, l, i);
        }
        a[i] = diag * t1 + off * (t2 + t3);
        b[i] = diag * t2 + off * (t1 + t3);
        c[i] = diag * t3 + off * (t1 + t2);
    }
    Tensor3<T> out = t;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                T corr{};
                if (j == k)
                    corr += a[i];
                if (i == k)
                    corr += b[j];
                if (i == j)
                    corr += c[k];
                out(i, j, k) -= corr;
            }
    return out;
}

}  // namespace

template <typename T>
Tensor3<T> project3(const Tensor3<T>& t, Proj3 kind)
{
    switch (kind) {
    case Proj3::identity:
        return t;
    case Proj3::Sym:
        return symmetrize(t);
    case Proj3::Dev:
        return deviator(t);
    case Proj3::Stf:
        return deviator(symmetrize(t));
    }
    throw std::invalid_argument("project3: unknown kind");
}

template <typename T>
Tensor2<T> outer(const std::vector<T>& v, const std::vector<T>& w)
{
    if (v.size() != w.size())
        throw std::invalid_argument("outer: size mismatch");
    const int d = static_cast<int>(v.size());
    Tensor2<T> out(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out(i, j) = v[i] * w[j];
    return out;
}

template <typename T>
Tensor3<T> outer(const Tensor2<T>& m, const std::vector<T>& w)
{
    const int d = m.dim();
    if (static_cast<int>(w.size()) != d)
        throw std::invalid_argument("outer: size mismatch");
    Tensor3<T> out(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                out(i, j, k) = m(i, j) * w[k];
    return out;
}

template Tensor2<double> project2(const Tensor2<double>&, Proj2);
template Tensor2<Complex> project2(const Tensor2<Complex>&, Proj2);
template Tensor3<double> project3(const Tensor3<double>&, Proj3);
template Tensor3<Complex> project3(const Tensor3<Complex>&, Proj3);
template Tensor2<double> outer(const std::vector<double>&, const std::vector<double>&);
template Tensor2<Complex> outer(const std::vector<Complex>&, const std::vector<Complex>&);
template Tensor3<double> outer(const Tensor2<double>&, const std::vector<double>&);
template Tensor3<Complex> outer(const Tensor2<Complex>&, const std::vector<Complex>&);

Eigen::MatrixXd projection_matrix(Proj2 kind, int dim)
{
    const int n = dim * dim;
    Eigen::MatrixXd p(n, n);
    for (int col = 0; col < n; ++col) {
        RTensor2 e(dim);
        e.data()[static_cast<std::size_t>(col)] = 1.0;
        const RTensor2 pe = project2(e, kind);
        for (int row = 0; row < n; ++row)
            p(row, col) = pe.data()[static_cast<std::size_t>(row)];
    }
    return p;
}

Eigen::MatrixXd projection_matrix(Proj3 kind, int dim)
{
    const int n = dim * dim * dim;
    Eigen::MatrixXd p(n, n);
    for (int col = 0; col < n; ++col) {
        RTensor3 e(dim);
        e.data()[static_cast<std::size_t>(col)] = 1.0;
        const RTensor3 pe = project3(e, kind);
        for (int row = 0; row < n; ++row)
            p(row, col) = pe.data()[static_cast<std::size_t>(row)];
    }
    return p;
}

std::vector<Eigen::VectorXd> stf_basis(int rank, int dim)
{
    if (dim < 2)
        throw std::invalid_argument("stf_basis: dimension must be >= 2");
    std::vector<Eigen::VectorXd> generators;
    if (rank == 2) {
        const Eigen::MatrixXd p = projection_matrix(Proj2::stf, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j)
                generators.emplace_back(p.col(i * dim + j));
    } else if (rank == 3) {
        const Eigen::MatrixXd p = projection_matrix(Proj3::Stf, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j)
                for (int k = j; k < dim; ++k)
                    generators.emplace_back(p.col((i * dim + j) * dim + k));
    } else {
        throw std::invalid_argument("stf_basis: rank must be 2 or 3");
    }

    std::vector<Eigen::VectorXd> basis;
    for (Eigen::VectorXd g : generators) {
        const double g0 = g.norm();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis)
                g -= b.dot(g) * b;
        if (g.norm() > 1e-10 * std::max(g0, 1.0))
            basis.emplace_back(g / g.norm());
    }
    return basis;
}

namespace {

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> cross3(const std::array<double, 3>& a, const std::array<double, 3>& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

void Frame::validate() const
{
    constexpr double tol = 1e-12;
    const bool ortho = std::abs(dot3(n, n) - 1.0) <= tol && std::abs(dot3(t1, t1) - 1.0) <= tol &&
                       std::abs(dot3(t2, t2) - 1.0) <= tol && std::abs(dot3(n, t1)) <= tol &&
                       std::abs(dot3(n, t2)) <= tol && std::abs(dot3(t1, t2)) <= tol;
    const auto c = cross3(t1, t2);
    const bool right_handed = std::abs(c[0] - n[0]) <= tol && std::abs(c[1] - n[1]) <= tol &&
                              std::abs(c[2] - n[2]) <= tol;
    if (!ortho || !right_handed)
        throw std::invalid_argument("invalid frame");
}

Frame Frame::make(const std::array<double, 3>& n, const std::array<double, 3>& t1,
                  const std::array<double, 3>& t2)
{
    Frame f{n, t1, t2};
    f.validate();
    return f;
}

Frame Frame::axis_aligned(int axis, int sign)
{
    if (axis < 0 || axis > 2 || (sign != 1 && sign != -1))
        throw std::invalid_argument("invalid frame");
    Frame f;
    f.n[static_cast<std::size_t>(axis)] = sign;
    f.t1[static_cast<std::size_t>((axis + 1) % 3)] = 1.0;
    f.t2 = cross3(f.n, f.t1);
    return f;
}

Tensor2Components frame_components(const RTensor2& sigma, const Frame& frame)
{
    if (sigma.dim() != 3)
        throw std::invalid_argument("frame_components: dimension must be 3");
    frame.validate();
    auto bil = [&](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                s += a[static_cast<std::size_t>(i)] * sigma(i, j) * b[static_cast<std::size_t>(j)];
        return s;
    };
    return {bil(frame.n, frame.n),   bil(frame.n, frame.t1),  bil(frame.n, frame.t2),
            bil(frame.t1, frame.t1), bil(frame.t1, frame.t2), bil(frame.t2, frame.t2)};
}

VectorComponents frame_components(const std::array<double, 3>& v, const Frame& frame)
{
    frame.validate();
    return {dot3(v, frame.n), dot3(v, frame.t1), dot3(v, frame.t2)};
}

}  // namespace r13
