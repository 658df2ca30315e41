#pragma once

// Dense, dimension-generic rank-2 and rank-3 tensors with the projections
// used by the moment equations (sym/dev/stf and Sym/Dev/Stf).
//
// Storage is row-major: (i, j) -> i*d + j and (i, j, k) -> (i*d + j)*d + k.
// With this layout the gradient of a rank-r field, (D X)_{... k} = d_k X_{...},
// is the rank-(r+1) tensor whose last index is the derivative direction.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace r13 {

using Complex = std::complex<double>;

enum class Proj2 { identity, sym, dev, stf };
enum class Proj3 { identity, Sym, Dev, Stf };

template <typename T>
class Tensor2 {
public:
    Tensor2() = default;
    explicit Tensor2(int dim) : dim_(check_dim(dim)), data_(static_cast<std::size_t>(dim * dim), T{}) {}

    static Tensor2 identity(int dim)
    {
        Tensor2 out(dim);
        for (int i = 0; i < dim; ++i)
            out(i, i) = T{1};
        return out;
    }

    int dim() const { return dim_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * dim_ + j)]; }
    const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * dim_ + j)]; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    T trace() const
    {
        T t{};
        for (int i = 0; i < dim_; ++i)
            t += (*this)(i, i);
        return t;
    }

    Tensor2 transpose() const
    {
        Tensor2 out(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                out(i, j) = (*this)(j, i);
        return out;
    }

    Tensor2& operator+=(const Tensor2& o)
    {
        for (std::size_t n = 0; n < data_.size(); ++n)
            data_[n] += o.data_[n];
        return *this;
    }
    Tensor2& operator-=(const Tensor2& o)
    {
        for (std::size_t n = 0; n < data_.size(); ++n)
            data_[n] -= o.data_[n];
        return *this;
    }
    Tensor2& operator*=(T a)
    {
        for (auto& x : data_)
            x *= a;
        return *this;
    }

    friend Tensor2 operator+(Tensor2 a, const Tensor2& b) { return a += b; }
    friend Tensor2 operator-(Tensor2 a, const Tensor2& b) { return a -= b; }
    friend Tensor2 operator*(T s, Tensor2 a) { return a *= s; }

private:
    static int check_dim(int dim)
    {
        if (dim < 2)
            throw std::invalid_argument("tensor dimension must be >= 2");
        return dim;
    }

    int dim_ = 0;
    std::vector<T> data_;
};

template <typename T>
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), T{})
    {
        if (dim < 2)
            throw std::invalid_argument("tensor dimension must be >= 2");
    }

    int dim() const { return dim_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(int i, int j, int k) { return data_[static_cast<std::size_t>((i * dim_ + j) * dim_ + k)]; }
    const T& operator()(int i, int j, int k) const
    {
        return data_[static_cast<std::size_t>((i * dim_ + j) * dim_ + k)];
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    Tensor3& operator+=(const Tensor3& o)
    {
        for (std::size_t n = 0; n < data_.size(); ++n)
            data_[n] += o.data_[n];
        return *this;
    }
    Tensor3& operator-=(const Tensor3& o)
    {
        for (std::size_t n = 0; n < data_.size(); ++n)
            data_[n] -= o.data_[n];
        return *this;
    }
    Tensor3& operator*=(T a)
    {
        for (auto& x : data_)
            x *= a;
        return *this;
    }
    friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
    friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
    friend Tensor3 operator*(T s, Tensor3 a) { return a *= s; }

private:
    int dim_ = 0;
    std::vector<T> data_;
};

using RTensor2 = Tensor2<double>;
using CTensor2 = Tensor2<Complex>;
using RTensor3 = Tensor3<double>;
using CTensor3 = Tensor3<Complex>;

// Frobenius inner product, bilinear (no conjugation): sum_n a_n b_n.
template <typename T>
T contract(const std::vector<T>& a, const std::vector<T>& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("contract: size mismatch");
    T s{};
    for (std::size_t n = 0; n < a.size(); ++n)
        s += a[n] * b[n];
    return s;
}

template <typename T>
T frobenius(const Tensor2<T>& a, const Tensor2<T>& b)
{
    return contract(a.data(), b.data());
}
template <typename T>
T frobenius(const Tensor3<T>& a, const Tensor3<T>& b)
{
    return contract(a.data(), b.data());
}

// Hermitian norm sqrt(sum |a_n|^2).
template <typename T>
double norm(const std::vector<T>& a)
{
    double s = 0.0;
    for (const auto& x : a)
        s += std::norm(x);
    return std::sqrt(s);
}
template <typename T>
double norm(const Tensor2<T>& a)
{
    return norm(a.data());
}
template <typename T>
double norm(const Tensor3<T>& a)
{
    return norm(a.data());
}

template <typename T>
Tensor2<T> project2(const Tensor2<T>& m, Proj2 kind);

// Sym averages over all index permutations. Dev is the orthogonal projection
// onto tensors whose three single-index traces vanish; on symmetric input it
// reduces to P_ijk - (P_ill d_jk + P_ljl d_ik + P_llk d_ij)/(d+2). Stf = Dev o Sym.
template <typename T>
Tensor3<T> project3(const Tensor3<T>& t, Proj3 kind);

// Outer products v (x) w and M (x) w.
template <typename T>
Tensor2<T> outer(const std::vector<T>& v, const std::vector<T>& w);
template <typename T>
Tensor3<T> outer(const Tensor2<T>& m, const std::vector<T>& w);

// Matrix of the projection acting on row-major coordinates (d^2 x d^2 or d^3 x d^3).
Eigen::MatrixXd projection_matrix(Proj2 kind, int dim);
Eigen::MatrixXd projection_matrix(Proj3 kind, int dim);

// Orthonormal (Frobenius) basis of the stf subspace. Generators are stf/Stf
// of the unit dyads e_i (x) e_j (i <= j) or e_i (x) e_j (x) e_k (i <= j <= k),
// visited lexicographically and orthonormalized by repeated Gram-Schmidt.
// Each basis element is returned as its row-major coordinate vector.
std::vector<Eigen::VectorXd> stf_basis(int rank, int dim);

// Boundary-aligned frame (t1, t2, n) in R^3.
struct Frame {
    std::array<double, 3> n{};
    std::array<double, 3> t1{};
    std::array<double, 3> t2{};

    // Throws std::invalid_argument("invalid frame") unless the vectors are
    // orthonormal to 1e-12 and t1 x t2 = n.
    static Frame make(const std::array<double, 3>& n, const std::array<double, 3>& t1,
                      const std::array<double, 3>& t2);

    // Frame of the face of the unit cube with outward normal sign*e_axis:
    // t1 = e_{axis+1}, t2 = n x t1.
    static Frame axis_aligned(int axis, int sign);

    void validate() const;
};

struct Tensor2Components {
    double nn = 0, nt1 = 0, nt2 = 0, t1t1 = 0, t1t2 = 0, t2t2 = 0;
};
struct VectorComponents {
    double n = 0, t1 = 0, t2 = 0;
};

Tensor2Components frame_components(const RTensor2& sigma, const Frame& frame);
VectorComponents frame_components(const std::array<double, 3>& v, const Frame& frame);

}  // namespace r13
