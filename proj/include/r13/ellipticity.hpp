#pragma once

// Symbols of first-order operators  v -> P[D v]  with P one of the tensor
// projections, and sampling-based R-/C-ellipticity classification.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "r13/tensor.hpp"

namespace r13 {

enum class DomainSpace { vectors, stf2, full2 };

// Codomain projection. Rank-2 kinds apply to vector domains, rank-3 kinds to
// rank-2 domains; `identity` is valid for both.
enum class Codomain { identity, sym, dev, stf, Sym, Dev, Stf };

struct OperatorSpec {
    DomainSpace domain = DomainSpace::vectors;
    Codomain codomain = Codomain::identity;
    int dim = 3;

    // Throws std::invalid_argument when domain and codomain ranks disagree.
    void validate() const;

    int domain_dim() const;    // number of domain coordinates
    int codomain_dim() const;  // ambient codomain entries (d^2 or d^3)
    std::string name() const;
};

// Domain coordinates: e_i for vectors, stf_basis(2, d) for stf2 and the unit
// dyads for full2. Rows are ambient row-major codomain entries, which are an
// isometric embedding of the projected range, so singular values agree with
// any orthonormal coordinatization of the range.
struct SymbolMatrix {
    Eigen::VectorXcd xi;
    Eigen::MatrixXcd matrix;
};

SymbolMatrix symbol_matrix(const OperatorSpec& op, const Eigen::VectorXcd& xi);

// Ambient coordinates of the domain basis element `a`.
Eigen::VectorXd domain_basis_element(const OperatorSpec& op, int a);

enum class EllipticityMode { R, C };

struct SamplingPlan {
    int real_samples = 4000;
    int complex_samples = 4000;
    int isotropic_samples = 2000;
    int family_samples = 256;  // structured isotropic family e1 + i(cos phi e2 + sin phi e3)
    std::uint64_t seed = 20240617;

    int total(EllipticityMode mode) const;
};

struct EllipticityWitness {
    Eigen::VectorXcd xi;      // unit (Hermitian) frequency
    Eigen::VectorXcd tensor;  // ambient coordinates of the kernel element, unit norm
    double residual = 0.0;    // |symbol(xi) tensor| / |tensor|
};

struct EllipticityVerdict {
    EllipticityMode mode = EllipticityMode::R;
    bool elliptic = false;
    double min_singular_value = 0.0;
    Eigen::VectorXcd minimizing_xi;
    int samples = 0;
    std::optional<EllipticityWitness> witness;
};

inline constexpr double kEllipticityThreshold = 1e-8;

EllipticityVerdict check_ellipticity(const OperatorSpec& op, EllipticityMode mode,
                                     const SamplingPlan& plan = {});

// Smallest singular value of symbol(xi) for xi normalized to unit length.
double min_singular_value(const OperatorSpec& op, const Eigen::VectorXcd& xi);

// lambda = min_{|z|=|y|=1} |P[z (x) y]| for vector-domain operators. The inner
// minimum over y is the smallest eigenvalue of a d x d Gram matrix; z is found
// by a 64 x 128 spherical grid (d = 3) or a 128-point circle (d = 2) followed
// by 20 sweeps of coordinate descent on the angles.
double lh_constant(const OperatorSpec& op);

struct Rational {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

Rational make_rational(long long num, long long den);

// Dimension-dependent coefficients in the C-ellipticity argument for the
// Stf-gradient on stf 2-tensors.
struct Prefactors {
    Rational c_stf;     // 1/(d+2): trace coefficient of Stf
    Rational c_symbol;  // 2/(3(d+2)): trace coefficient of the symbol
    Rational c_core1;   // d/(d+2): after contracting with xi on both sides
    Rational c_case1;   // 2(d+1)/(3(d+2)): non-isotropic case
    Rational c_case2;   // (d-2)/(3(d+2)): isotropic case, zero iff d = 2
    bool case2_vanishes() const { return c_case2.num == 0; }
};

Prefactors general_d_prefactors(int dim);

}  // namespace r13
