#pragma once

// Discrete Korn constants, coercivity chains of the forms a and dbar, and
// discrete right inverses of the vector and matrix divergence.

#include <cstdint>

#include <Eigen/Dense>

#include "r13/ellipticity.hpp"
#include "r13/galerkin.hpp"
#include "r13/polynomial_space.hpp"

namespace r13 {

// Fields for a Korn operator live on BoxSpace(op.dim, degree, subdivisions)
// with component-major coefficients; components are e_i for vectors and
// stf_basis(2, d) for stf 2-tensors.
struct KornQuotient {
    double h1_sq = 0.0;  // |v|^2 + |Dv|^2
    double l2_sq = 0.0;  // |v|^2
    double op_sq = 0.0;  // |A v|^2
    double ratio() const { return h1_sq / (l2_sq + op_sq); }
};

// Evaluates the three norms by pointwise quadrature, independently of the
// Gram matrices used by korn_constant.
KornQuotient korn_quotient(const OperatorSpec& op, const BoxSpace& space, const Eigen::VectorXd& coeffs);

struct KornEstimate {
    OperatorSpec op;
    int degree = 1;
    int subdivisions = 1;
    // c_N = max |v|_H1^2 / (|v|^2 + |Av|^2): largest eigenvalue of
    // (H1 Gram, L2 Gram + A Gram). A lower bound for the continuous constant.
    double constant = 0.0;
    Eigen::VectorXd extremizer;  // unit (L2 + A) norm
    double rayleigh_ratio = 0.0;  // korn_quotient at the extremizer
    // |v|_H1 / (|v| + |Av|) at the extremizer: a lower bound for the constant
    // of the sum-of-norms form, which lies in [sqrt(c_N / 2), sqrt(c_N)] on V_h.
    double sum_of_norms_ratio = 0.0;
};

// Supported: (vectors, sym) and (stf2, Stf) with d in {2, 3}. Anything else
// throws std::invalid_argument("unsupported Korn operator").
KornEstimate korn_constant(const OperatorSpec& op, int degree, int subdivisions = 1);

struct ChainLine {
    double value = 0.0;     // form evaluated with the assembled matrix
    double expanded = 0.0;  // sum of the individual terms by quadrature
    double min_coeff = 0.0;
    double lower = 0.0;     // min_coeff * (|A v|^2 + |v|^2)
    double korn = 0.0;      // discrete Korn constant of the same space
    double h1_sq = 0.0;
    double korn_lower = 0.0;  // (min_coeff / korn) * |v|_H1^2
    // value == expanded, expanded >= lower >= korn_lower, all up to rel_tol.
    bool holds(double rel_tol) const;
};

struct ChainReport {
    ChainLine a;     // on s
    ChainLine dbar;  // on (sigma, p)
};

// Precomputes the matrices and Korn constants for repeated chain checks.
class CoercivityChain {
public:
    CoercivityChain(const DiscreteSpaces& spaces, const ModelParams& params);

    ChainReport check(const Eigen::VectorXd& U) const;

    struct Sweep {
        int fields = 0;
        int violations = 0;
        double worst_margin = 0.0;  // min over lines of (lhs - rhs) / max(|lhs|, tiny)
    };
    // Standard normal coefficient vectors from a seeded mt19937_64.
    Sweep sweep(int count, std::uint64_t seed, double rel_tol) const;

private:
    const DiscreteSpaces* spaces_;
    ModelParams params_;
    Eigen::MatrixXd a_, dbar_;
    double korn_sym_ = 0.0, korn_stf_ = 0.0;
};

ChainReport coercivity_chain_check(const Eigen::VectorXd& U, const DiscreteSpaces& spaces, const ModelParams& params);

struct RightInverse {
    Eigen::VectorXd v;  // trial coefficients on the zero-trace degree-(N+1) space
    double tau_h1 = 0.0;
    double data_l2 = 0.0;
    double bound_ratio = 0.0;     // tau_h1 / data_l2 (0 for zero data)
    double weak_residual = 0.0;   // sup_phi |int tau:D phi - int u.phi| / |phi|_H1 over the test space
    double range_residual = 0.0;  // max |P[tau] - tau| / max(max |tau|, 1)
    double energy_defect = 0.0;   // | |tau|^2 - int u.v | / max(|tau|^2, 1)
};

// Solves int P[Dv]:P[Dphi] = int u.phi over H^1_0 polynomials of degree N+1
// on the same partition and returns tau = P[Dv]. u holds component-major
// coefficients on BoxSpace(3, degree, subdivisions). The projection must give
// an R-elliptic operator, otherwise std::invalid_argument("operator not
// elliptic") is thrown.
RightInverse div_right_inverse(const Eigen::VectorXd& u, Codomain projection, int degree, int subdivisions = 1);

// Same with an explicit 9 x 9 projection matrix on row-major coordinates.
RightInverse div_right_inverse(const Eigen::VectorXd& u, const Eigen::MatrixXd& projection, int degree,
                               int subdivisions = 1);

// Scalar version: int grad v . grad phi = int kappa phi, t = grad v.
RightInverse scalar_div_right_inverse(const Eigen::VectorXd& kappa, int degree, int subdivisions = 1);

}  // namespace r13
