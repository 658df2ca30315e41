#pragma once

// Brezzi constants, direct solution and a posteriori stability checks for an
// assembled MixedSystem. All constants are discrete measurements in the
// norms given by M_V (H^1 on every V component) and M_Q (L^2).

#include <Eigen/Dense>

#include "r13/galerkin.hpp"

namespace r13 {

// Singular values below tol * sigma_max count as zero.
inline constexpr double kKernelRankTol = 1e-10;

// Euclidean-orthonormal basis of ker B (columns).
Eigen::MatrixXd kernel_basis(const MixedSystem& system, double tol = kKernelRankTol);

struct CoercivityResult {
    double alpha0 = 0.0;
    Eigen::VectorXd minimizer;  // V coordinates, unit M_V norm
};

// Smallest eigenpair of (Z^T sym(A) Z, Z^T M_V Z). Throws "trivial kernel"
// for an empty Z.
CoercivityResult coercivity_constant(const MixedSystem& system, const Eigen::MatrixXd& z);

struct InfSupResult {
    double k0 = 0.0;   // smallest generalized singular value above the cut
    double norm = 0.0; // largest generalized singular value (= operator norm)
    int dim_kernel_transpose = 0;
};

// Generalized singular values of B in the (M_Q, M_V) norms; their squares
// are the eigenvalues of (B M_V^{-1} B^T, M_Q).
InfSupResult infsup_constant(const Eigen::MatrixXd& b, const Eigen::MatrixXd& mv, const Eigen::MatrixXd& mq,
                             double tol = kKernelRankTol);
InfSupResult infsup_constant(const MixedSystem& system, double tol = kKernelRankTol);

// sup |y^T K x| / (|y|_left |x|_right), rows of K paired with left_gram.
double operator_norm(const Eigen::MatrixXd& form, const Eigen::MatrixXd& left_gram, const Eigen::MatrixXd& right_gram);

struct BrezziConstants {
    double alpha0 = 0.0;
    double k0 = 0.0;
    double normA = 0.0;
    double normB = 0.0;
    int dim_kerB = 0;
    int dim_kerBT = 0;
};

BrezziConstants brezzi_constants(const MixedSystem& system);

struct MixedSolution {
    Eigen::VectorXd U;
    Eigen::VectorXd P;
    double residual_primal = 0.0;      // |A U + B^T P - F| / |F|  (0/0 := 0)
    double residual_constraint = 0.0;  // |B U - G| / max(|G|, 1)
};

// Direct solve of [[A, B^T], [B, 0]] by full-pivoting LU with one step of
// iterative refinement. Throws std::runtime_error("discrete pairing
// deficient ...") if the block matrix is singular.
MixedSolution solve_mixed(const MixedSystem& system);

struct StabilityBounds {
    double normU = 0.0, normP = 0.0;
    double dualF = 0.0, dualG = 0.0;
    double boundU = 0.0, boundP = 0.0;
    bool holds() const { return normU <= boundU && normP <= boundP; }
};

// |U| <= |F|/a0 + (|A|/a0 + 1)|G|/k0,
// |P| <= (1/k0)(1 + |A|/a0)|F| + (|A|/k0^2)(1 + |A|/a0)|G|.
StabilityBounds stability_bounds(const MixedSystem& system, const MixedSolution& solution,
                                 const BrezziConstants& constants);

struct LimitResiduals {
    double res_ns = 0.0;       // |sigma + 2 Kn stf D u| / max(|sigma|, Kn)
    double res_fourier = 0.0;  // |s + (15/4) Kn grad theta| / max(|s|, Kn)
};

LimitResiduals limit_consistency(const DiscreteSpaces& spaces, const Eigen::VectorXd& U, const Eigen::VectorXd& P,
                                 const ModelParams& params);

}  // namespace r13
