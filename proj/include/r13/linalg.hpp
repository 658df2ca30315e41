#pragma once

// Dense helpers shared by the analysis modules.

#include <Eigen/Dense>

namespace r13 {

// Lower Cholesky factor L of an SPD matrix (M = L L^T); throws
// std::invalid_argument(what + " is not positive definite") otherwise.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& m, const char* what);

// W = L_left^{-1} K L_right^{-T}: the form K expressed in orthonormal
// coordinates of the two Gram matrices. Its singular values are the
// generalized singular values of K.
Eigen::MatrixXd whiten(const Eigen::MatrixXd& k, const Eigen::MatrixXd& left_gram,
                       const Eigen::MatrixXd& right_gram);

// Orthonormal basis (columns) of the Euclidean complement of the column span
// of w, which must have full column rank. Deterministic: built from a
// Householder QR of w.
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& w);

// Orthonormal basis of the left null space {y : y^T m = 0}, using the rank
// cut sigma < rel_tol * sigma_max. Empty (n x 0) when m has full row rank.
Eigen::MatrixXd left_null_space(const Eigen::MatrixXd& m, double rel_tol);

// Smallest generalized eigenpair of the symmetric pencil (K, M), M SPD.
struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector;
};
EigenPair smallest_generalized_eigen(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m);
EigenPair largest_generalized_eigen(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m);

// sqrt(f^T M^{-1} f): the discrete dual norm.
double dual_norm(const Eigen::VectorXd& f, const Eigen::MatrixXd& gram);

// sqrt(x^T M x).
double gram_norm(const Eigen::VectorXd& x, const Eigen::MatrixXd& gram);

// Symmetry defect max|M - M^T| relative to max(max|M|, 1).
double symmetry_defect(const Eigen::MatrixXd& m);

}  // namespace r13
