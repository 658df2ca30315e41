#include "r13/linalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace r13 {

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& m, const char* what)
{
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument(std::string(what) + " is not positive definite");
    Eigen::MatrixXd l = llt.matrixL();
    if (l.diagonal().minCoeff() <= 0.0)
        throw std::invalid_argument(std::string(what) + " is not positive definite");
    return l;
}

Eigen::MatrixXd whiten(const Eigen::MatrixXd& k, const Eigen::MatrixXd& left_gram,
                       const Eigen::MatrixXd& right_gram)
{
    const Eigen::MatrixXd ll = cholesky_factor(left_gram, "left Gram matrix");
    const Eigen::MatrixXd lr = cholesky_factor(right_gram, "right Gram matrix");
    Eigen::MatrixXd w = ll.triangularView<Eigen::Lower>().solve(k);
    // w <- w L_r^{-T}  <=>  w^T <- L_r^{-1} w^T
    Eigen::MatrixXd wt = lr.triangularView<Eigen::Lower>().solve(w.transpose());
    return wt.transpose();
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& w)
{
    const Eigen::Index n = w.rows();
    if (w.cols() == 0)
        return Eigen::MatrixXd::Identity(n, n);
    if (w.cols() > n || w.norm() == 0.0)
        throw std::invalid_argument("orthogonal_complement: degenerate input");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return q.rightCols(n - w.cols());
}

Eigen::MatrixXd left_null_space(const Eigen::MatrixXd& m, double rel_tol)
{
    if (!(rel_tol > 0.0))
        throw std::invalid_argument("rank tolerance must be > 0");
    const Eigen::Index n = m.rows();
    if (m.cols() == 0)
        return Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.transpose(), Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] >= rel_tol * s[0] && s[0] > 0.0)
            ++rank;
    return svd.matrixV().rightCols(n - rank);
}

namespace {

Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> pencil(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m)
{
    if (k.rows() == 0 || k.rows() != m.rows())
        throw std::invalid_argument("generalized eigenproblem: empty or mismatched pencil");
    cholesky_factor(m, "pencil mass matrix");
    const Eigen::MatrixXd ks = 0.5 * (k + k.transpose());
    const Eigen::MatrixXd ms = 0.5 * (m + m.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ks, ms);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("generalized eigenproblem did not converge");
    return es;
}

}  // namespace

EigenPair smallest_generalized_eigen(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m)
{
    const auto es = pencil(k, m);
    return {es.eigenvalues()[0], es.eigenvectors().col(0)};
}

EigenPair largest_generalized_eigen(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m)
{
    const auto es = pencil(k, m);
    const Eigen::Index last = es.eigenvalues().size() - 1;
    return {es.eigenvalues()[last], es.eigenvectors().col(last)};
}

double dual_norm(const Eigen::VectorXd& f, const Eigen::MatrixXd& gram)
{
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("dual norm: Gram matrix is not positive definite");
    return std::sqrt(std::max(0.0, f.dot(llt.solve(f))));
}

double gram_norm(const Eigen::VectorXd& x, const Eigen::MatrixXd& gram)
{
    return std::sqrt(std::max(0.0, x.dot(gram * x)));
}

double symmetry_defect(const Eigen::MatrixXd& m)
{
    if (m.size() == 0)
        return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff() / std::max(m.cwiseAbs().maxCoeff(), 1.0);
}

}  // namespace r13
