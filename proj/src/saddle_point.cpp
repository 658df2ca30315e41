#include "r13/saddle_point.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "r13/linalg.hpp"

namespace r13 {

Eigen::MatrixXd kernel_basis(const MixedSystem& system, double tol)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("kernel tolerance must be > 0");
    // ker B = left null space of B^T
    return left_null_space(system.B.transpose(), tol);
}

CoercivityResult coercivity_constant(const MixedSystem& system, const Eigen::MatrixXd& z)
{
    if (z.cols() == 0)
        throw std::invalid_argument("trivial kernel");
    const Eigen::MatrixXd sym_a = 0.5 * (system.A + system.A.transpose());
    const EigenPair ep = smallest_generalized_eigen(z.transpose() * sym_a * z, z.transpose() * system.MV * z);
    CoercivityResult out;
    out.alpha0 = ep.value;
    out.minimizer = z * ep.vector;
    out.minimizer /= gram_norm(out.minimizer, system.MV);
    return out;
}

InfSupResult infsup_constant(const Eigen::MatrixXd& b, const Eigen::MatrixXd& mv, const Eigen::MatrixXd& mq,
                             double tol)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("rank tolerance must be > 0");
    cholesky_factor(mq, "M_Q");
    const Eigen::MatrixXd w = whiten(b, mq, mv);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
    const Eigen::VectorXd& s = svd.singularValues();
    InfSupResult out;
    if (s.size() == 0)
        return out;
    out.norm = s[0];
    // B^T has nQ generalized singular values when nQ <= nV
    const Eigen::Index nq = b.rows();
    const Eigen::Index available = std::min<Eigen::Index>(nq, s.size());
    out.dim_kernel_transpose = static_cast<int>(nq - available);
    out.k0 = 0.0;
    for (Eigen::Index i = 0; i < available; ++i) {
        if (s[i] < tol * s[0])
            ++out.dim_kernel_transpose;
        else
            out.k0 = s[i];
    }
    return out;
}

InfSupResult infsup_constant(const MixedSystem& system, double tol)
{
    return infsup_constant(system.B, system.MV, system.MQ, tol);
}

double operator_norm(const Eigen::MatrixXd& form, const Eigen::MatrixXd& left_gram, const Eigen::MatrixXd& right_gram)
{
    const Eigen::MatrixXd w = whiten(form, left_gram, right_gram);
    if (w.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
    return svd.singularValues()[0];
}

BrezziConstants brezzi_constants(const MixedSystem& system)
{
    BrezziConstants c;
    const Eigen::MatrixXd z = kernel_basis(system);
    c.dim_kerB = static_cast<int>(z.cols());
    c.alpha0 = coercivity_constant(system, z).alpha0;
    const InfSupResult is = infsup_constant(system);
    c.k0 = is.k0;
    c.normB = is.norm;
    c.dim_kerBT = is.dim_kernel_transpose;
    c.normA = operator_norm(system.A, system.MV, system.MV);
    return c;
}

MixedSolution solve_mixed(const MixedSystem& system)
{
    const Eigen::Index nv = system.A.rows();
    const Eigen::Index nq = system.B.rows();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nv + nq, nv + nq);
    k.topLeftCorner(nv, nv) = system.A;
    k.topRightCorner(nv, nq) = system.B.transpose();
    k.bottomLeftCorner(nq, nv) = system.B;
    Eigen::VectorXd rhs(nv + nq);
    rhs << system.F, system.G;

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
    if (!lu.isInvertible()) {
        const InfSupResult is = infsup_constant(system);
        throw std::runtime_error("discrete pairing deficient: dim ker B^T = " +
                                 std::to_string(is.dim_kernel_transpose) + ", saddle matrix rank " +
                                 std::to_string(lu.rank()) + " of " + std::to_string(nv + nq));
    }
    Eigen::VectorXd x = lu.solve(rhs);
    x += lu.solve(rhs - k * x);

    MixedSolution sol;
    sol.U = x.head(nv);
    sol.P = x.tail(nq);
    const double nf = system.F.norm();
    const double rp = (system.A * sol.U + system.B.transpose() * sol.P - system.F).norm();
    sol.residual_primal = nf > 0.0 ? rp / nf : rp;
    sol.residual_constraint = (system.B * sol.U - system.G).norm() / std::max(system.G.norm(), 1.0);
    return sol;
}

StabilityBounds stability_bounds(const MixedSystem& system, const MixedSolution& solution,
                                 const BrezziConstants& c)
{
    if (!(c.alpha0 > 0.0) || !(c.k0 > 0.0))
        throw std::invalid_argument("stability bounds need alpha0 > 0 and k0 > 0");
    StabilityBounds b;
    b.normU = gram_norm(solution.U, system.MV);
    b.normP = gram_norm(solution.P, system.MQ);
    b.dualF = dual_norm(system.F, system.MV);
    b.dualG = dual_norm(system.G, system.MQ);
    const double ratio = c.normA / c.alpha0;
    b.boundU = b.dualF / c.alpha0 + (ratio + 1.0) * b.dualG / c.k0;
    b.boundP = (1.0 + ratio) * b.dualF / c.k0 + c.normA / (c.k0 * c.k0) * (1.0 + ratio) * b.dualG;
    return b;
}

LimitResiduals limit_consistency(const DiscreteSpaces& spaces, const Eigen::VectorXd& U, const Eigen::VectorXd& P,
                                 const ModelParams& params)
{
    params.validate();
    const FieldEvaluator ev(spaces, U, P);
    const double kn = params.kn;
    double ns_sq = 0.0, sigma_sq = 0.0, f_sq = 0.0, s_sq = 0.0;
    spaces.scalar.for_each_volume_point([&](const PointBasis& pb, double w) {
        const PointFields f = ev.at(pb);
        const RTensor2 ns = f.sigma + (2.0 * kn) * project2(f.grad_u, Proj2::stf);
        ns_sq += w * frobenius(ns, ns);
        sigma_sq += w * frobenius(f.sigma, f.sigma);
        for (std::size_t i = 0; i < 3; ++i) {
            const double r = f.s[i] + 3.75 * kn * f.grad_theta[i];
            f_sq += w * r * r;
            s_sq += w * f.s[i] * f.s[i];
        }
    });
    return {std::sqrt(ns_sq) / std::max(std::sqrt(sigma_sq), kn), std::sqrt(f_sq) / std::max(std::sqrt(s_sq), kn)};
}

}  // namespace r13
