#include "r13/korn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "r13/linalg.hpp"

namespace r13 {

namespace {

bool is_sym_vectors(const OperatorSpec& op)
{
    return op.domain == DomainSpace::vectors && op.codomain == Codomain::sym;
}

bool is_stf_tensors(const OperatorSpec& op)
{
    return op.domain == DomainSpace::stf2 && op.codomain == Codomain::Stf;
}

void require_korn_operator(const OperatorSpec& op)
{
    if (!(is_sym_vectors(op) || is_stf_tensors(op)) || (op.dim != 2 && op.dim != 3))
        throw std::invalid_argument("unsupported Korn operator");
}

// Ambient coordinates (rows) of the field components (columns).
Eigen::MatrixXd component_frame(const OperatorSpec& op)
{
    if (is_sym_vectors(op))
        return Eigen::MatrixXd::Identity(op.dim, op.dim);
    const auto basis = stf_basis(2, op.dim);
    Eigen::MatrixXd e(op.dim * op.dim, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a)
        e.col(static_cast<Eigen::Index>(a)) = basis[a];
    return e;
}

Eigen::MatrixXd operator_projection(const OperatorSpec& op)
{
    return is_sym_vectors(op) ? projection_matrix(Proj2::sym, op.dim) : projection_matrix(Proj3::Stf, op.dim);
}

Eigen::MatrixXd value_op(const Eigen::MatrixXd& e, const Eigen::VectorXd& val)
{
    const Eigen::Index ns = val.size();
    Eigen::MatrixXd out(e.rows(), e.cols() * ns);
    for (Eigen::Index a = 0; a < e.cols(); ++a)
        out.middleCols(a * ns, ns) = e.col(a) * val.transpose();
    return out;
}

// (amb*d) x (m*ns): row amb*d + k holds E(amb, a) d_k phi.
Eigen::MatrixXd grad_op(const Eigen::MatrixXd& e, const Eigen::MatrixXd& grad)
{
    const Eigen::Index ns = grad.cols();
    const Eigen::Index d = grad.rows();
    Eigen::MatrixXd out(e.rows() * d, e.cols() * ns);
    for (Eigen::Index r = 0; r < e.rows(); ++r)
        for (Eigen::Index k = 0; k < d; ++k)
            for (Eigen::Index a = 0; a < e.cols(); ++a)
                out.block(r * d + k, a * ns, 1, ns) = e(r, a) * grad.row(k);
    return out;
}

double sq(double x) { return x * x; }

}  // namespace

KornQuotient korn_quotient(const OperatorSpec& op, const BoxSpace& space, const Eigen::VectorXd& coeffs)
{
    require_korn_operator(op);
    if (space.dim() != op.dim)
        throw std::invalid_argument("korn_quotient: space dimension mismatch");
    const Eigen::MatrixXd e = component_frame(op);
    const Eigen::Index ns = space.size();
    if (coeffs.size() != e.cols() * ns)
        throw std::invalid_argument("korn_quotient: coefficient size mismatch");
    const Eigen::Map<const Eigen::MatrixXd> c(coeffs.data(), ns, e.cols());
    const int d = op.dim;
    KornQuotient q;
    space.for_each_volume_point([&](const PointBasis& pb, double w) {
        const Eigen::VectorXd amb = e * (c.transpose() * pb.val);    // ambient values
        const Eigen::MatrixXd g = e * (pb.grad * c).transpose();    // (amb, k)
        q.l2_sq += w * amb.squaredNorm();
        q.h1_sq += w * (amb.squaredNorm() + g.squaredNorm());
        if (is_sym_vectors(op)) {
            RTensor2 dv(d);
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k)
                    dv(i, k) = g(i, k);
            const RTensor2 pd = project2(dv, Proj2::sym);
            q.op_sq += w * frobenius(pd, pd);
        } else {
            RTensor3 ds(d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k)
                        ds(i, j, k) = g(i * d + j, k);
            const RTensor3 pd = project3(ds, Proj3::Stf);
            q.op_sq += w * frobenius(pd, pd);
        }
    });
    return q;
}

KornEstimate korn_constant(const OperatorSpec& op, int degree, int subdivisions)
{
    require_korn_operator(op);
    const BoxSpace space(op.dim, degree, subdivisions);
    const Eigen::MatrixXd e = component_frame(op);
    const Eigen::MatrixXd proj = operator_projection(op);
    const Eigen::Index n = e.cols() * space.size();
    Eigen::MatrixXd h1 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd den = Eigen::MatrixXd::Zero(n, n);
    space.for_each_volume_point([&](const PointBasis& pb, double w) {
        const Eigen::MatrixXd v = value_op(e, pb.val);
        const Eigen::MatrixXd g = grad_op(e, pb.grad);
        const Eigen::MatrixXd pg = proj * g;
        const Eigen::MatrixXd mass = v.transpose() * v;
        h1.noalias() += w * (mass + g.transpose() * g);
        den.noalias() += w * (mass + pg.transpose() * pg);
    });
    const EigenPair top = largest_generalized_eigen(h1, den);

    KornEstimate out;
    out.op = op;
    out.degree = degree;
    out.subdivisions = subdivisions;
    out.constant = top.value;
    out.extremizer = top.vector / gram_norm(top.vector, den);
    Eigen::Index imax = 0;
    out.extremizer.cwiseAbs().maxCoeff(&imax);
    if (out.extremizer[imax] < 0)
        out.extremizer = -out.extremizer;
    const KornQuotient q = korn_quotient(op, space, out.extremizer);
    out.rayleigh_ratio = q.ratio();
    out.sum_of_norms_ratio = std::sqrt(q.h1_sq) / (std::sqrt(q.l2_sq) + std::sqrt(q.op_sq));
    return out;
}

bool ChainLine::holds(double rel_tol) const
{
    const double tiny = std::numeric_limits<double>::min();
    const bool equal = std::abs(value - expanded) <= rel_tol * std::max({std::abs(value), std::abs(expanded), tiny});
    const bool first = expanded >= lower - rel_tol * std::abs(expanded);
    const bool second = lower >= korn_lower - rel_tol * std::abs(lower);
    return equal && first && second;
}

CoercivityChain::CoercivityChain(const DiscreteSpaces& spaces, const ModelParams& params)
    : spaces_(&spaces), params_(params)
{
    params.validate();
    a_ = assemble_form(FormId::a, spaces, params);
    dbar_ = assemble_form(FormId::dbar, spaces, params);
    korn_sym_ = korn_constant({DomainSpace::vectors, Codomain::sym, 3}, spaces.degree, spaces.subdivisions).constant;
    korn_stf_ = korn_constant({DomainSpace::stf2, Codomain::Stf, 3}, spaces.degree, spaces.subdivisions).constant;
}

ChainReport CoercivityChain::check(const Eigen::VectorXd& U) const
{
    const DiscreteSpaces& sp = *spaces_;
    const double kn = params_.kn, chi = params_.chi_tilde, eps = params_.epsilon_w;
    const FieldEvaluator ev(sp, U, Eigen::VectorXd());

    double sym_ds = 0, div_s = 0, s_l2 = 0, s_h1 = 0, sn = 0, st = 0;
    double stf_dsig = 0, sig_l2 = 0, sig_h1 = 0;
    double b_nn = 0, b_comb = 0, b_t1t2 = 0, b_nt = 0, b_total = 0;
    sp.scalar.for_each_volume_point([&](const PointBasis& pb, double w) {
        const PointFields f = ev.at(pb);
        const RTensor2 sd = project2(f.grad_s, Proj2::sym);
        const RTensor3 td = project3(f.grad_sigma, Proj3::Stf);
        const double s2 = sq(f.s[0]) + sq(f.s[1]) + sq(f.s[2]);
        sym_ds += w * frobenius(sd, sd);
        div_s += w * sq(f.grad_s.trace());
        s_l2 += w * s2;
        s_h1 += w * (s2 + frobenius(f.grad_s, f.grad_s));
        stf_dsig += w * frobenius(td, td);
        sig_l2 += w * frobenius(f.sigma, f.sigma);
        sig_h1 += w * (frobenius(f.sigma, f.sigma) + frobenius(f.grad_sigma, f.grad_sigma));
    });
    sp.scalar.for_each_boundary_point([&](const PointBasis& pb, double w, int axis, int sign) {
        const Frame fr = Frame::axis_aligned(axis, sign);
        const PointFields f = ev.at(pb);
        const VectorComponents sc = frame_components(f.s, fr);
        const Tensor2Components tc = frame_components(f.sigma, fr);
        sn += w * sq(sc.n);
        st += w * (sq(sc.t1) + sq(sc.t2));
        b_nn += w * sq(tc.nn);
        b_comb += w * sq(tc.t1t1 + 0.5 * tc.nn);
        b_t1t2 += w * sq(tc.t1t2);
        b_nt += w * (sq(tc.nt1) + sq(tc.nt2));
        b_total += w * sq(f.p + tc.nn);
    });

    ChainReport r;
    r.a.value = U.dot(a_ * U);
    r.a.expanded = (24.0 / 25.0) * kn * sym_ds + (12.0 / 25.0) * kn * div_s + (4.0 / 15.0) / kn * s_l2 +
                   0.5 / chi * sn + (12.0 / 25.0) * chi * st;
    r.a.min_coeff = std::min((24.0 / 25.0) * kn, (4.0 / 15.0) / kn);
    r.a.lower = r.a.min_coeff * (sym_ds + s_l2);
    r.a.korn = korn_sym_;
    r.a.h1_sq = s_h1;
    r.a.korn_lower = r.a.min_coeff / korn_sym_ * s_h1;

    r.dbar.value = U.dot(dbar_ * U);
    r.dbar.expanded = kn * stf_dsig + 0.5 / kn * sig_l2 + (9.0 / 8.0) * chi * b_nn + chi * b_comb + chi * b_t1t2 +
                      (1.0 / chi) * b_nt + eps * chi * b_total;
    r.dbar.min_coeff = std::min(kn, 0.5 / kn);
    r.dbar.lower = r.dbar.min_coeff * (stf_dsig + sig_l2);
    r.dbar.korn = korn_stf_;
    r.dbar.h1_sq = sig_h1;
    r.dbar.korn_lower = r.dbar.min_coeff / korn_stf_ * sig_h1;
    return r;
}

CoercivityChain::Sweep CoercivityChain::sweep(int count, std::uint64_t seed, double rel_tol) const
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Sweep out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (int n = 0; n < count; ++n) {
        Eigen::VectorXd u(spaces_->dim_v());
        for (Eigen::Index i = 0; i < u.size(); ++i)
            u[i] = normal(rng);
        const ChainReport r = check(u);
        ++out.fields;
        if (!r.a.holds(rel_tol) || !r.dbar.holds(rel_tol))
            ++out.violations;
        for (const ChainLine* l : {&r.a, &r.dbar}) {
            out.worst_margin = std::min(out.worst_margin, (l->expanded - l->lower) / std::abs(l->expanded));
            out.worst_margin = std::min(out.worst_margin, (l->lower - l->korn_lower) / std::abs(l->lower));
        }
    }
    return out;
}

ChainReport coercivity_chain_check(const Eigen::VectorXd& U, const DiscreteSpaces& spaces, const ModelParams& params)
{
    return CoercivityChain(spaces, params).check(U);
}

namespace {

// Sampled R-ellipticity of v -> P[Dv] on vector fields in R^3.
bool projection_is_elliptic(const Eigen::MatrixXd& p)
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int n = 0; n < 2003; ++n) {
        Eigen::Vector3d xi = Eigen::Vector3d::Zero();
        if (n < 3)
            xi[n] = 1.0;
        else
            xi = Eigen::Vector3d(normal(rng), normal(rng), normal(rng)).normalized();
        Eigen::MatrixXd sym(9, 3);
        for (int a = 0; a < 3; ++a) {
            Eigen::VectorXd dyad = Eigen::VectorXd::Zero(9);
            for (int k = 0; k < 3; ++k)
                dyad[a * 3 + k] = xi[k];
            sym.col(a) = p * dyad;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(sym);
        if (svd.singularValues()[2] < kEllipticityThreshold)
            return false;
    }
    return true;
}

RightInverse solve_vector_right_inverse(const Eigen::VectorXd& u, const Eigen::MatrixXd& p, int degree,
                                        int subdivisions)
{
    const BoxSpace data(3, degree, subdivisions);
    const BoxSpace trial(3, degree + 1, subdivisions, true);
    const Eigen::Index nd = data.size(), nt = trial.size();
    if (u.size() != 3 * nd)
        throw std::invalid_argument("right inverse: data coefficient size mismatch");
    const Eigen::Map<const Eigen::MatrixXd> uc(u.data(), nd, 3);
    const Eigen::MatrixXd i3 = Eigen::MatrixXd::Identity(3, 3);

    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(3 * nt, 3 * nt);
    Eigen::MatrixXd h1 = Eigen::MatrixXd::Zero(3 * nt, 3 * nt);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * nt);
    trial.for_each_volume_point([&](const PointBasis& pb, double w) {
        const Eigen::Vector3d uval = uc.transpose() * data.eval(pb.x).val;
        const Eigen::MatrixXd v = value_op(i3, pb.val);
        const Eigen::MatrixXd g = grad_op(i3, pb.grad);
        const Eigen::MatrixXd pg = p * g;
        k.noalias() += w * pg.transpose() * pg;
        h1.noalias() += w * (v.transpose() * v + g.transpose() * g);
        rhs.noalias() += w * v.transpose() * uval;
    });

    RightInverse out;
    out.v = k.ldlt().solve(rhs);

    Eigen::VectorXd weak = -rhs;
    double tau_l2 = 0, dtau = 0, u_l2 = 0, uv = 0, range = 0, tau_max = 0;
    trial.for_each_volume_point(
        [&](const PointBasis& pb, double w) {
            const Eigen::Vector3d uval = uc.transpose() * data.eval(pb.x).val;
            const Eigen::MatrixXd v = value_op(i3, pb.val);
            const Eigen::MatrixXd g = grad_op(i3, pb.grad);
            const Eigen::VectorXd tau = p * (g * out.v);  // row-major 3x3
            // (D tau)_{(ij) k} = sum_{lm} P_{(ij),(lm)} d_k d_m v_l
            Eigen::VectorXd hv(27);
            for (int l = 0; l < 3; ++l)
                for (int m = 0; m < 3; ++m)
                    for (int kk = 0; kk < 3; ++kk)
                        hv[(l * 3 + m) * 3 + kk] = pb.hess.row(m * 3 + kk).dot(out.v.segment(l * nt, nt));
            Eigen::VectorXd dt = Eigen::VectorXd::Zero(27);
            for (int ij = 0; ij < 9; ++ij)
                for (int lm = 0; lm < 9; ++lm)
                    if (p(ij, lm) != 0.0)
                        for (int kk = 0; kk < 3; ++kk)
                            dt[ij * 3 + kk] += p(ij, lm) * hv[lm * 3 + kk];
            tau_l2 += w * tau.squaredNorm();
            dtau += w * dt.squaredNorm();
            u_l2 += w * uval.squaredNorm();
            uv += w * uval.dot(v * out.v);
            weak.noalias() += w * g.transpose() * tau;
            tau_max = std::max(tau_max, tau.cwiseAbs().maxCoeff());
            range = std::max(range, (p * tau - tau).cwiseAbs().maxCoeff());
        },
        true);

    out.tau_h1 = std::sqrt(tau_l2 + dtau);
    out.data_l2 = std::sqrt(u_l2);
    out.bound_ratio = out.data_l2 > 0.0 ? out.tau_h1 / out.data_l2 : 0.0;
    out.weak_residual = dual_norm(weak, h1);
    out.range_residual = range / std::max(tau_max, 1.0);
    out.energy_defect = std::abs(tau_l2 - uv) / std::max(tau_l2, 1.0);
    return out;
}

Eigen::MatrixXd codomain_projection(Codomain c)
{
    switch (c) {
    case Codomain::identity:
        return projection_matrix(Proj2::identity, 3);
    case Codomain::sym:
        return projection_matrix(Proj2::sym, 3);
    case Codomain::dev:
        return projection_matrix(Proj2::dev, 3);
    case Codomain::stf:
        return projection_matrix(Proj2::stf, 3);
    default:
        throw std::invalid_argument("right inverse needs a rank-2 projection");
    }
}

}  // namespace

RightInverse div_right_inverse(const Eigen::VectorXd& u, Codomain projection, int degree, int subdivisions)
{
    const OperatorSpec op{DomainSpace::vectors, projection, 3};
    op.validate();
    if (!check_ellipticity(op, EllipticityMode::R).elliptic)
        throw std::invalid_argument("operator not elliptic");
    return solve_vector_right_inverse(u, codomain_projection(projection), degree, subdivisions);
}

RightInverse div_right_inverse(const Eigen::VectorXd& u, const Eigen::MatrixXd& projection, int degree,
                               int subdivisions)
{
    if (projection.rows() != 9 || projection.cols() != 9)
        throw std::invalid_argument("right inverse: projection must be 9 x 9");
    if (!projection_is_elliptic(projection))
        throw std::invalid_argument("operator not elliptic");
    return solve_vector_right_inverse(u, projection, degree, subdivisions);
}

RightInverse scalar_div_right_inverse(const Eigen::VectorXd& kappa, int degree, int subdivisions)
{
    const BoxSpace data(3, degree, subdivisions);
    const BoxSpace trial(3, degree + 1, subdivisions, true);
    const Eigen::Index nt = trial.size();
    if (kappa.size() != data.size())
        throw std::invalid_argument("right inverse: data coefficient size mismatch");

    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nt, nt);
    Eigen::MatrixXd h1 = Eigen::MatrixXd::Zero(nt, nt);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nt);
    trial.for_each_volume_point([&](const PointBasis& pb, double w) {
        const double kv = kappa.dot(data.eval(pb.x).val);
        const Eigen::MatrixXd gg = pb.grad.transpose() * pb.grad;
        k.noalias() += w * gg;
        h1.noalias() += w * (pb.val * pb.val.transpose() + gg);
        rhs.noalias() += w * kv * pb.val;
    });

    RightInverse out;
    out.v = k.ldlt().solve(rhs);
    Eigen::VectorXd weak = -rhs;
    double t_l2 = 0, dt = 0, k_l2 = 0, kv_int = 0;
    trial.for_each_volume_point(
        [&](const PointBasis& pb, double w) {
            const double kv = kappa.dot(data.eval(pb.x).val);
            const Eigen::VectorXd t = pb.grad * out.v;
            const Eigen::VectorXd ht = pb.hess * out.v;
            t_l2 += w * t.squaredNorm();
            dt += w * ht.squaredNorm();
            k_l2 += w * kv * kv;
            kv_int += w * kv * pb.val.dot(out.v);
            weak.noalias() += w * pb.grad.transpose() * t;
        },
        true);
    out.tau_h1 = std::sqrt(t_l2 + dt);
    out.data_l2 = std::sqrt(k_l2);
    out.bound_ratio = out.data_l2 > 0.0 ? out.tau_h1 / out.data_l2 : 0.0;
    out.weak_residual = dual_norm(weak, h1);
    out.range_residual = 0.0;
    out.energy_defect = std::abs(t_l2 - kv_int) / std::max(t_l2, 1.0);
    return out;
}

}  // namespace r13
