#include "r13/galerkin.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "r13/linalg.hpp"

namespace r13 {

void ModelParams::validate() const
{
    if (!(kn > 0.0) || !std::isfinite(kn))
        throw std::invalid_argument("kn must be a finite value > 0");
    if (!(chi_tilde > 0.0) || !std::isfinite(chi_tilde))
        throw std::invalid_argument("chi_tilde must be a finite value > 0");
    if (!(epsilon_w >= 0.0) || !std::isfinite(epsilon_w))
        throw std::invalid_argument("epsilon_w must be a finite value >= 0");
}

BoundaryData BoundaryData::uniform(const FaceData& data)
{
    BoundaryData b;
    b.faces.fill(data);
    return b;
}

void BoundaryData::validate() const
{
    for (const auto& f : faces)
        if (!std::isfinite(f.un) || !std::isfinite(f.ut1) || !std::isfinite(f.ut2) || !std::isfinite(f.p) ||
            !std::isfinite(f.theta))
            throw std::invalid_argument("boundary data must be finite");
}

PressureMode pressure_mode_for(const ModelParams& params)
{
    return params.epsilon_w == 0.0 ? PressureMode::zero_mean : PressureMode::full;
}

Eigen::MatrixXd DiscreteSpaces::v_transform() const
{
    const int ns = scalar_size();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(full_v(), dim_v());
    t.topLeftCorner(8 * ns, 8 * ns).setIdentity();
    t.block(8 * ns, p.offset, ns, p.size) = p_transform;
    return t;
}

Eigen::MatrixXd DiscreteSpaces::q_full_transform() const
{
    const int ns = scalar_size();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(full_q(), dim_q());
    t.block(0, u.offset, 3 * ns, u.size) = u_transform;
    t.block(3 * ns, theta.offset, ns, theta.size) = theta_transform;
    return t;
}

Eigen::VectorXd DiscreteSpaces::expand_v(const Eigen::VectorXd& reduced) const
{
    const int ns = scalar_size();
    Eigen::VectorXd full = Eigen::VectorXd::Zero(full_v());
    if (reduced.size() == 0)
        return full;
    if (reduced.size() != dim_v())
        throw std::invalid_argument("V coefficient vector has the wrong size");
    full.head(8 * ns) = reduced.head(8 * ns);
    full.tail(ns) = p_transform * reduced.segment(p.offset, p.size);
    return full;
}

Eigen::VectorXd DiscreteSpaces::expand_q(const Eigen::VectorXd& reduced) const
{
    const int ns = scalar_size();
    Eigen::VectorXd full = Eigen::VectorXd::Zero(full_q());
    if (reduced.size() == 0)
        return full;
    if (reduced.size() != dim_q())
        throw std::invalid_argument("Q coefficient vector has the wrong size");
    full.head(3 * ns) = u_transform * reduced.segment(u.offset, u.size);
    full.tail(ns) = theta_transform * reduced.segment(theta.offset, theta.size);
    return full;
}

namespace {
Eigen::MatrixXd constraint_full(const DiscreteSpaces& sp);
}  // namespace

DiscreteSpaces build_spaces(int degree, int subdivisions, PressureMode pressure_mode, QPairing q_pairing)
{
    if (degree < 1)
        throw std::invalid_argument("polynomial degree must be >= 1");
    if (subdivisions < 1)
        throw std::invalid_argument("number of subdivisions must be >= 1");

    DiscreteSpaces sp;
    sp.degree = degree;
    sp.subdivisions = subdivisions;
    sp.pressure_mode = pressure_mode;
    sp.q_pairing = q_pairing;
    sp.scalar = BoxSpace(3, degree, subdivisions);
    sp.stf = stf_basis(2, 3);
    const int ns = sp.scalar.size();

    if (pressure_mode == PressureMode::zero_mean)
        sp.p_transform = orthogonal_complement(sp.scalar.integrals());
    else
        sp.p_transform = Eigen::MatrixXd::Identity(ns, ns);

    const int np = static_cast<int>(sp.p_transform.cols());
    sp.sigma = {0, 5 * ns};
    sp.s = {5 * ns, 3 * ns};
    sp.p = {8 * ns, np};

    sp.u_transform = Eigen::MatrixXd::Identity(3 * ns, 3 * ns);
    sp.theta_transform = Eigen::MatrixXd::Identity(ns, ns);
    if (q_pairing == QPairing::filtered) {
        // B does not depend on the model parameters.
        const Eigen::MatrixXd b = constraint_full(sp);
        const Eigen::MatrixXd mass = sp.scalar.mass();
        Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(3 * ns, 3 * ns);
        for (int c = 0; c < 3; ++c)
            mu.block(c * ns, c * ns, ns, ns) = mass;
        const Eigen::MatrixXd ku = left_null_space(b.topRows(3 * ns), kPairingRankTol);
        const Eigen::MatrixXd kt = left_null_space(b.bottomRows(ns), kPairingRankTol);
        sp.u_transform = orthogonal_complement(mu * ku);
        sp.theta_transform = orthogonal_complement(mass * kt);
        sp.removed_u = static_cast<int>(ku.cols());
        sp.removed_theta = static_cast<int>(kt.cols());
    }
    sp.u = {0, static_cast<int>(sp.u_transform.cols())};
    sp.theta = {sp.u.size, static_cast<int>(sp.theta_transform.cols())};
    return sp;
}

FormId parse_form_id(const std::string& name)
{
    static const std::pair<const char*, FormId> table[] = {
        {"a", FormId::a}, {"b", FormId::b}, {"c", FormId::c},       {"d", FormId::d}, {"e", FormId::e},
        {"f", FormId::f}, {"g", FormId::g}, {"h", FormId::h},       {"dbar", FormId::dbar},
        {"A", FormId::A}, {"B", FormId::B}, {"MV", FormId::MV},     {"MQ", FormId::MQ},
    };
    for (const auto& [key, id] : table)
        if (name == key)
            return id;
    throw std::invalid_argument("unknown form id: " + name);
}

namespace {

// Ambient coordinates of the sigma components as a 9 x 5 matrix.
Eigen::MatrixXd stf_frame(const DiscreteSpaces& sp)
{
    Eigen::MatrixXd e(9, 5);
    for (int a = 0; a < 5; ++a)
        e.col(a) = sp.stf[static_cast<std::size_t>(a)];
    return e;
}

// amb x (m*ns): column block a is E(:, a) * val^T.
Eigen::MatrixXd value_op(const Eigen::MatrixXd& e, const Eigen::VectorXd& val)
{
    const Eigen::Index ns = val.size();
    Eigen::MatrixXd out(e.rows(), e.cols() * ns);
    for (Eigen::Index a = 0; a < e.cols(); ++a)
        out.middleCols(a * ns, ns) = e.col(a) * val.transpose();
    return out;
}

// (amb*3) x (m*ns): row amb*3 + k holds E(amb, a) * d_k phi.
Eigen::MatrixXd grad_op(const Eigen::MatrixXd& e, const Eigen::MatrixXd& grad)
{
    const Eigen::Index ns = grad.cols();
    Eigen::MatrixXd out(e.rows() * 3, e.cols() * ns);
    for (Eigen::Index r = 0; r < e.rows(); ++r)
        for (int k = 0; k < 3; ++k)
            for (Eigen::Index a = 0; a < e.cols(); ++a)
                out.block(r * 3 + k, a * ns, 1, ns) = e(r, a) * grad.row(k);
    return out;
}

// Row sum_ij a_i b_j X(ij) of a 9-row value operator.
Eigen::RowVectorXd frame2(const Eigen::MatrixXd& x9, const std::array<double, 3>& a, const std::array<double, 3>& b)
{
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(x9.cols());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double w = a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
            if (w != 0.0)
                out += w * x9.row(i * 3 + j);
        }
    return out;
}

Eigen::RowVectorXd frame1(const Eigen::MatrixXd& x3, const std::array<double, 3>& a)
{
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(x3.cols());
    for (int i = 0; i < 3; ++i)
        if (a[static_cast<std::size_t>(i)] != 0.0)
            out += a[static_cast<std::size_t>(i)] * x3.row(i);
    return out;
}

// Forms in the full (unreduced) layouts.
struct FullForms {
    Eigen::MatrixXd a, c_raw, d, f, h, MV;  // full_v x full_v
    Eigen::MatrixXd b, e, g;                // full_q x full_v
    Eigen::MatrixXd MQ;                     // full_q x full_q
};

FullForms assemble_full(const DiscreteSpaces& sp, const ModelParams& prm)
{
    prm.validate();
    const int ns = sp.scalar_size();
    const int nv = sp.full_v();
    const int nqf = sp.full_q();
    const int os = 0, oss = 5 * ns, op = 8 * ns;  // full V offsets
    const int ou = 0, ot = 3 * ns;                // full Q offsets
    const double kn = prm.kn, chi = prm.chi_tilde, eps = prm.epsilon_w;

    FullForms ff;
    ff.a = ff.c_raw = ff.d = ff.f = ff.h = ff.MV = Eigen::MatrixXd::Zero(nv, nv);
    ff.b = ff.e = ff.g = Eigen::MatrixXd::Zero(nqf, nv);
    ff.MQ = Eigen::MatrixXd::Zero(nqf, nqf);

    const Eigen::MatrixXd es = stf_frame(sp);
    const Eigen::MatrixXd i3 = Eigen::MatrixXd::Identity(3, 3);
    const Eigen::MatrixXd p3 = projection_matrix(Proj3::Stf, 3);
    const Eigen::MatrixXd p2 = projection_matrix(Proj2::sym, 3);

    sp.scalar.for_each_volume_point([&](const PointBasis& pb, double w) {
        const Eigen::MatrixXd sv = value_op(es, pb.val);   // 9 x 5ns
        const Eigen::MatrixXd sg = grad_op(es, pb.grad);   // 27 x 5ns
        const Eigen::MatrixXd vv = value_op(i3, pb.val);   // 3 x 3ns
        const Eigen::MatrixXd vg = grad_op(i3, pb.grad);   // 9 x 3ns
        const Eigen::RowVectorXd pv = pb.val.transpose();  // 1 x ns
        const Eigen::MatrixXd& pg = pb.grad;               // 3 x ns

        const Eigen::MatrixXd stf_dsig = p3 * sg;
        const Eigen::MatrixXd sym_ds = p2 * vg;
        const Eigen::RowVectorXd div_s = vg.row(0) + vg.row(4) + vg.row(8);
        Eigen::MatrixXd div_sig(3, 5 * ns);
        for (int i = 0; i < 3; ++i)
            div_sig.row(i) = sg.row((i * 3 + 0) * 3 + 0) + sg.row((i * 3 + 1) * 3 + 1) + sg.row((i * 3 + 2) * 3 + 2);

        ff.a.block(oss, oss, 3 * ns, 3 * ns) += w * ((24.0 / 25.0) * kn * sym_ds.transpose() * sym_ds +
                                                     (12.0 / 25.0) * kn * div_s.transpose() * div_s +
                                                     (4.0 / 15.0) / kn * vv.transpose() * vv);
        ff.c_raw.block(oss, os, 3 * ns, 5 * ns) += w * (2.0 / 5.0) * vg.transpose() * sv;
        ff.d.block(os, os, 5 * ns, 5 * ns) +=
            w * (kn * stf_dsig.transpose() * stf_dsig + 0.5 / kn * sv.transpose() * sv);

        ff.e.block(ou, os, 3 * ns, 5 * ns) += w * vv.transpose() * div_sig;
        ff.g.block(ou, op, 3 * ns, ns) += w * vv.transpose() * pg;
        ff.b.block(ot, oss, ns, 3 * ns) += w * pv.transpose() * div_s;

        ff.MV.block(os, os, 5 * ns, 5 * ns) += w * (sv.transpose() * sv + sg.transpose() * sg);
        ff.MV.block(oss, oss, 3 * ns, 3 * ns) += w * (vv.transpose() * vv + vg.transpose() * vg);
        ff.MV.block(op, op, ns, ns) += w * (pv.transpose() * pv + pg.transpose() * pg);
        ff.MQ.block(ou, ou, 3 * ns, 3 * ns) += w * vv.transpose() * vv;
        ff.MQ.block(ot, ot, ns, ns) += w * pv.transpose() * pv;
    });

    sp.scalar.for_each_boundary_point([&](const PointBasis& pb, double w, int axis, int sign) {
        const Frame fr = Frame::axis_aligned(axis, sign);
        const Eigen::MatrixXd sv = value_op(es, pb.val);
        const Eigen::MatrixXd vv = value_op(i3, pb.val);
        const Eigen::RowVectorXd pv = pb.val.transpose();

        const Eigen::RowVectorXd sn = frame1(vv, fr.n), st1 = frame1(vv, fr.t1), st2 = frame1(vv, fr.t2);
        const Eigen::RowVectorXd snn = frame2(sv, fr.n, fr.n), snt1 = frame2(sv, fr.n, fr.t1),
                                 snt2 = frame2(sv, fr.n, fr.t2), st1t1 = frame2(sv, fr.t1, fr.t1),
                                 st1t2 = frame2(sv, fr.t1, fr.t2);
        const Eigen::RowVectorXd comb = st1t1 + 0.5 * snn;

        ff.a.block(oss, oss, 3 * ns, 3 * ns) +=
            w * (0.5 / chi * sn.transpose() * sn + (12.0 / 25.0) * chi * (st1.transpose() * st1 + st2.transpose() * st2));
        ff.c_raw.block(oss, os, 3 * ns, 5 * ns) +=
            w * (-(3.0 / 20.0) * sn.transpose() * snn - (1.0 / 5.0) * (st1.transpose() * snt1 + st2.transpose() * snt2));
        ff.d.block(os, os, 5 * ns, 5 * ns) +=
            w * ((9.0 / 8.0) * chi * snn.transpose() * snn + chi * comb.transpose() * comb +
                 chi * st1t2.transpose() * st1t2 + (1.0 / chi) * (snt1.transpose() * snt1 + snt2.transpose() * snt2) +
                 eps * chi * snn.transpose() * snn);
        ff.f.block(os, op, 5 * ns, ns) += w * eps * chi * snn.transpose() * pv;
        ff.h.block(op, op, ns, ns) += w * eps * chi * pv.transpose() * pv;
    });
    return ff;
}

// -e - g - b in the full layouts.
Eigen::MatrixXd constraint_full(const DiscreteSpaces& sp)
{
    const FullForms ff = assemble_full(sp, ModelParams{});
    return -ff.e - ff.g - ff.b;
}

}  // namespace

Eigen::MatrixXd assemble_c_coupling(const DiscreteSpaces& spaces, const ModelParams& params)
{
    const FullForms ff = assemble_full(spaces, params);
    const Eigen::MatrixXd tv = spaces.v_transform();
    return tv.transpose() * ff.c_raw * tv;
}

Eigen::MatrixXd assemble_form(FormId id, const DiscreteSpaces& spaces, const ModelParams& params)
{
    const FullForms ff = assemble_full(spaces, params);
    const Eigen::MatrixXd tv = spaces.v_transform();
    const Eigen::MatrixXd tq = spaces.q_full_transform();
    auto vv = [&](const Eigen::MatrixXd& m) -> Eigen::MatrixXd { return tv.transpose() * m * tv; };
    auto qv = [&](const Eigen::MatrixXd& m) -> Eigen::MatrixXd { return tq.transpose() * m * tv; };

    switch (id) {
    case FormId::a:
        return vv(ff.a);
    case FormId::c: {
        const Eigen::MatrixXd c = vv(ff.c_raw);
        return c.transpose() - c;
    }
    case FormId::d:
        return vv(ff.d);
    case FormId::f:
        return vv(ff.f);
    case FormId::h:
        return vv(ff.h);
    case FormId::dbar:
        return vv(ff.d + ff.f + ff.f.transpose() + ff.h);
    case FormId::A: {
        const Eigen::MatrixXd c = vv(ff.c_raw);
        return vv(ff.a + ff.d + ff.f + ff.f.transpose() + ff.h) + c.transpose() - c;
    }
    case FormId::b:
        return qv(ff.b);
    case FormId::e:
        return qv(ff.e);
    case FormId::g:
        return qv(ff.g);
    case FormId::B:
        return qv(-ff.e - ff.g - ff.b);
    case FormId::MV:
        return vv(ff.MV);
    case FormId::MQ:
        return tq.transpose() * ff.MQ * tq;
    }
    throw std::invalid_argument("unknown form id");
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_load(const DiscreteSpaces& spaces, const ModelParams& params,
                                                          const VolumeSources& sources, const BoundaryData& bdata)
{
    params.validate();
    bdata.validate();
    const int ns = spaces.scalar_size();
    const int os = 0, oss = 5 * ns, op = 8 * ns;
    const int ou = 0, ot = 3 * ns;
    const double chi = params.chi_tilde, eps = params.epsilon_w;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(spaces.full_v());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(spaces.full_q());

    spaces.scalar.for_each_volume_point([&](const PointBasis& pb, double w) {
        const double m = sources.m_src ? sources.m_src(pb.x) : 0.0;
        const double r = sources.r_src ? sources.r_src(pb.x) : 0.0;
        const std::array<double, 3> b = sources.b ? sources.b(pb.x) : std::array<double, 3>{};
        g.segment(ot, ns) -= w * (r - m) * pb.val;
        for (int i = 0; i < 3; ++i)
            g.segment(ou + i * ns, ns) -= w * b[static_cast<std::size_t>(i)] * pb.val;
        f.segment(op, ns) += w * m * pb.val;
    });

    const Eigen::MatrixXd es = stf_frame(spaces);
    spaces.scalar.for_each_boundary_point([&](const PointBasis& pb, double w, int axis, int sign) {
        const Frame fr = Frame::axis_aligned(axis, sign);
        const FaceData& fd = bdata.faces[static_cast<std::size_t>(BoundaryData::face_index(axis, sign))];
        const double un_eff = fd.un - eps * chi * fd.p;
        for (int i = 0; i < 3; ++i)
            f.segment(oss + i * ns, ns) -= w * fd.theta * fr.n[static_cast<std::size_t>(i)] * pb.val;
        for (int a = 0; a < 5; ++a) {
            const Eigen::VectorXd& e = spaces.stf[static_cast<std::size_t>(a)];
            double c_nn = 0, c_nt1 = 0, c_nt2 = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double eij = e[i * 3 + j];
                    const double ni = fr.n[static_cast<std::size_t>(i)];
                    c_nn += eij * ni * fr.n[static_cast<std::size_t>(j)];
                    c_nt1 += eij * ni * fr.t1[static_cast<std::size_t>(j)];
                    c_nt2 += eij * ni * fr.t2[static_cast<std::size_t>(j)];
                }
            f.segment(os + a * ns, ns) -= w * (fd.ut1 * c_nt1 + fd.ut2 * c_nt2 + un_eff * c_nn) * pb.val;
        }
        f.segment(op, ns) -= w * un_eff * pb.val;
    });

    return {spaces.v_transform().transpose() * f, spaces.q_full_transform().transpose() * g};
}

MixedSystem assemble_system(const DiscreteSpaces& spaces, const ModelParams& params, const VolumeSources& sources,
                            const BoundaryData& bdata)
{
    const FullForms ff = assemble_full(spaces, params);
    const Eigen::MatrixXd tv = spaces.v_transform();
    const Eigen::MatrixXd tq = spaces.q_full_transform();
    MixedSystem sys;
    const Eigen::MatrixXd c = tv.transpose() * ff.c_raw * tv;
    sys.A = tv.transpose() * (ff.a + ff.d + ff.f + ff.f.transpose() + ff.h) * tv + c.transpose() - c;
    sys.B = tq.transpose() * (-ff.e - ff.g - ff.b) * tv;
    sys.MV = tv.transpose() * ff.MV * tv;
    sys.MQ = tq.transpose() * ff.MQ * tq;
    std::tie(sys.F, sys.G) = assemble_load(spaces, params, sources, bdata);
    sys.params = params;
    return sys;
}

FieldEvaluator::FieldEvaluator(const DiscreteSpaces& spaces, const Eigen::VectorXd& U, const Eigen::VectorXd& P)
    : spaces_(&spaces)
{
    const int ns = spaces.scalar_size();
    const Eigen::VectorXd v = spaces.expand_v(U);
    const Eigen::VectorXd q = spaces.expand_q(P);
    sigma_ = Eigen::Map<const Eigen::MatrixXd>(v.data(), ns, 5);
    s_ = Eigen::Map<const Eigen::MatrixXd>(v.data() + 5 * ns, ns, 3);
    p_ = v.segment(8 * ns, ns);
    u_ = Eigen::Map<const Eigen::MatrixXd>(q.data(), ns, 3);
    theta_ = q.segment(3 * ns, ns);
}

PointFields FieldEvaluator::at(const PointBasis& pb) const
{
    PointFields f;
    f.x = pb.x;
    const Eigen::VectorXd sig_c = sigma_.transpose() * pb.val;       // 5
    const Eigen::MatrixXd sig_g = pb.grad * sigma_;                  // 3 x 5
    Eigen::VectorXd sig_amb = Eigen::VectorXd::Zero(9);
    Eigen::MatrixXd sig_amb_g = Eigen::MatrixXd::Zero(9, 3);
    for (int a = 0; a < 5; ++a) {
        const Eigen::VectorXd& e = spaces_->stf[static_cast<std::size_t>(a)];
        sig_amb += sig_c[a] * e;
        sig_amb_g += e * sig_g.col(a).transpose();
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            f.sigma(i, j) = sig_amb[i * 3 + j];
            for (int k = 0; k < 3; ++k)
                f.grad_sigma(i, j, k) = sig_amb_g(i * 3 + j, k);
        }

    const Eigen::VectorXd sv = s_.transpose() * pb.val;
    const Eigen::MatrixXd sg = pb.grad * s_;  // (k, i) = d_k s_i
    const Eigen::VectorXd uv = u_.transpose() * pb.val;
    const Eigen::MatrixXd ug = pb.grad * u_;
    const Eigen::VectorXd pg = pb.grad * p_;
    const Eigen::VectorXd tg = pb.grad * theta_;
    for (int i = 0; i < 3; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        f.s[ii] = sv[i];
        f.u[ii] = uv[i];
        f.grad_p[ii] = pg[i];
        f.grad_theta[ii] = tg[i];
        for (int k = 0; k < 3; ++k) {
            f.grad_s(i, k) = sg(k, i);
            f.grad_u(i, k) = ug(k, i);
        }
    }
    f.p = p_.dot(pb.val);
    f.theta = theta_.dot(pb.val);
    return f;
}

PointFields FieldEvaluator::at(const Point& x) const
{
    return at(spaces_->scalar.eval(x));
}

Closures closures_at(const PointFields& f, const ModelParams& params)
{
    Closures c;
    c.m3 = -2.0 * params.kn * project3(f.grad_sigma, Proj3::Stf);
    c.R = -(24.0 / 5.0) * params.kn * project2(f.grad_s, Proj2::stf);
    c.delta = -12.0 * params.kn * f.grad_s.trace();
    return c;
}

ClosureSamples compute_closures(const Eigen::VectorXd& U, const DiscreteSpaces& spaces, const ModelParams& params)
{
    params.validate();
    const FieldEvaluator ev(spaces, U, Eigen::VectorXd());
    ClosureSamples out;
    spaces.scalar.for_each_volume_point([&](const PointBasis& pb, double) {
        out.points.push_back(pb.x);
        out.values.push_back(closures_at(ev.at(pb), params));
    });
    return out;
}

namespace {

double comp3(const RTensor3& m, const std::array<double, 3>& a, const std::array<double, 3>& b,
             const std::array<double, 3>& c)
{
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                s += m(i, j, k) * a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)] *
                     c[static_cast<std::size_t>(k)];
    return s;
}

double comp2(const RTensor2& m, const std::array<double, 3>& a, const std::array<double, 3>& b)
{
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            s += m(i, j) * a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    return s;
}

double comp1(const std::array<double, 3>& v, const std::array<double, 3>& a)
{
    return v[0] * a[0] + v[1] * a[1] + v[2] * a[2];
}

}  // namespace

std::array<double, 7> bc_residuals(const Eigen::VectorXd& U, const Eigen::VectorXd& P, const DiscreteSpaces& spaces,
                                   const ModelParams& params, const BoundaryData& bdata)
{
    params.validate();
    bdata.validate();
    const FieldEvaluator ev(spaces, U, P);
    const double chi = params.chi_tilde, eps = params.epsilon_w;
    std::array<double, 7> sq{};
    spaces.scalar.for_each_boundary_point([&](const PointBasis& pb, double w, int axis, int sign) {
        const Frame fr = Frame::axis_aligned(axis, sign);
        const FaceData& fd = bdata.faces[static_cast<std::size_t>(BoundaryData::face_index(axis, sign))];
        const PointFields f = ev.at(pb);
        const Closures c = closures_at(f, params);
        const auto& n = fr.n;
        const std::array<std::array<double, 3>, 2> t{fr.t1, fr.t2};
        const std::array<double, 2> ut_w{fd.ut1, fd.ut2};

        const double snn = comp2(f.sigma, n, n);
        const double rnn = comp2(c.R, n, n);
        const double dth = f.theta - fd.theta;

        const double r1 = (comp1(f.u, n) - fd.un) - eps * chi * ((f.p - fd.p) + snn);
        double r2 = 0.0, r3 = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const double du = comp1(f.u, t[i]) - ut_w[i];
            const double st = comp1(f.s, t[i]);
            const double mnnt = comp3(c.m3, n, n, t[i]);
            const double e2 = comp2(f.sigma, n, t[i]) - chi * (du + 0.2 * st + mnnt);
            const double e3 = comp2(c.R, n, t[i]) - chi * (-du + 2.2 * st - mnnt);
            r2 += e2 * e2;
            r3 += e3 * e3;
        }
        const double r4 = comp1(f.s, n) - chi * (2.0 * dth + 0.5 * snn + 0.4 * rnn + (2.0 / 15.0) * c.delta);
        const double mnnn = comp3(c.m3, n, n, n);
        const double r5 = mnnn - chi * (-0.4 * dth + 1.4 * snn - 0.08 * rnn - (2.0 / 75.0) * c.delta);
        const double r6 = (0.5 * mnnn + comp3(c.m3, n, fr.t1, fr.t1)) - chi * (0.5 * snn + comp2(f.sigma, fr.t1, fr.t1));
        const double r7 = comp3(c.m3, n, fr.t1, fr.t2) - chi * comp2(f.sigma, fr.t1, fr.t2);

        sq[0] += w * r1 * r1;
        sq[1] += w * r2;
        sq[2] += w * r3;
        sq[3] += w * r4 * r4;
        sq[4] += w * r5 * r5;
        sq[5] += w * r6 * r6;
        sq[6] += w * r7 * r7;
    });
    for (auto& v : sq)
        v = std::sqrt(v);
    return sq;
}

namespace {

// Coefficients (in the subspace spanned by the columns of t) of the L2
// projection of a scalar function.
Eigen::VectorXd project_reduced(const BoxSpace& space, const Eigen::MatrixXd& mass, const Eigen::MatrixXd& t,
                                const std::function<double(const PointBasis&)>& f)
{
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.size());
    space.for_each_volume_point([&](const PointBasis& pb, double w) { rhs += w * f(pb) * pb.val; });
    const Eigen::MatrixXd mt = t.transpose() * mass * t;
    return mt.ldlt().solve(t.transpose() * rhs);
}

}  // namespace

Eigen::VectorXd project_v(const DiscreteSpaces& spaces, const AnalyticFields& fields)
{
    const int ns = spaces.scalar_size();
    const Eigen::MatrixXd mass = spaces.scalar.mass();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(ns, ns);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(spaces.dim_v());
    if (fields.sigma)
        for (int a = 0; a < 5; ++a) {
            const Eigen::VectorXd& e = spaces.stf[static_cast<std::size_t>(a)];
            out.segment(spaces.sigma.offset + a * ns, ns) = project_reduced(spaces.scalar, mass, id, [&](const PointBasis& pb) {
                const RTensor2 sig = fields.sigma(pb.x);
                double v = 0.0;
                for (int n = 0; n < 9; ++n)
                    v += e[n] * sig.data()[static_cast<std::size_t>(n)];
                return v;
            });
        }
    if (fields.s)
        for (int i = 0; i < 3; ++i)
            out.segment(spaces.s.offset + i * ns, ns) = project_reduced(
                spaces.scalar, mass, id, [&](const PointBasis& pb) { return fields.s(pb.x)[static_cast<std::size_t>(i)]; });
    if (fields.p)
        out.segment(spaces.p.offset, spaces.p.size) =
            project_reduced(spaces.scalar, mass, spaces.p_transform, [&](const PointBasis& pb) { return fields.p(pb.x); });
    return out;
}

Eigen::VectorXd project_q(const DiscreteSpaces& spaces, const AnalyticFields& fields)
{
    const int ns = spaces.scalar_size();
    const Eigen::MatrixXd mass = spaces.scalar.mass();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(ns, ns);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(spaces.dim_q());
    if (fields.u) {
        // project componentwise, then onto the filtered subspace in the L2 sense
        Eigen::VectorXd full(3 * ns);
        Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(3 * ns, 3 * ns);
        for (int i = 0; i < 3; ++i) {
            full.segment(i * ns, ns) = project_reduced(
                spaces.scalar, mass, id, [&](const PointBasis& pb) { return fields.u(pb.x)[static_cast<std::size_t>(i)]; });
            mu.block(i * ns, i * ns, ns, ns) = mass;
        }
        const Eigen::MatrixXd& t = spaces.u_transform;
        out.segment(spaces.u.offset, spaces.u.size) = (t.transpose() * mu * t).ldlt().solve(t.transpose() * mu * full);
    }
    if (fields.theta)
        out.segment(spaces.theta.offset, spaces.theta.size) = project_reduced(
            spaces.scalar, mass, spaces.theta_transform, [&](const PointBasis& pb) { return fields.theta(pb.x); });
    return out;
}

void export_coo(std::ostream& out, const Eigen::MatrixXd& m, double drop_tol)
{
    const auto old = out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > drop_tol)
                out << i << ' ' << j << ' ' << m(i, j) << '\n';
    out.precision(old);
}

void export_fields_csv(std::ostream& out, const DiscreteSpaces& spaces, const Eigen::VectorXd& U,
                       const Eigen::VectorXd& P)
{
    const FieldEvaluator ev(spaces, U, P);
    const auto old = out.precision(17);
    out << "x,y,z,component,value\n";
    spaces.scalar.for_each_volume_point([&](const PointBasis& pb, double) {
        const PointFields f = ev.at(pb);
        auto row = [&](const std::string& name, double v) {
            out << f.x[0] << ',' << f.x[1] << ',' << f.x[2] << ',' << name << ',' << v << '\n';
        };
        static const char* axes = "123";
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                row(std::string("sigma_") + axes[i] + axes[j], f.sigma(i, j));
        for (int i = 0; i < 3; ++i)
            row(std::string("s_") + axes[i], f.s[static_cast<std::size_t>(i)]);
        row("p", f.p);
        for (int i = 0; i < 3; ++i)
            row(std::string("u_") + axes[i], f.u[static_cast<std::size_t>(i)]);
        row("theta", f.theta);
    });
    out.precision(old);
}

}  // namespace r13
