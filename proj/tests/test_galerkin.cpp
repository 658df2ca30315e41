#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "r13/galerkin.hpp"
#include "r13/linalg.hpp"

namespace r13 {
namespace {

using Vec3 = std::array<double, 3>;

RTensor2 diag(double a, double b, double c)
{
    RTensor2 t(3);
    t(0, 0) = a;
    t(1, 1) = b;
    t(2, 2) = c;
    return t;
}

// Shifted Legendre polynomial P_n(2x - 1).
double shifted_legendre(int n, double x) { return legendre(n, 2.0 * x - 1.0).p; }

TEST(Spaces, DimensionsOfTheEqualOrderPairing)
{
    const DiscreteSpaces full = build_spaces(1, 1, PressureMode::full, QPairing::equal_order);
    EXPECT_EQ(full.dim_v(), 72);
    EXPECT_EQ(full.dim_q(), 32);
    const DiscreteSpaces zm = build_spaces(1, 1, PressureMode::zero_mean, QPairing::equal_order);
    EXPECT_EQ(zm.dim_v(), 71);
    EXPECT_EQ(zm.sigma.size, 5 * 8);
    EXPECT_EQ(zm.s.size, 3 * 8);
    EXPECT_EQ(zm.p.size, 7);
}

TEST(Spaces, FilteredPairingRemovesSevenModesOnOneCell)
{
    for (int n : {1, 2}) {
        const DiscreteSpaces sp = build_spaces(n, 1, PressureMode::full);
        const int ns = (n + 1) * (n + 1) * (n + 1);
        EXPECT_EQ(sp.removed_u, 6);
        EXPECT_EQ(sp.removed_theta, 1);
        EXPECT_EQ(sp.dim_q(), 4 * ns - 7);
        EXPECT_EQ(sp.dim_v(), 9 * ns);
    }
}

TEST(Spaces, InvalidArgumentsAreRejected)
{
    EXPECT_THROW(build_spaces(0, 1, PressureMode::full), std::invalid_argument);
    EXPECT_THROW(build_spaces(1, 0, PressureMode::full), std::invalid_argument);
    EXPECT_EQ(pressure_mode_for({1.0, 1.0, 0.0}), PressureMode::zero_mean);
    EXPECT_EQ(pressure_mode_for({1.0, 1.0, 0.1}), PressureMode::full);
    EXPECT_THROW((ModelParams{0.0, 1.0, 0.0}.validate()), std::invalid_argument);
    EXPECT_THROW((ModelParams{1.0, -1.0, 0.0}.validate()), std::invalid_argument);
    EXPECT_THROW((ModelParams{1.0, 1.0, -0.1}.validate()), std::invalid_argument);
}

TEST(Quadrature, ExactForDegreeTwoNPlusOne)
{
    for (int n = 1; n <= 5; ++n) {
        const GaussRule g = gauss_legendre(n + 2);
        const int p = 2 * n + 1;
        double s = 0.0;
        for (std::size_t i = 0; i < g.points.size(); ++i)
            s += g.weights[i] * std::pow(g.points[i], p);
        EXPECT_NEAR(s, 1.0 / (p + 1), 1e-14);
    }
}

TEST(Forms, UnknownFormIdIsRejected)
{
    EXPECT_THROW(parse_form_id("z"), std::invalid_argument);
    EXPECT_EQ(parse_form_id("dbar"), FormId::dbar);
}

// s = (x, 0, 0): |sym Ds|^2 = 1, |div s|^2 = 1, |s|^2 = 1/3, boundary
// int s_n^2 = 1 (face x = 1), sum int s_t^2 = 4/3 (faces y, z).
TEST(Forms, FormAOnLinearFieldMatchesHandIntegration)
{
    const ModelParams prm{0.5, 2.0, 0.0};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    AnalyticFields f;
    f.s = [](const Point& x) { return Vec3{x[0], 0.0, 0.0}; };
    const Eigen::VectorXd u = project_v(sp, f);
    const double kn = prm.kn, chi = prm.chi_tilde;
    const double want = 24.0 / 25.0 * kn + 12.0 / 25.0 * kn + 4.0 / 15.0 / kn / 3.0 + 0.5 / chi +
                        12.0 / 25.0 * chi * 4.0 / 3.0;
    EXPECT_NEAR(u.dot(assemble_form(FormId::a, sp, prm) * u), want, 1e-12);
}

// r = (x, 0, 0), sigma = diag(1, -1, 0): 2/5 int sigma:Dr = 2/5 and the
// face x = 1 contributes -3/20 sigma_nn r_n = -3/20.
TEST(Forms, CouplingOnLinearFieldsMatchesHandIntegration)
{
    const ModelParams prm{1.0, 1.0, 0.0};
    const DiscreteSpaces sp = build_spaces(1, 1, pressure_mode_for(prm));
    AnalyticFields fr, fs;
    fr.s = [](const Point& x) { return Vec3{x[0], 0.0, 0.0}; };
    fs.sigma = [](const Point&) { return diag(1, -1, 0); };
    const Eigen::VectorXd r = project_v(sp, fr), sig = project_v(sp, fs);
    EXPECT_NEAR(r.dot(assemble_c_coupling(sp, prm) * sig), 0.25, 1e-13);
}

// sigma = diag(1, -1, 0), p = 1 with the axis-aligned frames (t1 = e_{axis+1}):
// d = 1/Kn + 7.5 chi + 4 eps chi and dbar = 1/Kn + 7.5 chi + 10 eps chi.
TEST(Forms, DAndDbarOnConstantFieldsMatchHandIntegration)
{
    const ModelParams prm{0.4, 1.5, 0.3};
    const DiscreteSpaces sp = build_spaces(1, 1, pressure_mode_for(prm));
    AnalyticFields f;
    f.sigma = [](const Point&) { return diag(1, -1, 0); };
    const Eigen::VectorXd s = project_v(sp, f);
    f.p = [](const Point&) { return 1.0; };
    const Eigen::VectorXd sp1 = project_v(sp, f);
    const double kn = prm.kn, chi = prm.chi_tilde, eps = prm.epsilon_w;
    EXPECT_NEAR(s.dot(assemble_form(FormId::d, sp, prm) * s), 1.0 / kn + 7.5 * chi + 4 * eps * chi, 1e-12);
    EXPECT_NEAR(sp1.dot(assemble_form(FormId::dbar, sp, prm) * sp1), 1.0 / kn + 7.5 * chi + 10 * eps * chi, 1e-12);
}

TEST(Forms, PressureBoundaryFormsVanishWithoutVelocityPrescription)
{
    const ModelParams prm{1.0, 1.0, 0.0};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    EXPECT_EQ(assemble_form(FormId::f, sp, prm).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(assemble_form(FormId::h, sp, prm).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Forms, DbarIsTheSumOfItsParts)
{
    const ModelParams prm{0.7, 1.3, 0.2};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    const Eigen::MatrixXd f = assemble_form(FormId::f, sp, prm);
    const Eigen::MatrixXd sum = assemble_form(FormId::d, sp, prm) + f + f.transpose() + assemble_form(FormId::h, sp, prm);
    EXPECT_LE((assemble_form(FormId::dbar, sp, prm) - sum).cwiseAbs().maxCoeff(), 1e-12);
}

// A(U, V) - A(V, U) = 2 (c(s, psi) - c(r, sigma)) from the definition
// A(U, V) = a(s, r) + c(s, psi) - c(r, sigma) + dbar.
TEST(Forms, SkewPartFollowsTheDefinitionOfA)
{
    const ModelParams prm{0.8, 1.1, 0.1};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    const Eigen::MatrixXd a = assemble_form(FormId::A, sp, prm);
    const Eigen::MatrixXd c = assemble_c_coupling(sp, prm);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        Eigen::VectorXd u(sp.dim_v()), v(sp.dim_v());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            u[i] = g(rng);
            v[i] = g(rng);
        }
        const double lhs = v.dot(a * u) - u.dot(a * v);
        const double rhs = 2.0 * (u.dot(c * v) - v.dot(c * u));
        EXPECT_NEAR(lhs, rhs, 1e-11 * std::max(1.0, std::abs(lhs)));
    }
    EXPECT_LE((a - a.transpose() - 2.0 * assemble_form(FormId::c, sp, prm)).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::MatrixXd as = assemble_form(FormId::a, sp, prm), db = assemble_form(FormId::dbar, sp, prm);
    EXPECT_LE(symmetry_defect(as), 1e-14);
    EXPECT_LE(symmetry_defect(db), 1e-14);
}

TEST(Forms, BHasOnlyTheThreeCouplingBlocks)
{
    const ModelParams prm{1.0, 1.0, 0.1};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    Eigen::MatrixXd b = assemble_form(FormId::B, sp, prm);
    const Eigen::MatrixXd sum =
        -(assemble_form(FormId::e, sp, prm) + assemble_form(FormId::g, sp, prm) + assemble_form(FormId::b, sp, prm));
    EXPECT_LE((b - sum).cwiseAbs().maxCoeff(), 1e-13);
    b.block(sp.u.offset, sp.sigma.offset, sp.u.size, sp.sigma.size).setZero();
    b.block(sp.u.offset, sp.p.offset, sp.u.size, sp.p.size).setZero();
    b.block(sp.theta.offset, sp.s.offset, sp.theta.size, sp.s.size).setZero();
    EXPECT_EQ(b.cwiseAbs().maxCoeff(), 0.0);
}

// r = curl(0, 0, x^2 y) = (x^2, -2xy, 0) is divergence free.
TEST(Forms, FormBVanishesOnCurlField)
{
    const ModelParams prm{1.0, 1.0, 0.0};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    AnalyticFields f;
    f.s = [](const Point& x) { return Vec3{x[0] * x[0], -2.0 * x[0] * x[1], 0.0}; };
    f.theta = [](const Point&) { return 1.0; };
    const Eigen::VectorXd v = project_v(sp, f), q = project_q(sp, f);
    EXPECT_LE(std::abs(q.dot(assemble_form(FormId::b, sp, prm) * v)), 1e-12);
    EXPECT_LE(std::abs(q.dot(assemble_form(FormId::B, sp, prm) * v)), 1e-12);
}

TEST(Forms, GramMatricesAreSymmetricPositiveDefinite)
{
    for (double eps : {0.0, 0.1}) {
        const ModelParams prm{1.0, 1.0, eps};
        const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
        for (FormId id : {FormId::MV, FormId::MQ}) {
            const Eigen::MatrixXd m = assemble_form(id, sp, prm);
            EXPECT_LE((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-13);
            EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues()[0], 0.0);
        }
    }
}

// int Div sigma . v + int sigma : Dv = int_Gamma (sigma n) . v for
// polynomial sigma and v = s, evaluated through the field evaluator.
TEST(Forms, IntegrationByPartsConsistency)
{
    const ModelParams prm{1.0, 1.0, 0.0};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    AnalyticFields f;
    f.sigma = [](const Point& x) {
        RTensor2 m(3);
        m(0, 1) = m(1, 0) = x[0] * x[2];
        m(0, 0) = x[1] * x[1];
        m(1, 1) = -x[1] * x[1] + x[2];
        m(2, 2) = -x[2];
        return m;
    };
    f.s = [](const Point& x) { return Vec3{x[1] * x[2], x[0] * x[0], 1.0 - x[2]}; };
    const FieldEvaluator ev(sp, project_v(sp, f), Eigen::VectorXd());
    double vol = 0.0, surf = 0.0;
    sp.scalar.for_each_volume_point([&](const PointBasis& pb, double w) {
        const PointFields pf = ev.at(pb);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                vol += w * (pf.grad_sigma(i, j, j) * pf.s[static_cast<std::size_t>(i)] + pf.sigma(i, j) * pf.grad_s(i, j));
    });
    sp.scalar.for_each_boundary_point([&](const PointBasis& pb, double w, int axis, int sign) {
        const PointFields pf = ev.at(pb);
        for (int i = 0; i < 3; ++i)
            surf += w * pf.sigma(i, axis) * sign * pf.s[static_cast<std::size_t>(i)];
    });
    EXPECT_NEAR(vol, surf, 1e-11);
    EXPECT_GT(std::abs(surf), 1e-3);
}

TEST(Load, ZeroDataGivesZeroLoads)
{
    const ModelParams prm{1.0, 1.0, 0.1};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    const auto [f, g] = assemble_load(sp, prm, {}, {});
    EXPECT_EQ(f.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Load, WallTemperatureOnlyTestsHeatFluxNormal)
{
    const ModelParams prm{1.0, 1.0, 0.0};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    FaceData fd;
    fd.theta = 1.0;
    const auto [f, g] = assemble_load(sp, prm, {}, BoundaryData::uniform(fd));
    Eigen::VectorXd rest = f;
    rest.segment(sp.s.offset, sp.s.size).setZero();
    EXPECT_EQ(rest.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT(f.segment(sp.s.offset, sp.s.size).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Load, MassSourceEntersTheTemperatureBlock)
{
    const ModelParams prm{1.0, 1.0, 0.0};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    VolumeSources src;
    src.m_src = [](const Point&) { return 1.0; };
    const auto [f, g] = assemble_load(sp, prm, src, {});
    const Eigen::VectorXd want = sp.theta_transform.transpose() * sp.scalar.integrals();
    EXPECT_LE((g.segment(sp.theta.offset, sp.theta.size) - want).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(g.segment(sp.u.offset, sp.u.size).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Closures, LinearHeatFlux)
{
    const ModelParams prm{0.3, 1.0, 0.0};
    const DiscreteSpaces sp = build_spaces(1, 1, pressure_mode_for(prm));
    AnalyticFields f;
    f.s = [](const Point& x) { return Vec3{x[0], 0.0, 0.0}; };
    f.sigma = [](const Point&) { return diag(2, -1, -1); };
    const ClosureSamples c = compute_closures(project_v(sp, f), sp, prm);
    ASSERT_FALSE(c.values.empty());
    const RTensor2 r_want = -(24.0 / 5.0) * prm.kn * project2(diag(1, 0, 0), Proj2::stf);
    for (const Closures& v : c.values) {
        EXPECT_NEAR(v.delta, -12.0 * prm.kn, 1e-12);
        EXPECT_LE(norm(v.R - r_want), 1e-12);
        EXPECT_LE(norm(v.m3), 1e-12);
    }
    f.s = [](const Point& x) { return Vec3{x[1], x[2], x[0]}; };
    for (const Closures& v : compute_closures(project_v(sp, f), sp, prm).values)
        EXPECT_NEAR(v.delta, 0.0, 1e-12);
}

TEST(BoundaryRelations, ZeroFieldsGiveZeroResiduals)
{
    const ModelParams prm{1.0, 1.0, 0.1};
    const DiscreteSpaces sp = build_spaces(1, 1, pressure_mode_for(prm));
    for (double r : bc_residuals(Eigen::VectorXd(), Eigen::VectorXd(), sp, prm, {}))
        EXPECT_EQ(r, 0.0);
}

// s = (g1 x - g1/2, g2 y - g2/2, 0) with g = (1, -1, 0), sigma = diag(a)
// with a_i = g_i (1/chi + 96 Kn/25), theta = theta_w satisfies relation 4.
TEST(BoundaryRelations, ManufacturedFieldSatisfiesRelationFour)
{
    const ModelParams prm{0.6, 1.7, 0.0};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    const double a = 1.0 / prm.chi_tilde + 96.0 * prm.kn / 25.0;
    AnalyticFields f;
    f.s = [](const Point& x) { return Vec3{x[0] - 0.5, -(x[1] - 0.5), 0.0}; };
    f.sigma = [a](const Point&) { return diag(a, -a, 0.0); };
    f.theta = [](const Point&) { return 0.4; };
    FaceData fd;
    fd.theta = 0.4;
    const auto res = bc_residuals(project_v(sp, f), project_q(sp, f), sp, prm, BoundaryData::uniform(fd));
    EXPECT_LE(res[3], 1e-12);
    EXPECT_GT(res[0] + res[1] + res[2] + res[4] + res[5] + res[6], 0.0);
}

// On one cell, ker B^T of the equal-order pairing holds the top Legendre mode
// of every Q component and three curl-like top-degree velocity modes.
TEST(Pairing, EqualOrderKernelIsTheAnalyticSevenModeFamily)
{
    for (int n : {1, 2}) {
        const ModelParams prm{1.0, 1.0, 0.1};
        const DiscreteSpaces sp = build_spaces(n, 1, PressureMode::full, QPairing::equal_order);
        const Eigen::MatrixXd b = assemble_form(FormId::B, sp, prm);
        auto top = [n](const Point& x) {
            return shifted_legendre(n, x[0]) * shifted_legendre(n, x[1]) * shifted_legendre(n, x[2]);
        };
        std::vector<Eigen::VectorXd> modes;
        for (int c = 0; c < 3; ++c) {
            AnalyticFields f;
            f.u = [&, c](const Point& x) {
                Vec3 v{};
                v[static_cast<std::size_t>(c)] = top(x);
                return v;
            };
            modes.push_back(project_q(sp, f));
        }
        {
            AnalyticFields f;
            f.theta = top;
            modes.push_back(project_q(sp, f));
        }
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, m = (i + 2) % 3;
            AnalyticFields f;
            f.u = [=](const Point& x) {
                Vec3 v{};
                const double lm = shifted_legendre(n, x[static_cast<std::size_t>(m)]);
                v[static_cast<std::size_t>(i)] = lm * shifted_legendre(n, x[static_cast<std::size_t>(i)]) *
                                                 shifted_legendre(n - 1, x[static_cast<std::size_t>(j)]);
                v[static_cast<std::size_t>(j)] = -lm * shifted_legendre(n - 1, x[static_cast<std::size_t>(i)]) *
                                                 shifted_legendre(n, x[static_cast<std::size_t>(j)]);
                return v;
            };
            modes.push_back(project_q(sp, f));
        }
        Eigen::MatrixXd k(sp.dim_q(), 7);
        for (int c = 0; c < 7; ++c) {
            k.col(c) = modes[static_cast<std::size_t>(c)];
            EXPECT_LE((b.transpose() * k.col(c)).norm() / k.col(c).norm(), 1e-12) << "N = " << n << " mode " << c;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> sk(k);
        EXPECT_GT(sk.singularValues()[6], 1e-8 * sk.singularValues()[0]);  // independent
        EXPECT_EQ(left_null_space(b, 1e-10).cols(), 7) << "N = " << n;

        // The filtered space is L2-orthogonal to the whole family.
        const DiscreteSpaces fs = build_spaces(n, 1, PressureMode::full, QPairing::filtered);
        const Eigen::MatrixXd qt = fs.q_full_transform();
        const Eigen::MatrixXd mq_full = assemble_form(FormId::MQ, sp, prm);
        for (int c = 0; c < 7; ++c)
            EXPECT_LE((qt.transpose() * mq_full * k.col(c)).norm(), 1e-12);
    }
}

TEST(Export, CoordinateFormatAndFieldTable)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 3);
    m(1, 2) = 0.5;
    std::ostringstream coo;
    export_coo(coo, m);
    EXPECT_EQ(coo.str(), "1 2 0.5\n");
    const DiscreteSpaces sp = build_spaces(1, 1, PressureMode::full);
    std::ostringstream csv;
    export_fields_csv(csv, sp, Eigen::VectorXd(), Eigen::VectorXd());
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "x,y,z,component,value");
}

}  // namespace
}  // namespace r13
