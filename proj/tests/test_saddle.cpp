#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "r13/datasets.hpp"
#include "r13/linalg.hpp"
#include "r13/saddle_point.hpp"

namespace r13 {
namespace {

using Vec3 = std::array<double, 3>;

MixedSystem system_for(int degree, const ModelParams& prm, const ProblemData& data = {},
                       QPairing pairing = QPairing::filtered)
{
    const DiscreteSpaces sp = build_spaces(degree, 1, pressure_mode_for(prm), pairing);
    return assemble_system(sp, prm, data.sources, data.boundary);
}

int rank_of(const Eigen::MatrixXd& m, double tol)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        r += s[i] > tol * s[0];
    return r;
}

TEST(Kernel, DimensionAndResidual)
{
    const MixedSystem sys = system_for(2, {1.0, 1.0, 0.0});
    const Eigen::MatrixXd z = kernel_basis(sys);
    EXPECT_EQ(z.cols(), sys.B.cols() - rank_of(sys.B, kKernelRankTol));
    EXPECT_LE((sys.B * z).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(((z.transpose() * z) - Eigen::MatrixXd::Identity(z.cols(), z.cols())).cwiseAbs().maxCoeff(), 1e-12);
}

// Constant stf sigma with p = 0 and a divergence-free s satisfy
// Div sigma = -grad p and div s = 0.
TEST(Kernel, ContainsManufacturedKernelElement)
{
    const ModelParams prm{1.0, 1.0, 0.0};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    const MixedSystem sys = assemble_system(sp, prm, {}, {});
    AnalyticFields f;
    f.sigma = [](const Point&) {
        RTensor2 m(3);
        m(0, 0) = 1.0;
        m(2, 2) = -1.0;
        m(0, 1) = m(1, 0) = 0.5;
        return m;
    };
    f.s = [](const Point& x) { return Vec3{x[0] * x[0], -2.0 * x[0] * x[1], 0.0}; };
    const Eigen::VectorXd v = project_v(sp, f);
    EXPECT_LE((sys.B * v).norm(), 1e-12 * v.norm());
    const Eigen::MatrixXd z = kernel_basis(sys);
    EXPECT_LE((v - z * (z.transpose() * v)).norm(), 1e-10 * v.norm());
}

TEST(Coercivity, PositiveOnKernelForAllSmallConfigurations)
{
    for (int n : {1, 2})
        for (double eps : {0.0, 0.1}) {
            const MixedSystem sys = system_for(n, {1.0, 1.0, eps});
            const Eigen::MatrixXd z = kernel_basis(sys);
            const CoercivityResult c = coercivity_constant(sys, z);
            EXPECT_GT(c.alpha0, 0.0) << "N = " << n << " eps = " << eps;
            const Eigen::VectorXd& w = c.minimizer;
            const double rq = w.dot(sys.A * w) / w.dot(sys.MV * w);
            EXPECT_NEAR(rq, c.alpha0, 1e-10 * std::max(1.0, c.alpha0));
            EXPECT_NEAR(w.dot(sys.MV * w), 1.0, 1e-10);
        }
}

TEST(Coercivity, InvariantUnderChangeOfKernelBasis)
{
    const MixedSystem sys = system_for(1, {0.5, 1.2, 0.1});
    const Eigen::MatrixXd z = kernel_basis(sys);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd t(z.cols(), z.cols());
    for (Eigen::Index i = 0; i < t.size(); ++i)
        t.data()[i] = g(rng);
    const double a = coercivity_constant(sys, z).alpha0;
    const double b = coercivity_constant(sys, z * t).alpha0;
    EXPECT_NEAR(a, b, 1e-9 * a);
}

// Without velocity prescription the pressure sees no coercive term off
// the kernel: dbar does not control p, so the unrestricted minimum is 0.
TEST(Coercivity, UnrestrictedMinimumVanishesWithoutVelocityPrescription)
{
    const MixedSystem sys = system_for(1, {1.0, 1.0, 0.0});
    const Eigen::MatrixXd all = Eigen::MatrixXd::Identity(sys.A.rows(), sys.A.cols());
    EXPECT_LE(std::abs(coercivity_constant(sys, all).alpha0), 1e-10);
}

TEST(Coercivity, TrivialKernelIsRejected)
{
    const MixedSystem sys = system_for(1, {1.0, 1.0, 0.0});
    try {
        coercivity_constant(sys, Eigen::MatrixXd(sys.A.rows(), 0));
        FAIL() << "expected trivial kernel";
    } catch (const std::exception& e) {
        EXPECT_STREQ(e.what(), "trivial kernel");
    }
}

// k0^2 is the smallest eigenvalue of (B M_V^{-1} B^T, M_Q).
TEST(InfSup, AgreesWithEigenvalueRoute)
{
    for (double eps : {0.0, 0.1}) {
        const MixedSystem sys = system_for(2, {1.0, 1.0, eps});
        const InfSupResult r = infsup_constant(sys);
        const Eigen::MatrixXd s = sys.B * sys.MV.ldlt().solve(sys.B.transpose());
        const EigenPair e = smallest_generalized_eigen(0.5 * (s + s.transpose()), sys.MQ);
        EXPECT_NEAR(r.k0, std::sqrt(e.value), 1e-9 * r.k0);
        EXPECT_EQ(r.dim_kernel_transpose, 0);
        EXPECT_GT(r.k0, 0.0);
        EXPECT_LE(r.k0, r.norm);
        EXPECT_NEAR(r.norm, operator_norm(sys.B, sys.MQ, sys.MV), 1e-10 * r.norm);
    }
}

TEST(InfSup, ScalesLinearlyWithTheForm)
{
    const MixedSystem sys = system_for(1, {1.0, 1.0, 0.1});
    const double k = infsup_constant(sys.B, sys.MV, sys.MQ).k0;
    EXPECT_NEAR(infsup_constant(3.0 * sys.B, sys.MV, sys.MQ).k0, 3.0 * k, 1e-10 * k);
}

TEST(InfSup, EqualOrderPairingHasSevenDimensionalDeficiency)
{
    for (int n : {1, 2}) {
        const MixedSystem sys = system_for(n, {1.0, 1.0, 0.1}, {}, QPairing::equal_order);
        EXPECT_EQ(infsup_constant(sys).dim_kernel_transpose, 7) << "N = " << n;
    }
}

TEST(OperatorNorm, IdentityOfGramIsOneAndAGrowsAsKnShrinks)
{
    const MixedSystem sys = system_for(1, {1.0, 1.0, 0.0});
    EXPECT_NEAR(operator_norm(sys.MV, sys.MV, sys.MV), 1.0, 1e-12);
    const MixedSystem small = system_for(1, {0.1, 1.0, 0.0});
    EXPECT_GT(operator_norm(small.A, small.MV, small.MV), operator_norm(sys.A, sys.MV, sys.MV));
}

TEST(Brezzi, ConstantsAreConsistent)
{
    const MixedSystem sys = system_for(1, {1.0, 1.0, 0.1});
    const BrezziConstants c = brezzi_constants(sys);
    EXPECT_GT(c.alpha0, 0.0);
    EXPECT_GT(c.k0, 0.0);
    EXPECT_LE(c.alpha0, c.normA);
    EXPECT_LE(c.k0, c.normB);
    EXPECT_EQ(c.dim_kerB, sys.B.cols() - sys.B.rows());
    EXPECT_EQ(c.dim_kerBT, 0);
}

TEST(Solve, ZeroDataGivesZeroSolution)
{
    const MixedSolution s = solve_mixed(system_for(1, {1.0, 1.0, 0.1}));
    EXPECT_EQ(s.U.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.P.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Solve, StabilityBoundsHoldForWallTemperature)
{
    FaceData fd;
    fd.theta = 1.0;
    ProblemData data;
    data.boundary = BoundaryData::uniform(fd);
    const MixedSystem sys = system_for(2, {1.0, 1.0, 0.1}, data);
    const MixedSolution s = solve_mixed(sys);
    EXPECT_LE(s.residual_primal, 1e-10);
    EXPECT_LE(s.residual_constraint, 1e-10);
    const StabilityBounds b = stability_bounds(sys, s, brezzi_constants(sys));
    EXPECT_GT(b.normU, 0.0);
    EXPECT_TRUE(b.holds()) << b.normU << " " << b.boundU << " " << b.normP << " " << b.boundP;
}

TEST(Solve, LinearInTheData)
{
    const ModelParams prm{0.5, 1.0, 0.1};
    const DiscreteSpaces sp = build_spaces(1, 1, pressure_mode_for(prm));
    const ProblemData d1 = random_data(5, 0), d2 = random_data(5, 1);
    MixedSystem s1 = assemble_system(sp, prm, d1.sources, d1.boundary);
    const MixedSystem s2 = assemble_system(sp, prm, d2.sources, d2.boundary);
    const MixedSolution u1 = solve_mixed(s1), u2 = solve_mixed(s2);
    s1.F = 2.0 * s1.F - 3.0 * s2.F;
    s1.G = 2.0 * s1.G - 3.0 * s2.G;
    const MixedSolution u = solve_mixed(s1);
    const Eigen::VectorXd du = u.U - (2.0 * u1.U - 3.0 * u2.U);
    EXPECT_LE(du.norm(), 1e-11 * std::max(1.0, u.U.norm()));
    EXPECT_LE((u.P - (2.0 * u1.P - 3.0 * u2.P)).norm(), 1e-11 * std::max(1.0, u.P.norm()));
}

TEST(Solve, DeficientPairingIsReported)
{
    const MixedSystem sys = system_for(1, {1.0, 1.0, 0.1}, random_data(1, 0), QPairing::equal_order);
    try {
        solve_mixed(sys);
        FAIL() << "expected deficient pairing";
    } catch (const std::runtime_error& e) {
        EXPECT_EQ(std::string(e.what()).rfind("discrete pairing deficient", 0), 0u) << e.what();
    }
}

TEST(Solve, BoundsRequirePositiveConstants)
{
    const MixedSystem sys = system_for(1, {1.0, 1.0, 0.1});
    BrezziConstants c = brezzi_constants(sys);
    c.alpha0 = 0.0;
    EXPECT_THROW(stability_bounds(sys, solve_mixed(sys), c), std::invalid_argument);
}

TEST(Limit, ZeroFieldsGiveZeroResiduals)
{
    const ModelParams prm{1.0, 1.0, 0.0};
    const DiscreteSpaces sp = build_spaces(1, 1, pressure_mode_for(prm));
    const LimitResiduals r =
        limit_consistency(sp, Eigen::VectorXd::Zero(sp.dim_v()), Eigen::VectorXd::Zero(sp.dim_q()), prm);
    EXPECT_EQ(r.res_ns, 0.0);
    EXPECT_EQ(r.res_fourier, 0.0);
}

// sigma = -2 Kn stf Du and s = -(15/4) Kn grad theta for polynomial u, theta.
TEST(Limit, ManufacturedClosureIsExact)
{
    const ModelParams prm{0.3, 1.0, 0.0};
    const DiscreteSpaces sp = build_spaces(2, 1, pressure_mode_for(prm));
    AnalyticFields f;
    f.u = [](const Point& x) { return Vec3{x[1] * x[2], x[2] * x[0], x[0] * x[1]}; };
    f.sigma = [kn = prm.kn](const Point& x) {
        RTensor2 m(3);
        // sym Du has zero diagonal and off-diagonal entries z, y, x
        m(0, 1) = m(1, 0) = -2.0 * kn * x[2];
        m(0, 2) = m(2, 0) = -2.0 * kn * x[1];
        m(1, 2) = m(2, 1) = -2.0 * kn * x[0];
        return m;
    };
    f.theta = [](const Point& x) { return x[0] * x[1]; };
    f.s = [kn = prm.kn](const Point& x) { return Vec3{-3.75 * kn * x[1], -3.75 * kn * x[0], 0.0}; };
    const LimitResiduals r = limit_consistency(sp, project_v(sp, f), project_q(sp, f), prm);
    EXPECT_LE(r.res_ns, 1e-12);
    EXPECT_LE(r.res_fourier, 1e-12);
}

}  // namespace
}  // namespace r13
