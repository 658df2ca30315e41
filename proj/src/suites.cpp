#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "r13/datasets.hpp"
#include "r13/ellipticity.hpp"
#include "r13/korn.hpp"
#include "r13/linalg.hpp"
#include "r13/report.hpp"
#include "r13/saddle_point.hpp"
#include "r13/tolerances.hpp"

namespace r13 {

namespace {

using nlohmann::json;

std::string fmt_d(int d) { return "d" + std::to_string(d); }
std::string fmt_n(int n) { return "N" + std::to_string(n); }

json complex_vector(const Eigen::VectorXcd& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back({v[i].real(), v[i].imag()});
    return out;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------- ellipticity

SuiteResult ellipticity_suite(const RunConfig& cfg)
{
    SuiteResult r;
    r.suite = Suite::ellipticity;
    SamplingPlan plan;
    plan.seed = cfg.seed;
    json verdicts = json::array();
    for (int d = 2; d <= 5; ++d) {
        const OperatorSpec op{DomainSpace::stf2, Codomain::Stf, d};
        const EllipticityVerdict v = check_ellipticity(op, EllipticityMode::C, plan);
        const std::string p = "stf_grad." + fmt_d(d);
        r.eq(p + ".c_elliptic", v.elliptic ? 1.0 : 0.0, d >= 3 ? 1.0 : 0.0);
        r.ge(p + ".samples", v.samples, tol::kEllipticMinSamples);
        if (d >= 3)
            r.ge(p + ".min_singular_value", v.min_singular_value, tol::kEllipticMinSingular);
        else
            r.info(p + ".min_singular_value", v.min_singular_value);
        json jv{{"dim", d}, {"c_elliptic", v.elliptic}, {"samples", v.samples},
                {"min_singular_value", v.min_singular_value}, {"minimizing_xi", complex_vector(v.minimizing_xi)}};
        if (v.witness) {
            const EllipticityWitness& w = *v.witness;
            jv["witness"] = {{"xi", complex_vector(w.xi)}, {"tensor", complex_vector(w.tensor)},
                             {"residual", w.residual}};
        }
        verdicts.push_back(jv);

        if (d == 2) {
            // Reference kernel pair T = [[i, 1], [1, -i]], xi = (1, i).
            const std::complex<double> I(0.0, 1.0);
            Eigen::VectorXcd t_ref(4);
            t_ref << I, 1.0, 1.0, -I;
            t_ref.normalize();
            Eigen::VectorXcd xi(2);
            xi << 1.0, I;
            const SymbolMatrix sm = symbol_matrix(op, xi / xi.norm());
            Eigen::VectorXcd coords(op.domain_dim());
            for (int a = 0; a < op.domain_dim(); ++a)
                coords[a] = domain_basis_element(op, a).cast<std::complex<double>>().dot(t_ref);
            r.le(p + ".reference_pair_residual", (sm.matrix * coords).norm() / coords.norm(), tol::kWitnessResidual);
            if (v.witness) {
                r.le(p + ".witness_residual", v.witness->residual, tol::kWitnessResidual);
                const Eigen::VectorXcd wt = v.witness->tensor / v.witness->tensor.norm();
                const double align =
                    std::max(std::abs(t_ref.dot(wt)), std::abs(t_ref.conjugate().dot(wt)));
                r.le(p + ".witness_misalignment", 1.0 - align, tol::kWitnessAlignment);
                const std::complex<double> iso = v.witness->xi.transpose() * v.witness->xi;
                r.info(p + ".witness_xi_dot_xi", std::abs(iso));
            } else {
                r.flag(p + ".witness_present", false);
            }
        }
    }
    r.details["stf_gradient_verdicts"] = verdicts;

    const std::pair<Codomain, const char*> lh_ops[] = {
        {Codomain::identity, "identity"}, {Codomain::sym, "sym"}, {Codomain::dev, "dev"}, {Codomain::stf, "stf"}};
    for (const auto& [cod, name] : lh_ops)
        r.gt(std::string("lh_constant.vectors.d3.") + name, lh_constant({DomainSpace::vectors, cod, 3}), 0.0);

    const Prefactors p3 = general_d_prefactors(3);
    const std::pair<const char*, Rational> got[] = {{"c_stf", p3.c_stf},
                                                    {"c_symbol", p3.c_symbol},
                                                    {"c_core1", p3.c_core1},
                                                    {"c_case1", p3.c_case1},
                                                    {"c_case2", p3.c_case2}};
    const Rational expected[] = {make_rational(1, 5), make_rational(2, 15), make_rational(3, 5),
                                 make_rational(8, 15), make_rational(1, 15)};
    json pre = json::object();
    for (std::size_t i = 0; i < 5; ++i) {
        const std::string q = std::string("prefactor.d3.") + got[i].first;
        r.le(q + ".error", std::abs(got[i].second.value() - expected[i].value()), tol::kPrefactor);
        r.flag(q + ".exact", got[i].second == expected[i]);
        pre[got[i].first] = std::to_string(got[i].second.num) + "/" + std::to_string(got[i].second.den);
    }
    r.eq("prefactor.d2.c_case2", general_d_prefactors(2).c_case2.value(), 0.0);
    r.details["prefactors_d3"] = pre;
    return r;
}

// ---------------------------------------------------------------------- korn

Eigen::VectorXd constant_e1(const BoxSpace& space)
{
    Eigen::VectorXd u = Eigen::VectorXd::Zero(3 * space.size());
    u.head(space.size()) = space.project([](const Point&) { return 1.0; });
    return u;
}

// Random polynomial of total degree <= deg, coefficients uniform in [-1, 1].
Eigen::VectorXd random_polynomial(const BoxSpace& space, int deg, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::array<int, 4>> terms;
    for (int a = 0; a <= deg; ++a)
        for (int b = 0; a + b <= deg; ++b)
            for (int c = 0; a + b + c <= deg; ++c)
                terms.push_back({a, b, c, 0});
    std::vector<double> coeff(terms.size());
    for (double& v : coeff)
        v = unit(rng);
    return space.project([&](const Point& x) {
        double s = 0.0;
        for (std::size_t t = 0; t < terms.size(); ++t)
            s += coeff[t] * std::pow(x[0], terms[t][0]) * std::pow(x[1], terms[t][1]) * std::pow(x[2], terms[t][2]);
        return s;
    });
}

SuiteResult korn_suite(const RunConfig& cfg)
{
    SuiteResult r;
    r.suite = Suite::korn;
    std::mt19937_64 rng(cfg.seed);

    const std::pair<OperatorSpec, const char*> ops[] = {{{DomainSpace::stf2, Codomain::Stf, 3}, "stf_Stf.d3"},
                                                        {{DomainSpace::vectors, Codomain::sym, 3}, "vec_sym.d3"}};
    json korn = json::array();
    for (const auto& [op, name] : ops) {
        double prev = 0.0;
        bool monotone = true;
        for (int n = 1; n <= 3; ++n) {
            const KornEstimate e = korn_constant(op, n, 1);
            const std::string p = std::string(name) + "." + fmt_n(n);
            r.gt(p + ".constant", std::isfinite(e.constant) ? e.constant : -1.0, 0.0);
            r.le(p + ".rayleigh_defect", std::abs(e.rayleigh_ratio - e.constant) / e.constant, tol::kRayleigh);
            r.info(p + ".sum_of_norms_ratio", e.sum_of_norms_ratio);
            monotone = monotone && e.constant >= prev * (1.0 - tol::kRayleigh);
            prev = e.constant;
            korn.push_back({{"operator", op.name()}, {"degree", n}, {"constant", e.constant},
                            {"sum_of_norms_ratio", e.sum_of_norms_ratio}});
        }
        r.flag(std::string(name) + ".nondecreasing_in_N", monotone);
    }
    // d = 2 trend diagnostic: C-ellipticity fails, so growth in N is expected.
    for (int n = 1; n <= 4; ++n) {
        const KornEstimate e = korn_constant({DomainSpace::stf2, Codomain::Stf, 2}, n, 1);
        r.info("stf_Stf.d2." + fmt_n(n) + ".constant", e.constant);
        korn.push_back({{"operator", e.op.name()}, {"degree", n}, {"constant", e.constant}, {"trend_only", true}});
    }
    r.details["korn_constants"] = korn;

    // Coercivity chains at the configured discretization.
    {
        const ModelParams prm = cfg.params();
        const DiscreteSpaces sp = build_spaces(cfg.degree, cfg.subdivisions, pressure_mode_for(prm));
        const CoercivityChain chain(sp, prm);
        const CoercivityChain::Sweep sw = chain.sweep(200, cfg.seed, tol::kChainRelative);
        r.info("chain.fields", sw.fields);
        r.eq("chain.violations", sw.violations, 0.0);
        r.info("chain.worst_margin", sw.worst_margin);
    }

    // Right inverses over a refinement sweep N = 1, 2, 3.
    const std::pair<Codomain, const char*> projs[] = {
        {Codomain::stf, "stf"}, {Codomain::sym, "sym"}, {Codomain::identity, "identity"}};
    json ri = json::array();
    for (const auto& [proj, name] : projs) {
        double prev = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const BoxSpace data(3, n, 1);
            const std::string p = std::string("right_inverse.") + name + "." + fmt_n(n);
            const RightInverse e = div_right_inverse(constant_e1(data), proj, n, 1);
            r.le(p + ".weak_residual", e.weak_residual, tol::kWeakResidual);
            r.le(p + ".range_residual", e.range_residual, tol::kRangeResidual);
            r.le(p + ".energy_defect", e.energy_defect, tol::kEnergyIdentity);
            r.info(p + ".bound_ratio", e.bound_ratio);
            if (n > 1)
                r.le(p + ".bound_ratio_drift", std::abs(e.bound_ratio - prev) / prev, tol::kBoundRatioDrift);
            prev = e.bound_ratio;

            Eigen::VectorXd u(3 * data.size());
            for (int c = 0; c < 3; ++c)
                u.segment(c * data.size(), data.size()) = random_polynomial(data, n - 1, rng);
            const RightInverse q = div_right_inverse(u, proj, n, 1);
            r.le(p + ".poly.weak_residual", q.weak_residual, tol::kWeakResidual);
            r.le(p + ".poly.range_residual", q.range_residual, tol::kRangeResidual);
            r.le(p + ".poly.energy_defect", q.energy_defect, tol::kEnergyIdentity);
            ri.push_back({{"projection", name}, {"degree", n}, {"bound_ratio", e.bound_ratio},
                          {"poly_bound_ratio", q.bound_ratio}});
        }
    }
    {
        double prev = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const BoxSpace data(3, n, 1);
            const std::string p = "right_inverse.scalar." + fmt_n(n);
            const RightInverse e = scalar_div_right_inverse(data.project([](const Point&) { return 1.0; }), n, 1);
            r.le(p + ".weak_residual", e.weak_residual, tol::kWeakResidual);
            r.le(p + ".energy_defect", e.energy_defect, tol::kEnergyIdentity);
            r.info(p + ".bound_ratio", e.bound_ratio);
            if (n > 1)
                r.le(p + ".bound_ratio_drift", std::abs(e.bound_ratio - prev) / prev, tol::kBoundRatioDrift);
            prev = e.bound_ratio;
            const RightInverse q = scalar_div_right_inverse(random_polynomial(data, n - 1, rng), n, 1);
            r.le(p + ".poly.weak_residual", q.weak_residual, tol::kWeakResidual);
            r.le(p + ".poly.energy_defect", q.energy_defect, tol::kEnergyIdentity);
            ri.push_back({{"projection", "scalar"}, {"degree", n}, {"bound_ratio", e.bound_ratio}});
        }
    }
    r.details["right_inverse"] = ri;
    r.details["bound_ratio_note"] = "H1 norm of tau is measured, not derived from elliptic regularity";
    return r;
}

// ----------------------------------------------------------------- constants

// Max |B| outside the (u, sigma), (u, p) and (theta, s) blocks.
double b_structure_defect(const Eigen::MatrixXd& b, const DiscreteSpaces& sp)
{
    Eigen::MatrixXd m = b;
    m.block(sp.u.offset, sp.sigma.offset, sp.u.size, sp.sigma.size).setZero();
    m.block(sp.u.offset, sp.p.offset, sp.u.size, sp.p.size).setZero();
    m.block(sp.theta.offset, sp.s.offset, sp.theta.size, sp.s.size).setZero();
    return max_abs(m);
}

SuiteResult constants_suite(const RunConfig& cfg)
{
    SuiteResult r;
    r.suite = Suite::constants;
    const ModelParams prm = cfg.params();
    const DiscreteSpaces sp = build_spaces(cfg.degree, cfg.subdivisions, pressure_mode_for(prm));
    const MixedSystem sys = assemble_system(sp, prm, {}, {});

    r.info("dim_V", sp.dim_v());
    r.info("dim_Q", sp.dim_q());
    r.info("filtered_modes_u", sp.removed_u);
    r.info("filtered_modes_theta", sp.removed_theta);

    const BrezziConstants c = brezzi_constants(sys);
    r.gt("alpha0", c.alpha0, 0.0);
    r.gt("k0", c.k0, 0.0);
    r.eq("dim_kerBT", c.dim_kerBT, 0.0);
    r.info("dim_kerB", c.dim_kerB);
    r.info("normA", c.normA);
    r.info("normB", c.normB);
    r.le("k0_minus_normB", c.k0 - c.normB, tol::kRayleighSaddle);
    r.le("alpha0_minus_normA", c.alpha0 - c.normA, tol::kRayleighSaddle);

    const Eigen::MatrixXd z = kernel_basis(sys, tol::kKernel);
    r.le("kernel.max_Bz", z.cols() ? (sys.B * z).colwise().norm().maxCoeff() : 0.0, tol::kKernel);
    const CoercivityResult co = coercivity_constant(sys, z);
    r.le("alpha0.rayleigh_defect", std::abs(co.minimizer.dot(sys.A * co.minimizer) - co.alpha0),
         tol::kRayleighSaddle);
    {
        const Eigen::MatrixXd all = Eigen::MatrixXd::Identity(sp.dim_v(), sp.dim_v());
        const double full = coercivity_constant(sys, all).alpha0;
        if (prm.epsilon_w == 0.0)
            r.le("alpha0.unrestricted_abs", std::abs(full), tol::kRayleighSaddle);
        else
            r.info("alpha0.unrestricted", full);
    }

    // Structure: A - A^T = 2 K_c with K_c supported on the (s, sigma) blocks.
    const Eigen::MatrixXd kc = assemble_form(FormId::c, sp, prm);
    r.le("skew_identity_defect", max_abs(sys.A - sys.A.transpose() - 2.0 * kc), tol::kStructure);
    {
        Eigen::MatrixXd off = kc;
        off.block(sp.s.offset, sp.sigma.offset, sp.s.size, sp.sigma.size).setZero();
        off.block(sp.sigma.offset, sp.s.offset, sp.sigma.size, sp.s.size).setZero();
        r.le("skew_support_defect", max_abs(off), tol::kStructure);
    }
    const Eigen::MatrixXd fm = assemble_form(FormId::f, sp, prm);
    const Eigen::MatrixXd hm = assemble_form(FormId::h, sp, prm);
    r.le("dbar_regroup_defect",
         max_abs(assemble_form(FormId::dbar, sp, prm) - (assemble_form(FormId::d, sp, prm) + fm + fm.transpose() + hm)),
         tol::kStructure);
    if (prm.epsilon_w == 0.0) {
        r.eq("f_max_abs_at_eps0", max_abs(fm), 0.0);
        r.eq("h_max_abs_at_eps0", max_abs(hm), 0.0);
    }
    r.le("B_block_structure_defect", b_structure_defect(sys.B, sp), tol::kStructure);
    r.le("MV_symmetry_defect", max_abs(sys.MV - sys.MV.transpose()), tol::kGramSymmetry);
    r.le("MQ_symmetry_defect", max_abs(sys.MQ - sys.MQ.transpose()), tol::kGramSymmetry);
    r.gt("MV_min_eigenvalue", Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sys.MV).eigenvalues()[0], 0.0);
    r.gt("MQ_min_eigenvalue", Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sys.MQ).eigenvalues()[0], 0.0);

    // Diagnostic: the equal-order pairing is deficient.
    {
        const DiscreteSpaces eq = build_spaces(cfg.degree, cfg.subdivisions, sp.pressure_mode, QPairing::equal_order);
        const InfSupResult is = infsup_constant(assemble_form(FormId::B, eq, prm), assemble_form(FormId::MV, eq, prm),
                                                assemble_form(FormId::MQ, eq, prm), tol::kKernel);
        r.info("equal_order.dim_Q", eq.dim_q());
        r.info("equal_order.dim_kerBT", is.dim_kernel_transpose);
    }
    r.details["pairing"] = "filtered: L2 complement of the equal-order ker B^T within the u and theta blocks";
    return r;
}

// --------------------------------------------------------------------- solve

SuiteResult solve_suite(const RunConfig& cfg)
{
    SuiteResult r;
    r.suite = Suite::solve;
    const ModelParams prm = cfg.params();
    const DiscreteSpaces sp = build_spaces(cfg.degree, cfg.subdivisions, pressure_mode_for(prm));
    MixedSystem base = assemble_system(sp, prm, {}, {});
    const BrezziConstants c = brezzi_constants(base);
    r.info("alpha0", c.alpha0);
    r.info("k0", c.k0);
    r.info("normA", c.normA);

    for (int i = 0; i < 10; ++i) {
        const ProblemData d = random_data(cfg.seed, i);
        const auto [f, g] = assemble_load(sp, prm, d.sources, d.boundary);
        MixedSystem sys = base;
        sys.F = f;
        sys.G = g;
        const MixedSolution sol = solve_mixed(sys);
        const StabilityBounds b = stability_bounds(sys, sol, c);
        const std::string p = "data" + std::to_string(i);
        r.le(p + ".residual_primal", sol.residual_primal, tol::kSolveResidual);
        r.le(p + ".residual_constraint", sol.residual_constraint, tol::kSolveResidual);
        r.le(p + ".U_over_bound", b.normU / b.boundU, 1.0);
        r.le(p + ".P_over_bound", b.normP / b.boundP, 1.0);
        if (i == 0) {
            MixedSystem twice = sys;
            twice.F *= 2.0;
            twice.G *= 2.0;
            const MixedSolution s2 = solve_mixed(twice);
            Eigen::VectorXd x(sol.U.size() + sol.P.size()), x2(x.size());
            x << sol.U, sol.P;
            x2 << s2.U, s2.P;
            r.le("linearity_defect", (x2 - 2.0 * x).norm() / (2.0 * x.norm()), tol::kLinearity);
        }
    }
    const MixedSolution zero = solve_mixed(base);
    r.eq("zero_data.max_abs_solution", std::max(max_abs(zero.U), max_abs(zero.P)), 0.0);
    return r;
}

// --------------------------------------------------------------------- limit

SuiteResult limit_suite(const RunConfig& cfg)
{
    SuiteResult r;
    r.suite = Suite::limit;
    const ProblemData data = smooth_limit_data();
    double prev_ns = INFINITY, prev_f = INFINITY;
    bool mono_ns = true, mono_f = true;
    for (double kn : {1.0, 0.3, 0.1}) {
        const ModelParams prm{kn, cfg.chi_tilde, cfg.epsilon_w};
        const DiscreteSpaces sp = build_spaces(cfg.degree, cfg.subdivisions, pressure_mode_for(prm));
        const MixedSolution sol = solve_mixed(assemble_system(sp, prm, data.sources, data.boundary));
        const LimitResiduals lr = limit_consistency(sp, sol.U, sol.P, prm);
        char tag[32];
        std::snprintf(tag, sizeof tag, "kn%g", kn);
        r.info(std::string("res_ns.") + tag, lr.res_ns);
        r.info(std::string("res_fourier.") + tag, lr.res_fourier);
        mono_ns = mono_ns && lr.res_ns < prev_ns;
        mono_f = mono_f && lr.res_fourier < prev_f;
        prev_ns = lr.res_ns;
        prev_f = lr.res_fourier;
    }
    r.flag("res_ns.decreasing", mono_ns);
    r.flag("res_fourier.decreasing", mono_f);

    // sigma := -2 Kn stf D u inserted directly; u has degree <= N-1 per direction.
    {
        const ModelParams prm = cfg.params();
        const DiscreteSpaces sp = build_spaces(cfg.degree, cfg.subdivisions, pressure_mode_for(prm));
        const bool linear = cfg.degree >= 2;
        AnalyticFields fields;
        fields.u = [linear](const Point& x) {
            return linear ? std::array<double, 3>{x[1] * x[2], x[2] * x[0], x[0] * x[1]}
                          : std::array<double, 3>{1.0, 2.0, 3.0};
        };
        const double kn = prm.kn;
        fields.sigma = [linear, kn](const Point& x) {
            RTensor2 du(3);
            if (linear) {
                du(0, 1) = x[2], du(0, 2) = x[1];
                du(1, 0) = x[2], du(1, 2) = x[0];
                du(2, 0) = x[1], du(2, 1) = x[0];
            }
            RTensor2 s = project2(du, Proj2::stf);
            for (auto& v : s.data())
                v *= -2.0 * kn;
            return s;
        };
        const LimitResiduals lr = limit_consistency(sp, project_v(sp, fields), project_q(sp, fields), prm);
        r.le("manufactured.res_ns", lr.res_ns, tol::kManufactured);
    }
    return r;
}

// ------------------------------------------------------------------------ bc

SuiteResult bc_suite(const RunConfig& cfg)
{
    SuiteResult r;
    r.suite = Suite::bc;
    const ModelParams prm = cfg.params();
    const DiscreteSpaces sp = build_spaces(cfg.degree, cfg.subdivisions, pressure_mode_for(prm));

    const ProblemData data = wall_driven_data();
    const MixedSolution sol = solve_mixed(assemble_system(sp, prm, data.sources, data.boundary));
    const auto res = bc_residuals(sol.U, sol.P, sp, prm, data.boundary);
    bool finite = true;
    for (std::size_t i = 0; i < res.size(); ++i) {
        r.info("solution.relation" + std::to_string(i + 1), res[i]);
        finite = finite && std::isfinite(res[i]);
    }
    r.flag("solution.finite", finite);

    const auto zero = bc_residuals(Eigen::VectorXd(), Eigen::VectorXd(), sp, prm, BoundaryData{});
    r.eq("zero.max_relation", *std::max_element(zero.begin(), zero.end()), 0.0);

    // s = (x - 1/2, 1/2 - y, 0), sigma = diag(a, -a, 0), theta = theta_w.
    {
        const double kn = prm.kn, chi = prm.chi_tilde, theta_w = 0.7;
        const double a = 1.0 / chi + 96.0 * kn / 25.0;
        AnalyticFields fields;
        fields.s = [](const Point& x) { return std::array<double, 3>{x[0] - 0.5, 0.5 - x[1], 0.0}; };
        fields.sigma = [a](const Point&) {
            RTensor2 s(3);
            s(0, 0) = a;
            s(1, 1) = -a;
            return s;
        };
        fields.theta = [theta_w](const Point&) { return theta_w; };
        FaceData fd;
        fd.theta = theta_w;
        const auto m = bc_residuals(project_v(sp, fields), project_q(sp, fields), sp, prm, BoundaryData::uniform(fd));
        r.le("manufactured.relation4", m[3], tol::kManufactured);
    }
    return r;
}

}  // namespace

SuiteResult run_suite(Suite suite, const RunConfig& config)
{
    config.validate();
    switch (suite) {
    case Suite::ellipticity:
        return ellipticity_suite(config);
    case Suite::korn:
        return korn_suite(config);
    case Suite::constants:
        return constants_suite(config);
    case Suite::solve:
        return solve_suite(config);
    case Suite::limit:
        return limit_suite(config);
    case Suite::bc:
        return bc_suite(config);
    }
    throw std::logic_error("unknown suite");
}

}  // namespace r13
