#include "r13/ellipticity.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace r13 {

namespace {

bool is_rank2_codomain(Codomain c)
{
    return c == Codomain::sym || c == Codomain::dev || c == Codomain::stf;
}

bool is_rank3_codomain(Codomain c)
{
    return c == Codomain::Sym || c == Codomain::Dev || c == Codomain::Stf;
}

Proj2 to_proj2(Codomain c)
{
    switch (c) {
    case Codomain::sym:
        return Proj2::sym;
    case Codomain::dev:
        return Proj2::dev;
    case Codomain::stf:
        return Proj2::stf;
    default:
        return Proj2::identity;
    }
}

Proj3 to_proj3(Codomain c)
{
    switch (c) {
    case Codomain::Sym:
        return Proj3::Sym;
    case Codomain::Dev:
        return Proj3::Dev;
    case Codomain::Stf:
        return Proj3::Stf;
    default:
        return Proj3::identity;
    }
}

const char* codomain_name(Codomain c)
{
    switch (c) {
    case Codomain::identity:
        return "identity";
    case Codomain::sym:
        return "sym";
    case Codomain::dev:
        return "dev";
    case Codomain::stf:
        return "stf";
    case Codomain::Sym:
        return "Sym";
    case Codomain::Dev:
        return "Dev";
    case Codomain::Stf:
        return "Stf";
    }
    return "?";
}

}  // namespace

void OperatorSpec::validate() const
{
    if (dim < 2)
        throw std::invalid_argument("operator dimension must be >= 2");
    if (domain == DomainSpace::vectors && is_rank3_codomain(codomain))
        throw std::invalid_argument("vector domain requires a rank-2 codomain projection");
    if (domain != DomainSpace::vectors && is_rank2_codomain(codomain))
        throw std::invalid_argument("rank-2 domain requires a rank-3 codomain projection");
}

int OperatorSpec::domain_dim() const
{
    switch (domain) {
    case DomainSpace::vectors:
        return dim;
    case DomainSpace::stf2:
        return dim * (dim + 1) / 2 - 1;
    case DomainSpace::full2:
        return dim * dim;
    }
    return 0;
}

int OperatorSpec::codomain_dim() const
{
    return domain == DomainSpace::vectors ? dim * dim : dim * dim * dim;
}

std::string OperatorSpec::name() const
{
    const char* dom = domain == DomainSpace::vectors ? "vectors" : (domain == DomainSpace::stf2 ? "stf2" : "full2");
    return std::string(codomain_name(codomain)) + "D on " + dom + " (d=" + std::to_string(dim) + ")";
}

Eigen::VectorXd domain_basis_element(const OperatorSpec& op, int a)
{
    const int d = op.dim;
    switch (op.domain) {
    case DomainSpace::vectors: {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e(a) = 1.0;
        return e;
    }
    case DomainSpace::stf2:
        return stf_basis(2, d).at(static_cast<std::size_t>(a));
    case DomainSpace::full2: {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d * d);
        e(a) = 1.0;
        return e;
    }
    }
    throw std::invalid_argument("unknown domain space");
}

namespace {

std::vector<Eigen::VectorXd> domain_basis(const OperatorSpec& op)
{
    if (op.domain == DomainSpace::stf2)
        return stf_basis(2, op.dim);
    std::vector<Eigen::VectorXd> basis;
    for (int a = 0; a < op.domain_dim(); ++a)
        basis.push_back(domain_basis_element(op, a));
    return basis;
}

Eigen::MatrixXcd build_symbol(const OperatorSpec& op, const std::vector<Eigen::VectorXd>& basis,
                              const Eigen::VectorXcd& xi)
{
    const int d = op.dim;
    std::vector<Complex> xiv(xi.data(), xi.data() + d);
    const int ndom = static_cast<int>(basis.size());
    Eigen::MatrixXcd m(op.codomain_dim(), ndom);
    for (int a = 0; a < ndom; ++a) {
        const Eigen::VectorXd& b = basis[static_cast<std::size_t>(a)];
        if (op.domain == DomainSpace::vectors) {
            std::vector<Complex> v(b.data(), b.data() + d);
            const CTensor2 img = project2(outer(v, xiv), to_proj2(op.codomain));
            for (int r = 0; r < d * d; ++r)
                m(r, a) = img.data()[static_cast<std::size_t>(r)];
        } else {
            CTensor2 t(d);
            for (int r = 0; r < d * d; ++r)
                t.data()[static_cast<std::size_t>(r)] = b(r);
            const CTensor3 img = project3(outer(t, xiv), to_proj3(op.codomain));
            for (int r = 0; r < d * d * d; ++r)
                m(r, a) = img.data()[static_cast<std::size_t>(r)];
        }
    }
    return m;
}

double smallest_singular_value(const Eigen::MatrixXcd& m)
{
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues().minCoeff();
}

}  // namespace

SymbolMatrix symbol_matrix(const OperatorSpec& op, const Eigen::VectorXcd& xi)
{
    op.validate();
    if (xi.size() != op.dim)
        throw std::invalid_argument("symbol_matrix: frequency has wrong dimension");
    if (xi.norm() == 0.0)
        throw std::invalid_argument("zero frequency");
    return {xi, build_symbol(op, domain_basis(op), xi)};
}

double min_singular_value(const OperatorSpec& op, const Eigen::VectorXcd& xi)
{
    const SymbolMatrix s = symbol_matrix(op, xi / xi.norm());
    return smallest_singular_value(s.matrix);
}

int SamplingPlan::total(EllipticityMode mode) const
{
    if (mode == EllipticityMode::R)
        return real_samples;
    return real_samples + complex_samples + isotropic_samples + family_samples;
}

namespace {

std::vector<Eigen::VectorXcd> sample_frequencies(int d, EllipticityMode mode, const SamplingPlan& plan)
{
    std::mt19937_64 rng(plan.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto real_vec = [&] {
        Eigen::VectorXd v(d);
        for (int i = 0; i < d; ++i)
            v(i) = normal(rng);
        return v;
    };

    std::vector<Eigen::VectorXcd> out;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const Complex I(0.0, 1.0);

    if (mode == EllipticityMode::C) {
        // structured isotropic family first, so ties resolve to it
        for (int m = 0; m < plan.family_samples; ++m) {
            Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(d);
            xi(0) = 1.0;
            if (d == 2) {
                xi(1) = (m % 2 == 0) ? I : -I;
            } else {
                const double phi = 2.0 * std::numbers::pi * m / plan.family_samples;
                xi(1) = I * std::cos(phi);
                xi(2) = I * std::sin(phi);
            }
            out.push_back(xi * inv_sqrt2);
        }
    }
    for (int m = 0; m < plan.real_samples; ++m) {
        Eigen::VectorXd v = real_vec();
        out.emplace_back((v / v.norm()).cast<Complex>());
    }
    if (mode == EllipticityMode::C) {
        for (int m = 0; m < plan.complex_samples; ++m) {
            Eigen::VectorXcd xi = real_vec().cast<Complex>() + I * real_vec().cast<Complex>();
            out.push_back(xi / xi.norm());
        }
        for (int m = 0; m < plan.isotropic_samples; ++m) {
            Eigen::VectorXd a = real_vec();
            a /= a.norm();
            Eigen::VectorXd b = real_vec();
            b -= b.dot(a) * a;
            b /= b.norm();
            out.push_back((a.cast<Complex>() + I * b.cast<Complex>()) * inv_sqrt2);
        }
    }
    return out;
}

// Rotates v so that its largest-magnitude entry (first on ties) is real positive.
Eigen::VectorXcd phase_normalize(const Eigen::VectorXcd& v)
{
    Eigen::Index idx = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > best * (1.0 + 1e-9)) {
            best = std::abs(v(i));
            idx = i;
        }
    if (best <= 0.0)
        return v;
    return v * (std::conj(v(idx)) / std::abs(v(idx)));
}

}  // namespace

EllipticityVerdict check_ellipticity(const OperatorSpec& op, EllipticityMode mode, const SamplingPlan& plan)
{
    op.validate();
    const auto samples = sample_frequencies(op.dim, mode, plan);

    EllipticityVerdict verdict;
    verdict.mode = mode;
    verdict.samples = static_cast<int>(samples.size());
    verdict.min_singular_value = std::numeric_limits<double>::infinity();
    const auto basis = domain_basis(op);
    for (const auto& xi : samples) {
        const double s = smallest_singular_value(build_symbol(op, basis, xi));
        if (s < verdict.min_singular_value) {
            verdict.min_singular_value = s;
            verdict.minimizing_xi = xi;
        }
    }
    verdict.elliptic = verdict.min_singular_value > kEllipticityThreshold;

    if (!verdict.elliptic) {
        const Eigen::VectorXcd xi = phase_normalize(verdict.minimizing_xi);
        const SymbolMatrix s = symbol_matrix(op, xi);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.matrix, Eigen::ComputeFullV);
        const Eigen::VectorXcd coords = svd.matrixV().col(svd.matrixV().cols() - 1);

        Eigen::VectorXcd tensor = Eigen::VectorXcd::Zero(basis.front().size());
        for (std::size_t a = 0; a < basis.size(); ++a)
            tensor += coords(static_cast<Eigen::Index>(a)) * basis[a].cast<Complex>();

        EllipticityWitness w;
        w.xi = xi;
        w.tensor = phase_normalize(tensor / tensor.norm());
        w.residual = (s.matrix * coords).norm() / coords.norm();
        verdict.minimizing_xi = xi;
        verdict.witness = std::move(w);
    }
    return verdict;
}

namespace {

double lh_objective(const OperatorSpec& op, const Eigen::VectorXd& z)
{
    const int d = op.dim;
    const Proj2 kind = to_proj2(op.codomain);
    Eigen::MatrixXd cz(d * d, d);
    std::vector<double> zv(z.data(), z.data() + d);
    for (int b = 0; b < d; ++b) {
        std::vector<double> e(static_cast<std::size_t>(d), 0.0);
        e[static_cast<std::size_t>(b)] = 1.0;
        const RTensor2 img = project2(outer(zv, e), kind);
        for (int r = 0; r < d * d; ++r)
            cz(r, b) = img.data()[static_cast<std::size_t>(r)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cz);
    return svd.singularValues().minCoeff();
}

Eigen::VectorXd sphere_point(int d, double theta, double phi)
{
    Eigen::VectorXd z(d);
    if (d == 2) {
        z << std::cos(phi), std::sin(phi);
    } else {
        z << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
    }
    return z;
}

}  // namespace

double lh_constant(const OperatorSpec& op)
{
    op.validate();
    if (op.domain != DomainSpace::vectors)
        throw std::invalid_argument("lh_constant requires a vector-domain operator");
    const int d = op.dim;
    if (d != 2 && d != 3)
        throw std::invalid_argument("lh_constant supports d = 2 and d = 3");

    const double pi = std::numbers::pi;
    const int n_theta = d == 3 ? 64 : 1;
    const int n_phi = 128;
    double best = std::numeric_limits<double>::infinity();
    double best_theta = pi / 2, best_phi = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        const double theta = d == 3 ? pi * (i + 0.5) / n_theta : pi / 2;
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * pi * j / n_phi;
            const double f = lh_objective(op, sphere_point(d, theta, phi));
            if (f < best) {
                best = f;
                best_theta = theta;
                best_phi = phi;
            }
        }
    }

    double h_theta = pi / n_theta;
    double h_phi = 2.0 * pi / n_phi;
    for (int sweep = 0; sweep < 20; ++sweep) {
        bool improved = false;
        for (int sgn : {-1, 1}) {
            if (d == 3) {
                const double t = best_theta + sgn * h_theta;
                const double f = lh_objective(op, sphere_point(d, t, best_phi));
                if (f < best) {
                    best = f;
                    best_theta = t;
                    improved = true;
                }
            }
            const double p = best_phi + sgn * h_phi;
            const double f = lh_objective(op, sphere_point(d, best_theta, p));
            if (f < best) {
                best = f;
                best_phi = p;
                improved = true;
            }
        }
        if (!improved) {
            h_theta *= 0.5;
            h_phi *= 0.5;
        }
    }
    return best;
}

Rational make_rational(long long num, long long den)
{
    if (den == 0)
        throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num == 0)
        den = 1;
    return {num, den};
}

Prefactors general_d_prefactors(int dim)
{
    if (dim < 2)
        throw std::invalid_argument("general_d_prefactors: dimension must be >= 2");
    const long long d = dim;
    return {make_rational(1, d + 2), make_rational(2, 3 * (d + 2)), make_rational(d, d + 2),
            make_rational(2 * (d + 1), 3 * (d + 2)), make_rational(d - 2, 3 * (d + 2))};
}

}  // namespace r13
