#pragma once

// Conforming Galerkin discretization of the grouped mixed R13 system on the
// unit cube: V_h = (stf sigma, s, p) with H^1 components, Q_h = (u, theta) with
// L^2 components, all built from one scalar C0 tensor-product space.
//
// Matrix conventions: A(i, j) = A(phi_j, phi_i) (row = test, column = trial),
// B(i, j) = B(phi_j^V, chi_i^Q), so the discrete problem is
//     [A  B^T] [U]   [F]
//     [B  0  ] [P] = [G].

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "r13/polynomial_space.hpp"
#include "r13/tensor.hpp"

namespace r13 {

struct ModelParams {
    double kn = 1.0;
    double chi_tilde = 1.0;
    double epsilon_w = 0.0;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct FaceData {
    double un = 0.0, ut1 = 0.0, ut2 = 0.0, p = 0.0, theta = 0.0;
};

// Face f has outward normal sign * e_axis with f = 2 * axis + (sign > 0).
struct BoundaryData {
    std::array<FaceData, 6> faces{};

    static BoundaryData uniform(const FaceData& data);
    static int face_index(int axis, int sign) { return 2 * axis + (sign > 0 ? 1 : 0); }
    void validate() const;
};

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<std::array<double, 3>(const Point&)>;
using TensorField = std::function<RTensor2(const Point&)>;

// Empty callables stand for zero fields.
struct VolumeSources {
    ScalarField m_src;
    VectorField b;
    ScalarField r_src;
};

enum class PressureMode { zero_mean, full };

// How the L^2 space Q_h is paired with V_h. equal_order uses the scalar
// space of V_h for every component of (u, theta); B^T then has a
// parameter-independent kernel (on one cell: the top tensor-product Legendre
// mode of each component plus three curl-like top-degree velocity modes).
// filtered takes the L^2-orthogonal complement of that kernel within each of
// the u and theta blocks.
enum class QPairing { equal_order, filtered };

// Relative singular-value cut used to detect the equal-order kernel.
inline constexpr double kPairingRankTol = 1e-10;

PressureMode pressure_mode_for(const ModelParams& params);

struct IndexRange {
    int offset = 0;
    int size = 0;
};

struct DiscreteSpaces {
    int degree = 1;
    int subdivisions = 1;
    PressureMode pressure_mode = PressureMode::full;
    QPairing q_pairing = QPairing::filtered;

    BoxSpace scalar;
    std::vector<Eigen::VectorXd> stf;  // 5 orthonormal stf coordinates (row-major 3x3)
    Eigen::MatrixXd p_transform;       // full scalar coefficients = p_transform * reduced
    Eigen::MatrixXd u_transform;       // 3*ns x u.size, full (u1, u2, u3) coefficients
    Eigen::MatrixXd theta_transform;   // ns x theta.size
    int removed_u = 0;                 // equal-order modes removed by the filter
    int removed_theta = 0;

    IndexRange sigma, s, p;  // reduced V blocks
    IndexRange u, theta;     // reduced Q blocks; u holds 3 consecutive components

    int scalar_size() const { return scalar.size(); }
    int dim_v() const { return p.offset + p.size; }
    int dim_q() const { return theta.offset + theta.size; }

    // Full (unreduced) layouts: sigma 5*ns, s 3*ns, p ns | u 3*ns, theta ns.
    int full_v() const { return 9 * scalar_size(); }
    int full_q() const { return 4 * scalar_size(); }
    Eigen::MatrixXd v_transform() const;  // full_v x dim_v
    Eigen::MatrixXd q_full_transform() const;  // full_q x dim_q

    Eigen::VectorXd expand_v(const Eigen::VectorXd& reduced) const;
    Eigen::VectorXd expand_q(const Eigen::VectorXd& reduced) const;
};

DiscreteSpaces build_spaces(int degree, int subdivisions, PressureMode pressure_mode,
                            QPairing q_pairing = QPairing::filtered);

enum class FormId { a, b, c, d, e, f, g, h, dbar, A, B, MV, MQ };

FormId parse_form_id(const std::string& name);

// Sub-forms are returned embedded in the reduced global layout of the matrix
// they contribute to (V x V for a, c, d, f, h, dbar, A, MV; Q x V for b, e, g,
// B; Q x Q for MQ):
//   a:  rows s-test r, columns s-trial:           a(s, r)
//   c:  skew contribution c(s, psi) - c(r, sigma)  to A
//   d:  rows/columns sigma:                        d(sigma, psi)
//   f:  rows sigma-test psi, columns p-trial:      f(p, psi)
//   h:  rows/columns p:                            h(p, q)
//   dbar = d + f + f^T + h
//   b:  rows theta-test kappa, columns s-trial:    b(kappa, s)
//   e:  rows u-test v, columns sigma-trial:        e(v, sigma)
//   g:  rows u-test v, columns p-trial:            g(p, v)
Eigen::MatrixXd assemble_form(FormId id, const DiscreteSpaces& spaces, const ModelParams& params);

// c(r, sigma) alone: rows s-test r, columns sigma-trial (V x V layout).
Eigen::MatrixXd assemble_c_coupling(const DiscreteSpaces& spaces, const ModelParams& params);

struct MixedSystem {
    Eigen::MatrixXd A, B, MV, MQ;
    Eigen::VectorXd F, G;
    ModelParams params;
};

std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_load(const DiscreteSpaces& spaces, const ModelParams& params,
                                                          const VolumeSources& sources, const BoundaryData& bdata);

MixedSystem assemble_system(const DiscreteSpaces& spaces, const ModelParams& params, const VolumeSources& sources,
                            const BoundaryData& bdata);

// Pointwise values of a discrete (U, P) pair, with exact derivatives.
struct PointFields {
    Point x{};
    RTensor2 sigma{3};
    RTensor3 grad_sigma{3};  // (D sigma)_ijk = d_k sigma_ij
    std::array<double, 3> s{};
    RTensor2 grad_s{3};
    double p = 0.0;
    std::array<double, 3> grad_p{};
    std::array<double, 3> u{};
    RTensor2 grad_u{3};
    double theta = 0.0;
    std::array<double, 3> grad_theta{};
};

class FieldEvaluator {
public:
    // Either vector may be empty, which stands for zero.
    FieldEvaluator(const DiscreteSpaces& spaces, const Eigen::VectorXd& U, const Eigen::VectorXd& P);

    PointFields at(const PointBasis& basis) const;
    PointFields at(const Point& x) const;

private:
    const DiscreteSpaces* spaces_;
    Eigen::MatrixXd sigma_;  // ns x 5
    Eigen::MatrixXd s_;      // ns x 3
    Eigen::VectorXd p_;
    Eigen::MatrixXd u_;  // ns x 3
    Eigen::VectorXd theta_;
};

struct Closures {
    RTensor3 m3{3};
    RTensor2 R{3};
    double delta = 0.0;
};

// m = -2 Kn Stf D sigma, R = -(24/5) Kn stf D s, Delta = -12 Kn div s.
Closures closures_at(const PointFields& f, const ModelParams& params);

struct ClosureSamples {
    std::vector<Point> points;
    std::vector<Closures> values;
};

ClosureSamples compute_closures(const Eigen::VectorXd& U, const DiscreteSpaces& spaces, const ModelParams& params);

// L^2(Gamma) norms of the seven Onsager boundary relations, each written as
// lhs - rhs with the tangential pairs of relations 2 and 3 combined.
std::array<double, 7> bc_residuals(const Eigen::VectorXd& U, const Eigen::VectorXd& P, const DiscreteSpaces& spaces,
                                   const ModelParams& params, const BoundaryData& bdata);

// Elementwise L^2 projection of analytic fields onto V_h and Q_h. sigma is
// projected onto its stf coordinates; unset callables project to zero.
struct AnalyticFields {
    TensorField sigma;
    VectorField s;
    ScalarField p;
    VectorField u;
    ScalarField theta;
};

Eigen::VectorXd project_v(const DiscreteSpaces& spaces, const AnalyticFields& fields);
Eigen::VectorXd project_q(const DiscreteSpaces& spaces, const AnalyticFields& fields);

// Coordinate text format: one "row col value" triple per nonzero entry.
void export_coo(std::ostream& out, const Eigen::MatrixXd& m, double drop_tol = 0.0);

// CSV with header "x,y,z,component,value" at the volume quadrature points.
void export_fields_csv(std::ostream& out, const DiscreteSpaces& spaces, const Eigen::VectorXd& U,
                       const Eigen::VectorXd& P);

}  // namespace r13
