#pragma once

// Every pass/fail threshold used by the verification suites. The report
// embeds this table verbatim; nothing else in the suites hard-codes a
// tolerance.

#include <array>

#include "r13/ellipticity.hpp"

namespace r13::tol {

// Minimal symbol singular value that certifies ellipticity at unit |xi|.
inline constexpr double kEllipticMinSingular = kEllipticityThreshold;
// Sampled directions required for a C-ellipticity certificate.
inline constexpr double kEllipticMinSamples = 1e4;
// |symbol(xi) T| / |T| for a reported kernel pair.
inline constexpr double kWitnessResidual = 1e-12;
// 1 - |<T_ref, T_witness>| for unit tensors.
inline constexpr double kWitnessAlignment = 1e-12;
// |computed - exact| for the rational prefactors.
inline constexpr double kPrefactor = 1e-15;

// |korn_quotient(extremizer) - c_N| / c_N.
inline constexpr double kRayleigh = 1e-9;
// Relative slack allowed in each line of the coercivity chains.
inline constexpr double kChainRelative = 1e-12;
// Weak divergence residual of the discrete right inverse.
inline constexpr double kWeakResidual = 1e-10;
// max |P[tau] - tau| relative to max |tau|.
inline constexpr double kRangeResidual = 1e-13;
// | |tau|^2 - int u.v | relative to |tau|^2.
inline constexpr double kEnergyIdentity = 1e-10;
// |r(N+1) - r(N)| / r(N) for the right-inverse bound ratio.
inline constexpr double kBoundRatioDrift = 0.2;

// Rank cut and |B z| for kernel vectors.
inline constexpr double kKernel = 1e-10;
// Entrywise defect of the skew identity and the B block structure.
inline constexpr double kStructure = 1e-12;
// Entrywise symmetry defect of the Gram matrices.
inline constexpr double kGramSymmetry = 1e-13;
// |A(z*, z*) - alpha0| at the coercivity minimizer; k0 <= |B| and alpha0 <= |A| slack.
inline constexpr double kRayleighSaddle = 1e-10;

// Relative residuals of the direct saddle-point solve.
inline constexpr double kSolveResidual = 1e-10;
// |x(2F, 2G) - 2 x(F, G)| / |2 x(F, G)|.
inline constexpr double kLinearity = 1e-11;

// res_NS for sigma := -2 Kn stf D u inserted exactly; Onsager relation 4
// for a field built to satisfy it.
inline constexpr double kManufactured = 1e-12;

struct Entry {
    const char* name;
    double value;
    const char* meaning;
};

inline constexpr std::array<Entry, 18> kTable{{
    {"elliptic_min_singular", kEllipticMinSingular, "min symbol singular value at |xi| = 1 certifying ellipticity"},
    {"elliptic_min_samples", kEllipticMinSamples, "sampled directions required for a C-ellipticity certificate"},
    {"witness_residual", kWitnessResidual, "|symbol(xi) T| / |T| of a kernel pair"},
    {"witness_alignment", kWitnessAlignment, "1 - |<T_ref, T>| between unit kernel tensors"},
    {"prefactor", kPrefactor, "absolute error of the rational prefactors"},
    {"rayleigh", kRayleigh, "relative gap between Korn eigenvalue and quotient at the extremizer"},
    {"chain_relative", kChainRelative, "relative slack in each coercivity chain line"},
    {"weak_residual", kWeakResidual, "H^-1 weak divergence residual of the right inverse"},
    {"range_residual", kRangeResidual, "relative re-projection residual of tau"},
    {"energy_identity", kEnergyIdentity, "relative defect of |tau|^2 = int u.v"},
    {"bound_ratio_drift", kBoundRatioDrift, "relative change of the bound ratio under N -> N+1"},
    {"kernel", kKernel, "singular value cut relative to sigma_max and |B z|"},
    {"structure", kStructure, "entrywise skew identity and B block structure defect"},
    {"gram_symmetry", kGramSymmetry, "entrywise symmetry defect of M_V and M_Q"},
    {"rayleigh_saddle", kRayleighSaddle, "Rayleigh and continuity slack of the Brezzi constants"},
    {"solve_residual", kSolveResidual, "relative residuals of the mixed solve"},
    {"linearity", kLinearity, "relative linearity defect of the solution map"},
    {"manufactured", kManufactured, "residual of exactly constructed fields"},
}};

}  // namespace r13::tol
