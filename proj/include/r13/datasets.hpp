#pragma once

// Reproducible data sets shared by the suites, the acceptance binary and the
// unit tests.

#include <cstdint>

#include "r13/galerkin.hpp"

namespace r13 {

struct ProblemData {
    VolumeSources sources;
    BoundaryData boundary;
};

// Smooth volume data with homogeneous walls: b = (sin(pi y), 0, 0),
// r = cos(pi x), m = 0.
ProblemData smooth_limit_data();

// Wall-driven data: u_t1 = 1 on the face z = 1, theta = 1 on the face x = 1.
ProblemData wall_driven_data();

// Sources are quadratic polynomials with coefficients uniform in [-1, 1] and
// every wall value is uniform in [-1, 1]. Data set `index` of a seeded family.
ProblemData random_data(std::uint64_t seed, int index);

}  // namespace r13
