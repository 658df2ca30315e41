#include "r13/datasets.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace r13 {

namespace {

// 1, x, y, z, x^2, y^2, z^2, xy, yz, zx
using Quadratic = std::array<double, 10>;

double eval_quadratic(const Quadratic& c, const Point& x)
{
    return c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[2] + c[4] * x[0] * x[0] + c[5] * x[1] * x[1] +
           c[6] * x[2] * x[2] + c[7] * x[0] * x[1] + c[8] * x[1] * x[2] + c[9] * x[2] * x[0];
}

}  // namespace

ProblemData smooth_limit_data()
{
    ProblemData d;
    d.sources.b = [](const Point& x) {
        return std::array<double, 3>{std::sin(std::numbers::pi * x[1]), 0.0, 0.0};
    };
    d.sources.r_src = [](const Point& x) { return std::cos(std::numbers::pi * x[0]); };
    return d;
}

ProblemData wall_driven_data()
{
    ProblemData d;
    d.boundary.faces[BoundaryData::face_index(2, 1)].ut1 = 1.0;
    d.boundary.faces[BoundaryData::face_index(0, 1)].theta = 1.0;
    return d;
}

ProblemData random_data(std::uint64_t seed, int index)
{
    std::seed_seq seq{seed, static_cast<std::uint64_t>(index)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto quadratic = [&] {
        Quadratic c;
        for (double& v : c)
            v = unit(rng);
        return c;
    };
    const Quadratic m = quadratic(), r = quadratic();
    const std::array<Quadratic, 3> b{quadratic(), quadratic(), quadratic()};

    ProblemData d;
    d.sources.m_src = [m](const Point& x) { return eval_quadratic(m, x); };
    d.sources.r_src = [r](const Point& x) { return eval_quadratic(r, x); };
    d.sources.b = [b](const Point& x) {
        return std::array<double, 3>{eval_quadratic(b[0], x), eval_quadratic(b[1], x), eval_quadratic(b[2], x)};
    };
    for (auto& f : d.boundary.faces)
        f = {unit(rng), unit(rng), unit(rng), unit(rng), unit(rng)};
    return d;
}

}  // namespace r13
