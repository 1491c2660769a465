#include "cmx/mesh.hpp"

#include <doctest.h>

#include <cmath>

using namespace cmx;

namespace
{
    BoundaryClassifier all_pec()
    {
        return [](const Vec2&) { return BoundaryTag::PEC; };
    }
} // namespace

TEST_CASE("unit cell cartesian mesh")
{
    const Mesh m = cartesian_mesh(1, 1, {0, 0, 1, 1}, all_pec());
    CHECK(m.n_vertices() == 5);
    CHECK(m.n_elements() == 4);
    CHECK(m.n_faces() == 8);
    int boundary = 0, interior = 0;
    for (const auto& f : m.faces)
        (f.is_boundary() ? boundary : interior)++;
    CHECK(boundary == 4);
    CHECK(interior == 4);
}

TEST_CASE("32x32 cartesian mesh has 4096 triangles")
{
    const Mesh m = cartesian_mesh(32, 32, {0, 0, 1, 1}, all_pec());
    CHECK(m.n_elements() == 4096);
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("64x16 mesh of (0,4)x(0,1): congruent elements, analytic inradius")
{
    const Mesh m = cartesian_mesh(64, 16, {0, 0, 4, 1}, all_pec());
    CHECK(m.n_elements() == 4096);
    // every cell is a (1/16)^2 square split into four congruent triangles with
    // base 1/16 and legs sqrt(2)/32; rho = area/s = (sqrt(2)-1)/32
    const double rho = (std::sqrt(2.0) - 1.0) / 32.0;
    double lo = 1e300, hi = 0.0;
    for (double r : m.element_inradius)
    {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(lo == doctest::Approx(rho).epsilon(1e-12));
    CHECK(hi - lo < 1e-14);
    CHECK(m.total_area() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("rejects invalid input")
{
    CHECK_THROWS(cartesian_mesh(0, 4, {0, 0, 1, 1}, all_pec()));
    CHECK_THROWS(cartesian_mesh(4, -1, {0, 0, 1, 1}, all_pec()));
    CHECK_THROWS(cartesian_mesh(4, 4, {0, 0, 0, 1}, all_pec()));
    // clockwise triangle
    CHECK_THROWS(build_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}}, all_pec()));
    // degenerate triangle
    CHECK_THROWS(build_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 1}}, all_pec()));
}

TEST_CASE("face geometry invariants")
{
    const Mesh m = cartesian_mesh(5, 3, {0, 0, 2, 1}, [](const Vec2& x)
                                  { return x.x < 1.0 ? BoundaryTag::PEC : BoundaryTag::Impedance; });

    // closed polygon: sum of len * outward normal vanishes per element
    for (int e = 0; e < m.n_elements(); ++e)
    {
        Vec2 sum{0, 0};
        for (int lf = 0; lf < 3; ++lf)
        {
            const Face& f = m.faces[m.element_faces[e][lf]];
            const double s = (f.owner == e) ? 1.0 : -1.0;
            sum = sum + (s * f.length) * f.normal;
        }
        CHECK(std::abs(sum.x) < 1e-13);
        CHECK(std::abs(sum.y) < 1e-13);
    }

    for (const auto& f : m.faces)
    {
        CHECK(std::abs(dot(f.normal, f.normal) - 1.0) < 1e-13);
        // tangent is the +pi/2 rotation of the normal
        CHECK(f.tangent.x == doctest::Approx(-f.normal.y));
        CHECK(f.tangent.y == doctest::Approx(f.normal.x));
        // normal points out of the owner (and from lower to higher element index)
        const Vec2 mid = 0.5 * (m.vertices[f.v0] + m.vertices[f.v1]);
        Vec2 co{0, 0};
        for (int k = 0; k < 3; ++k)
            co = co + (1.0 / 3.0) * m.vertices[m.elements[f.owner][k]];
        CHECK(dot(f.normal, mid - co) > 0.0);
        if (!f.is_boundary())
        {
            CHECK(f.owner < f.neighbor);
            Vec2 cn{0, 0};
            for (int k = 0; k < 3; ++k)
                cn = cn + (1.0 / 3.0) * m.vertices[m.elements[f.neighbor][k]];
            // seen from the neighbor the outward direction is -normal
            CHECK(dot(f.normal, mid - cn) < 0.0);
        }
    }

    for (double r : m.element_inradius)
        CHECK(r > 0.0);
    for (double a : m.element_area)
        CHECK(a > 0.0);

    for (const auto& f : m.faces)
        if (f.is_boundary())
        {
            const Vec2 mid = 0.5 * (m.vertices[f.v0] + m.vertices[f.v1]);
            CHECK(f.tag == (mid.x < 1.0 ? BoundaryTag::PEC : BoundaryTag::Impedance));
        }
}

TEST_CASE("scaling the mesh scales the geometry")
{
    const Mesh m = cartesian_mesh(4, 4, {0, 0, 1, 1}, all_pec());
    const Mesh m2 = m.scaled(2.0, all_pec());
    CHECK(m2.total_area() == doctest::Approx(4.0 * m.total_area()).epsilon(1e-12));
    CHECK(m2.min_inradius() == doctest::Approx(2.0 * m.min_inradius()).epsilon(1e-12));
}
