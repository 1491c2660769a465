#ifndef CMX_TEST_SUPPORT_HPP
#define CMX_TEST_SUPPORT_HPP

#include "cmx/mesh.hpp"

#include <array>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace cmx::test
{
    /// Writes vertices/triangles as a Gmsh MSH 2.2 ASCII file.
    inline void write_msh22(const std::string& path, const std::vector<Vec2>& verts,
                            const std::vector<std::array<int, 3>>& tris)
    {
        std::ofstream out(path);
        out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
        out << "$Nodes\n" << verts.size() << "\n";
        for (std::size_t i = 0; i < verts.size(); ++i)
            out << (i + 1) << " " << verts[i].x << " " << verts[i].y << " 0\n";
        out << "$EndNodes\n$Elements\n" << tris.size() << "\n";
        for (std::size_t i = 0; i < tris.size(); ++i)
            out << (i + 1) << " 2 2 0 1 " << (tris[i][0] + 1) << " " << (tris[i][1] + 1) << " "
                << (tris[i][2] + 1) << "\n";
        out << "$EndElements\n";
    }

    /// Structured triangulation of a rectangle at spacing ~h (two triangles per
    /// cell); stands in for an unstructured mesher in the sandbox.
    inline void structured_grid(const Rect& r, double h, std::vector<Vec2>& verts,
                                std::vector<std::array<int, 3>>& tris)
    {
        const int nx = std::max(1, static_cast<int>(std::lround(r.width() / h)));
        const int ny = std::max(1, static_cast<int>(std::lround(r.height() / h)));
        verts.clear();
        tris.clear();
        auto id = [&](int i, int j) { return j * (nx + 1) + i; };
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                verts.push_back({r.x0 + i * r.width() / nx, r.y0 + j * r.height() / ny});
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
            {
                tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            }
    }

    inline std::vector<double> random_state(std::size_t n, unsigned seed)
    {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<double> u(n);
        for (auto& v : u)
            v = dist(rng);
        return u;
    }
} // namespace cmx::test

#endif
