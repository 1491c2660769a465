#include "cmx/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cmx
{
    double Mesh::total_area() const
    {
        double a = 0.0;
        for (double v : element_area)
            a += v;
        return a;
    }

    double Mesh::min_inradius() const
    {
        double r = element_inradius.empty() ? 0.0 : element_inradius[0];
        for (double v : element_inradius)
            r = std::min(r, v);
        return r;
    }

    Vec2 Mesh::element_centroid(int e) const
    {
        const auto& t = elements[e];
        return (1.0 / 3.0) * (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]);
    }

    Mesh Mesh::scaled(double s, const BoundaryClassifier& classifier) const
    {
        std::vector<Vec2> v = vertices;
        for (auto& p : v)
            p = s * p;
        return build_mesh(std::move(v), elements, classifier);
    }

    Mesh build_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                    const BoundaryClassifier& classifier)
    {
        Mesh m;
        m.vertices = std::move(vertices);
        m.elements = std::move(triangles);
        const int K = m.n_elements();
        if (K == 0)
            throw std::invalid_argument("build_mesh: empty triangulation");

        m.element_area.resize(K);
        m.element_inradius.resize(K);
        for (int e = 0; e < K; ++e)
        {
            const auto& t = m.elements[e];
            for (int k = 0; k < 3; ++k)
                if (t[k] < 0 || t[k] >= m.n_vertices())
                    throw std::invalid_argument("build_mesh: vertex index out of range");
            const Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
            const double area2 = cross(b - a, c - a);
            if (!(area2 > 0.0))
                throw std::invalid_argument("build_mesh: element " + std::to_string(e) +
                                            " is degenerate or not counterclockwise");
            const double area = 0.5 * area2;
            auto len = [](Vec2 u) { return std::sqrt(dot(u, u)); };
            const double per = len(b - a) + len(c - b) + len(a - c);
            m.element_area[e] = area;
            m.element_inradius[e] = area / (0.5 * per);
        }

        // face identification: sorted vertex pair -> face index
        std::map<std::pair<int, int>, int> edge_to_face;
        m.element_faces.assign(K, {-1, -1, -1});
        for (int e = 0; e < K; ++e)
        {
            const auto& t = m.elements[e];
            for (int k = 0; k < 3; ++k)
            {
                const int a = t[k], b = t[(k + 1) % 3];
                const auto key = std::minmax(a, b);
                auto it = edge_to_face.find(key);
                if (it == edge_to_face.end())
                {
                    Face f;
                    f.v0 = a;
                    f.v1 = b;   // owner traversal direction
                    f.owner = e;
                    f.owner_lf = k;
                    m.faces.push_back(f);
                    edge_to_face.emplace(key, static_cast<int>(m.faces.size()) - 1);
                    m.element_faces[e][k] = static_cast<int>(m.faces.size()) - 1;
                }
                else
                {
                    Face& f = m.faces[it->second];
                    if (f.neighbor >= 0)
                        throw std::invalid_argument("build_mesh: edge shared by more than two elements");
                    if (!(f.v0 == b && f.v1 == a))
                        throw std::invalid_argument(
                            "build_mesh: inconsistent orientation across an interior edge");
                    f.neighbor = e;
                    f.neighbor_lf = k;
                    m.element_faces[e][k] = it->second;
                }
            }
        }

        // keep the owner at the lower element index so runs are reproducible
        for (auto& f : m.faces)
        {
            if (f.neighbor >= 0 && f.neighbor < f.owner)
            {
                std::swap(f.owner, f.neighbor);
                std::swap(f.owner_lf, f.neighbor_lf);
                std::swap(f.v0, f.v1);
            }
        }

        for (auto& f : m.faces)
        {
            const Vec2 a = m.vertices[f.v0], b = m.vertices[f.v1];
            const Vec2 d = b - a;
            f.length = std::sqrt(dot(d, d));
            if (!(f.length > 0.0))
                throw std::invalid_argument("build_mesh: zero-length face");
            // outward normal of the owner's counterclockwise traversal
            f.normal = {d.y / f.length, -d.x / f.length};
            f.tangent = {-f.normal.y, f.normal.x};
            if (f.is_boundary())
                f.tag = classifier(0.5 * (a + b));
        }
        return m;
    }

    Mesh cartesian_mesh(int nx, int ny, const Rect& domain, const BoundaryClassifier& classifier)
    {
        if (nx < 1 || ny < 1)
            throw std::invalid_argument("cartesian_mesh: nx, ny must be positive");
        if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
            throw std::invalid_argument("cartesian_mesh: degenerate rectangle");

        const double hx = domain.width() / nx;
        const double hy = domain.height() / ny;
        std::vector<Vec2> verts((nx + 1) * (ny + 1) + nx * ny);
        auto grid = [&](int i, int j) { return j * (nx + 1) + i; };
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                verts[grid(i, j)] = {domain.x0 + i * hx, domain.y0 + j * hy};
        const int c0 = (nx + 1) * (ny + 1);
        auto center = [&](int i, int j) { return c0 + j * nx + i; };
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                verts[center(i, j)] = {domain.x0 + (i + 0.5) * hx, domain.y0 + (j + 0.5) * hy};

        std::vector<std::array<int, 3>> tris;
        tris.reserve(4 * nx * ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
            {
                const int sw = grid(i, j), se = grid(i + 1, j);
                const int ne = grid(i + 1, j + 1), nw = grid(i, j + 1);
                const int c = center(i, j);
                tris.push_back({sw, se, c});
                tris.push_back({se, ne, c});
                tris.push_back({ne, nw, c});
                tris.push_back({nw, sw, c});
            }
        return build_mesh(std::move(verts), std::move(tris), classifier);
    }

} // namespace cmx
