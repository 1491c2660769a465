#ifndef CMX_MESH_HPP
#define CMX_MESH_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace cmx
{
    struct Vec2
    {
        double x = 0.0;
        double y = 0.0;
    };

    inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
    /// 2D cross product a1*b2 - a2*b1.
    inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

    enum class BoundaryTag
    {
        PEC,
        Impedance
    };

    /// Maps a boundary face midpoint to its boundary condition.
    using BoundaryClassifier = std::function<BoundaryTag(const Vec2&)>;

    struct Face
    {
        int v0 = -1, v1 = -1;   // endpoints, oriented along the owner's traversal
        int owner = -1;         // adjacent element with the lower index
        int neighbor = -1;      // second adjacent element, -1 on the boundary
        int owner_lf = -1;      // local face id (0..2) in owner
        int neighbor_lf = -1;   // local face id in neighbor
        Vec2 normal;            // unit normal pointing from owner into neighbor (outward on the boundary)
        Vec2 tangent;           // normal rotated by +pi/2: t = (-n.y, n.x)
        double length = 0.0;
        BoundaryTag tag = BoundaryTag::PEC;   // meaningful only for boundary faces

        bool is_boundary() const { return neighbor < 0; }
    };

    struct Rect
    {
        double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
        double width() const { return x1 - x0; }
        double height() const { return y1 - y0; }
    };

    /// Immutable conforming triangulation with face topology. Local face k of
    /// element (v0,v1,v2) is the edge (vk, v(k+1)%3); elements are counterclockwise.
    class Mesh
    {
    public:
        std::vector<Vec2> vertices;
        std::vector<std::array<int, 3>> elements;
        std::vector<Face> faces;
        std::vector<std::array<int, 3>> element_faces;   // per element, face index of each local face
        std::vector<double> element_area;
        std::vector<double> element_inradius;            // area / semi-perimeter

        int n_vertices() const { return static_cast<int>(vertices.size()); }
        int n_elements() const { return static_cast<int>(elements.size()); }
        int n_faces() const { return static_cast<int>(faces.size()); }

        double total_area() const;
        double min_inradius() const;
        Vec2 element_vertex(int e, int k) const { return vertices[elements[e][k]]; }
        Vec2 element_centroid(int e) const;

        /// Scales all vertex coordinates by s (test support for CFL monotonicity).
        Mesh scaled(double s, const BoundaryClassifier& classifier) const;
    };

    /// Builds faces, adjacency, normals and per-element geometry from raw
    /// vertices and (counterclockwise) triangles. Throws on degenerate or
    /// inconsistent input.
    Mesh build_mesh(std::vector<Vec2> vertices,
                    std::vector<std::array<int, 3>> triangles,
                    const BoundaryClassifier& classifier);

    /// Cartesian triangulation of a rectangle: nx*ny cells, each split into four
    /// triangles joined at the cell barycentre.
    Mesh cartesian_mesh(int nx, int ny, const Rect& domain, const BoundaryClassifier& classifier);

} // namespace cmx

#endif
