#include "cmx/msh_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace cmx
{
    namespace
    {
        struct LineReader
        {
            std::ifstream in;
            int line_no = 0;

            explicit LineReader(const std::string& path) : in(path)
            {
                if (!in.good())
                    throw std::runtime_error("import_msh: cannot open '" + path + "'");
            }

            std::string next()
            {
                std::string line;
                while (std::getline(in, line))
                {
                    ++line_no;
                    // strip trailing CR from DOS files
                    if (!line.empty() && line.back() == '\r')
                        line.pop_back();
                    if (!line.empty())
                        return line;
                    // blank lines are tolerated between records
                }
                throw MshParseError("unexpected end of file", line_no);
            }

            void expect(const std::string& token)
            {
                const std::string line = next();
                if (line != token)
                    throw MshParseError("expected '" + token + "', got '" + line + "'", line_no);
            }
        };
    } // namespace

    Mesh import_msh(const std::string& path, const BoundaryClassifier& classifier)
    {
        LineReader r(path);

        r.expect("$MeshFormat");
        {
            std::istringstream ss(r.next());
            std::string version;
            int file_type = -1, data_size = 0;
            ss >> version >> file_type >> data_size;
            if (version.rfind("2.", 0) != 0)
                throw MshParseError("unsupported MSH version '" + version + "' (need 2.2 ASCII)",
                                    r.line_no);
            if (file_type != 0)
                throw MshParseError("binary MSH files are not supported", r.line_no);
        }
        r.expect("$EndMeshFormat");

        std::string section = r.next();
        // skip optional sections ($PhysicalNames etc.) until $Nodes
        while (section != "$Nodes")
        {
            if (section.empty() || section[0] != '$')
                throw MshParseError("expected a section header, got '" + section + "'", r.line_no);
            const std::string end = "$End" + section.substr(1);
            while (r.next() != end)
            {
            }
            section = r.next();
        }

        std::vector<Vec2> verts;
        std::unordered_map<long, int> id_map;
        {
            std::istringstream ss(r.next());
            long count = -1;
            ss >> count;
            if (count < 0)
                throw MshParseError("bad node count", r.line_no);
            verts.reserve(count);
            id_map.reserve(count);
            for (long k = 0; k < count; ++k)
            {
                std::istringstream ns(r.next());
                long id;
                double x, y, z;
                if (!(ns >> id >> x >> y >> z))
                    throw MshParseError("malformed node record", r.line_no);
                id_map[id] = static_cast<int>(verts.size());
                verts.push_back({x, y});
            }
        }
        r.expect("$EndNodes");
        r.expect("$Elements");

        std::vector<std::array<int, 3>> tris;
        {
            std::istringstream ss(r.next());
            long count = -1;
            ss >> count;
            if (count < 0)
                throw MshParseError("bad element count", r.line_no);
            for (long k = 0; k < count; ++k)
            {
                std::istringstream es(r.next());
                long id;
                int type = -1, ntags = 0;
                if (!(es >> id >> type >> ntags))
                    throw MshParseError("malformed element record", r.line_no);
                for (int t = 0; t < ntags; ++t)
                {
                    long tag;
                    if (!(es >> tag))
                        throw MshParseError("malformed element tags", r.line_no);
                }
                if (type == 1 || type == 15)
                    continue;   // boundary line / point markers
                if (type != 2)
                    throw MshParseError(
                        "unsupported element type " + std::to_string(type) + " (need 3-node triangles)",
                        r.line_no);
                std::array<int, 3> tri;
                for (int v = 0; v < 3; ++v)
                {
                    long node;
                    if (!(es >> node))
                        throw MshParseError("malformed triangle connectivity", r.line_no);
                    auto it = id_map.find(node);
                    if (it == id_map.end())
                        throw MshParseError("triangle references unknown node " + std::to_string(node),
                                            r.line_no);
                    tri[v] = it->second;
                }
                // normalize to counterclockwise
                const Vec2 a = verts[tri[0]], b = verts[tri[1]], c = verts[tri[2]];
                if (cross(b - a, c - a) < 0.0)
                    std::swap(tri[1], tri[2]);
                tris.push_back(tri);
            }
        }
        r.expect("$EndElements");

        if (tris.empty())
            throw std::runtime_error("import_msh: no triangles in '" + path + "'");
        return build_mesh(std::move(verts), std::move(tris), classifier);
    }

} // namespace cmx
