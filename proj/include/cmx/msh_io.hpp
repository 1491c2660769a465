#ifndef CMX_MSH_IO_HPP
#define CMX_MSH_IO_HPP

#include "cmx/mesh.hpp"

#include <stdexcept>
#include <string>

namespace cmx
{
    /// Malformed MSH input; carries the 1-based line number of the offending line.
    class MshParseError : public std::runtime_error
    {
    public:
        MshParseError(const std::string& msg, int line)
            : std::runtime_error("msh parse error at line " + std::to_string(line) + ": " + msg),
              line_(line)
        {
        }
        int line() const { return line_; }

    private:
        int line_;
    };

    /// Reads a Gmsh MSH version-2.2 ASCII file containing 3-node triangles
    /// (element type 2). Line and point elements (types 1, 15) are boundary
    /// markers and are skipped; any other element type is rejected. Physical
    /// tags are ignored: boundary conditions come from the geometric classifier.
    Mesh import_msh(const std::string& path, const BoundaryClassifier& classifier);

} // namespace cmx

#endif
