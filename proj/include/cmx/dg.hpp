#ifndef CMX_DG_HPP
#define CMX_DG_HPP

#include "cmx/field.hpp"
#include "cmx/mesh.hpp"
#include "cmx/reference_element.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <optional>

namespace cmx
{
    /// Element-wise constant material coefficients and per-face surface impedance.
    struct MaterialField
    {
        std::vector<double> eps;      // per element, > 0
        std::vector<double> sigma;    // per element, >= 0
        std::vector<double> mu;       // per element, > 0
        std::vector<double> z_bc;     // per face; surface impedance, used on impedance faces

        static MaterialField uniform(const Mesh& mesh, double eps = 1.0, double sigma = 0.0,
                                     double mu = 1.0, double z = 1.0);

        void validate(const Mesh& mesh) const;
    };

    /// Broken polynomial space P_q(T_h)^3 for (E, H1, H2) with the nodal basis
    /// of ReferenceElement on every (affine) triangle.
    class DgSpace
    {
    public:
        DgSpace(const Mesh& mesh, int degree);

        const Mesh& mesh() const { return *mesh_; }
        const ReferenceElement& ref() const { return ref_; }
        int degree() const { return ref_.degree(); }
        int n_elements() const { return mesh_->n_elements(); }
        int nodes_per_elem() const { return ref_.n_nodes(); }
        int n_dof() const { return 3 * nodes_per_elem() * n_elements(); }

        int dof(int e, int field, int node) const
        {
            return (3 * e + field) * nodes_per_elem() + node;
        }
        int block(int e, int field) const { return (3 * e + field) * nodes_per_elem(); }

        double det_jacobian(int e) const { return detJ_[e]; }
        /// Metric factors (rx, sx, ry, sy) of the affine map.
        const std::array<double, 4>& metric(int e) const { return metric_[e]; }

        Vec2 node_position(int e, int node) const;
        Vec2 face_quad_position(int face, int k) const;   // k-th Gauss point along the face

    private:
        const Mesh* mesh_;
        ReferenceElement ref_;
        std::vector<double> detJ_;
        std::vector<std::array<double, 4>> metric_;
    };

    /// Time-harmonic data: volume current amplitude j and impedance boundary
    /// amplitude g. The physical signals are Re(j e^{i w t}), Re(g e^{i w t});
    /// g is the trace of e + h x n of the field the boundary should admit.
    struct SourceSpec
    {
        double omega = 0.0;
        std::function<std::complex<double>(const Vec2&)> volume_j;                 // may be null
        std::function<std::complex<double>(const Vec2&, const Vec2&)> boundary_g;  // (x, n); may be null
    };

    /// Nodal interpolation of a scalar function onto the E-field dofs; H dofs
    /// are zero. Complex variant interpolates into a ComplexField.
    FieldState project_source(const DgSpace& space, const std::function<double(const Vec2&)>& j);
    ComplexField project_source(const DgSpace& space,
                                const std::function<std::complex<double>(const Vec2&)>& j);

    /// Semi-discrete TM Maxwell operator. The ODE system reads
    ///     du/dt = Phi(t, u) = B u + Re(S e^{i w t}),
    /// where B applies the upwind-flux DG discretization (volume curl terms,
    /// interior/PEC/impedance fluxes, sigma damping) after the block-diagonal
    /// mass inverse, and S collects the volume and boundary sources.
    class DgOperator
    {
    public:
        struct Options
        {
            // Jump penalty weight of the interior flux; 1 is the exact Riemann
            // (characteristic) coupling. The default 2 reproduces the reference
            // frequency-domain errors of the experiments and is the value the
            // stated CFL constants are calibrated for.
            double upwind = 2.0;
            bool include_face_terms = true;   // volume-only operator (test support)
        };

        struct FaceCoef
        {
            double inv_sum_y = 0;   // 1 / (Y_o + Y_n)
            double inv_sum_z = 0;   // 1 / (Z_o + Z_n)
            double z_o = 0, z_n = 0, y_o = 0, y_n = 0;
            double z_bc = 0, y_bc = 0;   // surface impedance (impedance faces)
        };

        DgOperator(const DgSpace& space, const MaterialField& materials, Options opts);
        DgOperator(const DgSpace& space, const MaterialField& materials)
            : DgOperator(space, materials, Options{})
        {
        }

        const DgSpace& space() const { return *space_; }
        const MaterialField& materials() const { return *materials_; }

        /// out = B u. Element-parallel (OpenMP), owner-writes: every element
        /// computes its own volume and face contributions, so the result is
        /// bitwise reproducible for any thread count.
        void apply_B(const double* u, double* out) const;
        void apply_B(const FieldState& u, FieldState& out) const;

        /// Serial reference implementation assembling face fluxes in a
        /// face-major sweep; kept as an independent check of apply_B.
        void apply_B_serial(const double* u, double* out) const;

        /// out = Phi(t, u) = B u + Re(S e^{i w t}).
        void apply_rhs(const ComplexField& S, double omega, double t, const FieldState& u,
                       FieldState& out) const;

        /// Complex source vector S with Phi(t, 0) = Re(S e^{i w t}); also the
        /// mass-normalized load of the frequency-domain system.
        ComplexField source_vector(const SourceSpec& sources) const;

        /// (eps,mu)-weighted mass matrix application, exact per-element solves.
        void apply_mass(const double* u, double* out) const;
        void apply_mass_inverse(const double* u, double* out) const;
        FieldState apply_mass(const FieldState& u) const;
        FieldState apply_mass_inverse(const FieldState& u) const;
        ComplexField apply_mass(const ComplexField& u) const;

        /// Weighted L2 pairing v^T M u; the complex version is sesquilinear in v.
        double weighted_inner(const FieldState& u, const FieldState& v) const;
        std::complex<double> weighted_inner(const ComplexField& u, const ComplexField& v) const;
        double weighted_norm(const FieldState& u) const;
        double weighted_norm(const ComplexField& u) const;

        const FaceCoef& face_coef(int f) const { return face_coef_[f]; }
        double flux_impedance(int e) const { return z_flux_[e]; }

    private:
        void element_kernel(int e, const double* u, double* out) const;

        const DgSpace* space_;
        const MaterialField* materials_;
        Options opts_;
        std::vector<double> z_flux_, y_flux_;   // per element sqrt(mu/eps) and inverse
        std::vector<FaceCoef> face_coef_;       // per face, precomputed flux coefficients
    };

} // namespace cmx

#endif
