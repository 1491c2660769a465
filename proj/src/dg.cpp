#include "cmx/dg.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>

namespace cmx
{
    using Block3 = Eigen::Matrix<double, Eigen::Dynamic, 3>;
    using MapB3 = Eigen::Map<Block3>;
    using CMapB3 = Eigen::Map<const Block3>;

    MaterialField MaterialField::uniform(const Mesh& mesh, double eps, double sigma, double mu,
                                         double z)
    {
        MaterialField m;
        m.eps.assign(mesh.n_elements(), eps);
        m.sigma.assign(mesh.n_elements(), sigma);
        m.mu.assign(mesh.n_elements(), mu);
        m.z_bc.assign(mesh.n_faces(), z);
        return m;
    }

    void MaterialField::validate(const Mesh& mesh) const
    {
        const std::size_t K = mesh.n_elements();
        if (eps.size() != K || sigma.size() != K || mu.size() != K)
            throw std::invalid_argument("MaterialField: per-element arrays must match the mesh");
        if (z_bc.size() != static_cast<std::size_t>(mesh.n_faces()))
            throw std::invalid_argument("MaterialField: z_bc must have one entry per face");
        for (std::size_t e = 0; e < K; ++e)
        {
            if (!(eps[e] > 0.0) || !(mu[e] > 0.0))
                throw std::invalid_argument("MaterialField: eps and mu must be positive");
            if (sigma[e] < 0.0)
                throw std::invalid_argument("MaterialField: sigma must be nonnegative");
        }
        for (int f = 0; f < mesh.n_faces(); ++f)
            if (mesh.faces[f].is_boundary() && mesh.faces[f].tag == BoundaryTag::Impedance &&
                !(z_bc[f] > 0.0))
                throw std::invalid_argument("MaterialField: impedance faces need z_bc > 0");
    }

    DgSpace::DgSpace(const Mesh& mesh, int degree) : mesh_(&mesh), ref_(degree)
    {
        const int K = mesh.n_elements();
        detJ_.resize(K);
        metric_.resize(K);
        for (int e = 0; e < K; ++e)
        {
            const Vec2 v0 = mesh.element_vertex(e, 0);
            const Vec2 v1 = mesh.element_vertex(e, 1);
            const Vec2 v2 = mesh.element_vertex(e, 2);
            const double xr = 0.5 * (v1.x - v0.x), xs = 0.5 * (v2.x - v0.x);
            const double yr = 0.5 * (v1.y - v0.y), ys = 0.5 * (v2.y - v0.y);
            const double det = xr * ys - xs * yr;
            detJ_[e] = det;
            metric_[e] = {ys / det, -yr / det, -xs / det, xr / det};   // rx, sx, ry, sy
        }
    }

    Vec2 DgSpace::node_position(int e, int node) const
    {
        const Vec2 v0 = mesh_->element_vertex(e, 0);
        const Vec2 v1 = mesh_->element_vertex(e, 1);
        const Vec2 v2 = mesh_->element_vertex(e, 2);
        const double r = ref_.nodes()(node, 0), s = ref_.nodes()(node, 1);
        return (-0.5 * (r + s)) * v0 + (0.5 * (1.0 + r)) * v1 + (0.5 * (1.0 + s)) * v2;
    }

    Vec2 DgSpace::face_quad_position(int face, int k) const
    {
        const Face& f = mesh_->faces[face];
        const Vec2 a = mesh_->vertices[f.v0], b = mesh_->vertices[f.v1];
        const double xi = ref_.face_quad_xi()[k];
        return (0.5 * (1.0 - xi)) * a + (0.5 * (1.0 + xi)) * b;
    }

    FieldState project_source(const DgSpace& space, const std::function<double(const Vec2&)>& j)
    {
        FieldState out(space.n_dof(), 0.0);
        for (int e = 0; e < space.n_elements(); ++e)
            for (int i = 0; i < space.nodes_per_elem(); ++i)
                out[space.dof(e, 0, i)] = j(space.node_position(e, i));
        return out;
    }

    ComplexField project_source(const DgSpace& space,
                                const std::function<std::complex<double>(const Vec2&)>& j)
    {
        ComplexField out(space.n_dof(), {0.0, 0.0});
        for (int e = 0; e < space.n_elements(); ++e)
            for (int i = 0; i < space.nodes_per_elem(); ++i)
                out[space.dof(e, 0, i)] = j(space.node_position(e, i));
        return out;
    }

    DgOperator::DgOperator(const DgSpace& space, const MaterialField& materials, Options opts)
        : space_(&space), materials_(&materials), opts_(opts)
    {
        materials.validate(space.mesh());
        const Mesh& mesh = space.mesh();
        const int K = mesh.n_elements();
        z_flux_.resize(K);
        y_flux_.resize(K);
        for (int e = 0; e < K; ++e)
        {
            z_flux_[e] = std::sqrt(materials.mu[e] / materials.eps[e]);
            y_flux_[e] = 1.0 / z_flux_[e];
        }
        face_coef_.resize(mesh.n_faces());
        for (int f = 0; f < mesh.n_faces(); ++f)
        {
            const Face& face = mesh.faces[f];
            FaceCoef& c = face_coef_[f];
            c.z_o = z_flux_[face.owner];
            c.y_o = y_flux_[face.owner];
            if (!face.is_boundary())
            {
                c.z_n = z_flux_[face.neighbor];
                c.y_n = y_flux_[face.neighbor];
                c.inv_sum_y = 1.0 / (c.y_o + c.y_n);
                c.inv_sum_z = 1.0 / (c.z_o + c.z_n);
            }
            else if (face.tag == BoundaryTag::Impedance)
            {
                c.z_bc = materials.z_bc[f];
                c.y_bc = 1.0 / c.z_bc;
            }
        }
    }

    // Volume terms plus the owner-side lift of every adjacent face; writes only
    // into element e's dofs.
    void DgOperator::element_kernel(int e, const double* u, double* out) const
    {
        const DgSpace& sp = *space_;
        const ReferenceElement& ref = sp.ref();
        const Mesh& mesh = sp.mesh();
        const MaterialField& mat = *materials_;
        const int n = sp.nodes_per_elem();
        const int nfq = ref.n_face_quad();

        CMapB3 U(u + sp.block(e, 0), n, 3);
        MapB3 OUT(out + sp.block(e, 0), n, 3);

        const auto& [rx, sx, ry, sy] = sp.metric(e);
        const Block3 Ur = ref.Dr() * U;
        const Block3 Us = ref.Ds() * U;

        const double inv_eps = 1.0 / mat.eps[e];
        const double inv_mu = 1.0 / mat.mu[e];
        const double sig = mat.sigma[e];

        // eps dE/dt = -sigma E - (dx H2 - dy H1);  mu dH/dt = (dy E, -dx E)
        OUT.col(0) = (-sig * U.col(0) - (rx * Ur.col(2) + sx * Us.col(2)) +
                      (ry * Ur.col(1) + sy * Us.col(1))) *
                     inv_eps;
        OUT.col(1) = (ry * Ur.col(0) + sy * Us.col(0)) * inv_mu;
        OUT.col(2) = -(rx * Ur.col(0) + sx * Us.col(0)) * inv_mu;

        if (!opts_.include_face_terms)
            return;

        Eigen::Matrix<double, Eigen::Dynamic, 3> dens(nfq, 3);
        for (int lf = 0; lf < 3; ++lf)
        {
            const int fi = mesh.element_faces[e][lf];
            const Face& face = mesh.faces[fi];
            const FaceCoef& c = face_coef_[fi];
            const bool is_owner = (face.owner == e);
            const double side = is_owner ? 1.0 : -1.0;
            const Vec2 t = face.tangent;

            // traces at the face quadrature points, ordered along the face
            const Eigen::MatrixXd& interp_self =
                ref.face_interp(is_owner ? face.owner_lf : face.neighbor_lf, is_owner);
            const Block3 Ts = interp_self * U;

            if (!face.is_boundary())
            {
                const double* other_ptr = u + sp.block(is_owner ? face.neighbor : face.owner, 0);
                CMapB3 Uo(other_ptr, n, 3);
                const Eigen::MatrixXd& interp_other =
                    ref.face_interp(is_owner ? face.neighbor_lf : face.owner_lf, !is_owner);
                const Block3 To = interp_other * Uo;

                const double a = opts_.upwind;
                for (int k = 0; k < nfq; ++k)
                {
                    const double E_s = Ts(k, 0), Ht_s = Ts(k, 1) * t.x + Ts(k, 2) * t.y;
                    const double E_x = To(k, 0), Ht_x = To(k, 1) * t.x + To(k, 2) * t.y;
                    // owner/neighbor ordering of the flux formulas
                    const double E_o = is_owner ? E_s : E_x, E_n = is_owner ? E_x : E_s;
                    const double Ht_o = is_owner ? Ht_s : Ht_x, Ht_n = is_owner ? Ht_x : Ht_s;
                    const double Ehat =
                        (c.y_o * E_o + c.y_n * E_n + a * (Ht_o - Ht_n)) * c.inv_sum_y;
                    const double Hthat =
                        (c.z_o * Ht_o + c.z_n * Ht_n + a * (E_o - E_n)) * c.inv_sum_z;
                    const double dE = -side * (Hthat - Ht_s);
                    const double dH = -side * (Ehat - E_s);
                    dens(k, 0) = dE;
                    dens(k, 1) = dH * t.x;
                    dens(k, 2) = dH * t.y;
                }
            }
            else if (face.tag == BoundaryTag::PEC)
            {
                for (int k = 0; k < nfq; ++k)
                {
                    const double E = Ts(k, 0);
                    // Ehat = 0, Hthat = Ht + Y_flux E
                    dens(k, 0) = -c.y_o * E;
                    dens(k, 1) = E * t.x;
                    dens(k, 2) = E * t.y;
                }
            }
            else   // impedance, homogeneous part (G enters through source_vector)
            {
                for (int k = 0; k < nfq; ++k)
                {
                    const double E = Ts(k, 0), Ht = Ts(k, 1) * t.x + Ts(k, 2) * t.y;
                    const double w = E + c.z_bc * Ht;   // outgoing characteristic
                    const double Ehat = 0.5 * w;
                    const double Hthat = 0.5 * c.y_bc * w;
                    const double dE = -(Hthat - Ht);
                    const double dH = -(Ehat - E);
                    dens(k, 0) = dE;
                    dens(k, 1) = dH * t.x;
                    dens(k, 2) = dH * t.y;
                }
            }

            const double scale = face.length / (2.0 * sp.det_jacobian(e));
            dens.col(0) *= scale * inv_eps;
            dens.col(1) *= scale * inv_mu;
            dens.col(2) *= scale * inv_mu;
            const Eigen::MatrixXd& L =
                ref.lift(is_owner ? face.owner_lf : face.neighbor_lf, is_owner);
            OUT.noalias() += L * dens;
        }
    }

    void DgOperator::apply_B(const double* u, double* out) const
    {
        const int K = space_->n_elements();
#pragma omp parallel for schedule(static)
        for (int e = 0; e < K; ++e)
            element_kernel(e, u, out);
    }

    void DgOperator::apply_B(const FieldState& u, FieldState& out) const
    {
        check_same_size(u.size(), static_cast<std::size_t>(space_->n_dof()), "apply_B");
        out.resize(u.size());
        apply_B(u.data(), out.data());
    }

    void DgOperator::apply_rhs(const ComplexField& S, double omega, double t, const FieldState& u,
                               FieldState& out) const
    {
        apply_B(u, out);
        if (!S.empty())
        {
            check_same_size(S.size(), u.size(), "apply_rhs");
            const double c = std::cos(omega * t), s = std::sin(omega * t);
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] += c * S[i].real() - s * S[i].imag();
        }
    }

    ComplexField DgOperator::source_vector(const SourceSpec& sources) const
    {
        const DgSpace& sp = *space_;
        const ReferenceElement& ref = sp.ref();
        const Mesh& mesh = sp.mesh();
        ComplexField S(sp.n_dof(), {0.0, 0.0});

        if (sources.volume_j)
        {
            for (int e = 0; e < sp.n_elements(); ++e)
                for (int i = 0; i < sp.nodes_per_elem(); ++i)
                    S[sp.dof(e, 0, i)] = sources.volume_j(sp.node_position(e, i));
        }

        if (sources.boundary_g && opts_.include_face_terms)
        {
            const int n = sp.nodes_per_elem();
            const int nfq = ref.n_face_quad();
            for (int fi = 0; fi < mesh.n_faces(); ++fi)
            {
                const Face& face = mesh.faces[fi];
                if (!face.is_boundary() || face.tag != BoundaryTag::Impedance)
                    continue;
                const FaceCoef& c = face_coef_[fi];
                const int e = face.owner;
                const Vec2 t = face.tangent;
                const Vec2 nrm = face.normal;

                Eigen::VectorXcd g(nfq);
                for (int k = 0; k < nfq; ++k)
                    g[k] = sources.boundary_g(sp.face_quad_position(fi, k), nrm);

                // G-parts of the impedance flux: Ehat += G/2, Hthat += -(Y/2) G
                const double scale = face.length / (2.0 * sp.det_jacobian(e));
                const Eigen::MatrixXd& L = ref.lift(face.owner_lf, true);
                Eigen::VectorXcd dE = (0.5 * c.y_bc * scale / materials_->eps[e]) * g;
                Eigen::VectorXcd dH = (-0.5 * scale / materials_->mu[e]) * g;
                for (int i = 0; i < n; ++i)
                {
                    std::complex<double> accE{0.0, 0.0}, accH{0.0, 0.0};
                    for (int k = 0; k < nfq; ++k)
                    {
                        accE += L(i, k) * dE[k];
                        accH += L(i, k) * dH[k];
                    }
                    S[sp.dof(e, 0, i)] += accE;
                    S[sp.dof(e, 1, i)] += accH * t.x;
                    S[sp.dof(e, 2, i)] += accH * t.y;
                }
            }
        }
        return S;
    }

    void DgOperator::apply_mass(const double* u, double* out) const
    {
        const DgSpace& sp = *space_;
        const int n = sp.nodes_per_elem();
        const int K = sp.n_elements();
#pragma omp parallel for schedule(static)
        for (int e = 0; e < K; ++e)
        {
            CMapB3 U(u + sp.block(e, 0), n, 3);
            MapB3 OUT(out + sp.block(e, 0), n, 3);
            const double d = sp.det_jacobian(e);
            OUT.noalias() = sp.ref().mass() * U;
            OUT.col(0) *= d * materials_->eps[e];
            OUT.col(1) *= d * materials_->mu[e];
            OUT.col(2) *= d * materials_->mu[e];
        }
    }

    void DgOperator::apply_mass_inverse(const double* u, double* out) const
    {
        const DgSpace& sp = *space_;
        const int n = sp.nodes_per_elem();
        const int K = sp.n_elements();
#pragma omp parallel for schedule(static)
        for (int e = 0; e < K; ++e)
        {
            CMapB3 U(u + sp.block(e, 0), n, 3);
            MapB3 OUT(out + sp.block(e, 0), n, 3);
            const double d = sp.det_jacobian(e);
            OUT.noalias() = sp.ref().mass_inv() * U;
            OUT.col(0) /= d * materials_->eps[e];
            OUT.col(1) /= d * materials_->mu[e];
            OUT.col(2) /= d * materials_->mu[e];
        }
    }

    FieldState DgOperator::apply_mass(const FieldState& u) const
    {
        check_same_size(u.size(), static_cast<std::size_t>(space_->n_dof()), "apply_mass");
        FieldState out(u.size());
        apply_mass(u.data(), out.data());
        return out;
    }

    FieldState DgOperator::apply_mass_inverse(const FieldState& u) const
    {
        check_same_size(u.size(), static_cast<std::size_t>(space_->n_dof()), "apply_mass_inverse");
        FieldState out(u.size());
        apply_mass_inverse(u.data(), out.data());
        return out;
    }

    ComplexField DgOperator::apply_mass(const ComplexField& u) const
    {
        check_same_size(u.size(), static_cast<std::size_t>(space_->n_dof()), "apply_mass");
        const std::size_t nd = u.size();
        FieldState re(nd), im(nd), mre(nd), mim(nd);
        for (std::size_t i = 0; i < nd; ++i)
        {
            re[i] = u[i].real();
            im[i] = u[i].imag();
        }
        apply_mass(re.data(), mre.data());
        apply_mass(im.data(), mim.data());
        ComplexField out(nd);
        for (std::size_t i = 0; i < nd; ++i)
            out[i] = {mre[i], mim[i]};
        return out;
    }

    double DgOperator::weighted_inner(const FieldState& u, const FieldState& v) const
    {
        check_same_size(u.size(), v.size(), "weighted_inner");
        check_same_size(u.size(), static_cast<std::size_t>(space_->n_dof()), "weighted_inner");
        const DgSpace& sp = *space_;
        const int n = sp.nodes_per_elem();
        const int K = sp.n_elements();
        std::vector<double> partial(K);
#pragma omp parallel for schedule(static)
        for (int e = 0; e < K; ++e)
        {
            CMapB3 U(u.data() + sp.block(e, 0), n, 3);
            CMapB3 V(v.data() + sp.block(e, 0), n, 3);
            const Block3 MU = sp.ref().mass() * U;
            const double d = sp.det_jacobian(e);
            partial[e] = d * (materials_->eps[e] * V.col(0).dot(MU.col(0)) +
                              materials_->mu[e] *
                                  (V.col(1).dot(MU.col(1)) + V.col(2).dot(MU.col(2))));
        }
        double sum = 0.0;   // fixed-order reduction keeps runs bit-reproducible
        for (int e = 0; e < K; ++e)
            sum += partial[e];
        return sum;
    }

    std::complex<double> DgOperator::weighted_inner(const ComplexField& u,
                                                    const ComplexField& v) const
    {
        check_same_size(u.size(), v.size(), "weighted_inner");
        const DgSpace& sp = *space_;
        const int n = sp.nodes_per_elem();
        const int K = sp.n_elements();
        using C = std::complex<double>;
        std::vector<C> partial(K);
        const Eigen::MatrixXcd massc = sp.ref().mass().cast<C>();
#pragma omp parallel for schedule(static)
        for (int e = 0; e < K; ++e)
        {
            Eigen::Map<const Eigen::Matrix<C, Eigen::Dynamic, 3>> U(u.data() + sp.block(e, 0), n, 3);
            Eigen::Map<const Eigen::Matrix<C, Eigen::Dynamic, 3>> V(v.data() + sp.block(e, 0), n, 3);
            const Eigen::Matrix<C, Eigen::Dynamic, 3> MU = massc * U;
            const double d = sp.det_jacobian(e);
            partial[e] = d * (materials_->eps[e] * V.col(0).dot(MU.col(0)) +
                              materials_->mu[e] *
                                  (V.col(1).dot(MU.col(1)) + V.col(2).dot(MU.col(2))));
        }
        C sum{0.0, 0.0};
        for (int e = 0; e < K; ++e)
            sum += partial[e];
        return sum;
    }

    double DgOperator::weighted_norm(const FieldState& u) const
    {
        return std::sqrt(std::max(0.0, weighted_inner(u, u)));
    }

    double DgOperator::weighted_norm(const ComplexField& u) const
    {
        return std::sqrt(std::max(0.0, weighted_inner(u, u).real()));
    }

} // namespace cmx
